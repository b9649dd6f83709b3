#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ranstack/phy.hpp"

using namespace ranstack;

TEST_CASE("path loss matches the free-space reference at 1 m") {
    // Friis free-space oracle at the anchor: 20log10(d) + 20log10(f) - 27.55.
    const double friis_1m_1ghz = 20.0 * std::log10(1.0) + 20.0 * std::log10(1000.0) - 27.55;
    CHECK(phy::path_loss_db(1.0, 1000.0, BandClass::MID) == doctest::Approx(friis_1m_1ghz));
    CHECK(friis_1m_1ghz == doctest::Approx(32.45).epsilon(1e-9));

    // At the 1 m anchor the distance term vanishes for every band class.
    for (auto band : {BandClass::LOW, BandClass::MID, BandClass::HIGH}) {
        CHECK(phy::path_loss_db(1.0, 700.0, band) ==
              doctest::Approx(20.0 * std::log10(700.0) - 27.55));
    }
}

TEST_CASE("path loss at 10 m, MID band") {
    // 32.45 + 10 * 3.0 * log10(10) = 62.45.
    CHECK(phy::path_loss_db(10.0, 1000.0, BandClass::MID) == doctest::Approx(62.45).epsilon(1e-9));
}

TEST_CASE("distances below 1 m clamp to the reference point") {
    CHECK(phy::path_loss_db(0.2, 1000.0, BandClass::MID) ==
          phy::path_loss_db(1.0, 1000.0, BandClass::MID));
}

TEST_CASE("path loss is monotone in distance and frequency") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto band = static_cast<BandClass>(rng.below(3));
        const double f = 400 + rng.uniform() * 40000;
        const double d1 = 1 + rng.uniform() * 5000;
        const double d2 = d1 + rng.uniform() * 5000;
        CHECK(phy::path_loss_db(d2, f, band) >= phy::path_loss_db(d1, f, band));
        const double f2 = f * (1 + rng.uniform());
        CHECK(phy::path_loss_db(d1, f2, band) >= phy::path_loss_db(d1, f, band));
    }
}

TEST_CASE("snr with no interferers is plain dB arithmetic") {
    // Arithmetic oracle: 30 dBm tx - 98.46 dB loss - (-94 dBm noise) = 25.54.
    const double rx = phy::rx_power_dbm(30.0, 98.46);
    const double snr = phy::sinr_db(rx, {}, -94.0);
    CHECK(snr == doctest::Approx(30.0 - 98.46 + 94.0).epsilon(1e-9));
    CHECK(snr == doctest::Approx(25.54).epsilon(1e-6));
}

TEST_CASE("noise floor follows bandwidth and noise figure") {
    // -174 dBm/Hz + 10log10(BW) + NF.
    CHECK(phy::noise_floor_dbm(10.0, 7.0) ==
          doctest::Approx(-174.0 + 10.0 * std::log10(10e6) + 7.0));
}

TEST_CASE("one equal-power interferer pins SINR just below 0 dB") {
    // Equal-power two-term oracle: signal / (noise + signal); with noise far
    // below the interferer this approaches exactly 0 dB from below.
    const double rx = -60.0;
    const double interferer[] = {-60.0};
    const double sinr = phy::sinr_db(rx, interferer, -120.0);
    CHECK(sinr < 0.0);
    CHECK(sinr == doctest::Approx(0.0).epsilon(1e-4));
}

TEST_CASE("se curve lookup and capacity") {
    SeCurve curve = {{-6.0, 0}, {0.0, 50}, {10.0, 100}};
    CHECK(phy::se_bits_per_ru(curve, -10.0) == 0);
    CHECK(phy::se_bits_per_ru(curve, -6.0) == 0);
    CHECK(phy::se_bits_per_ru(curve, 0.0) == 50);
    CHECK(phy::se_bits_per_ru(curve, 9.99) == 50);
    CHECK(phy::se_bits_per_ru(curve, 25.0) == 100);

    RatProfile rat;
    rat.resource_units_per_mhz = 5;
    rat.se_curve = {{-6.0, 0}, {0.0, 100}};
    CarrierCfg car;
    car.bandwidth_mhz = 10.0;

    SUBCASE("below the lowest step nothing flows") {
        CHECK(phy::tb_capacity_bits(rat, car, -20.0) == 0);
    }
    SUBCASE("flat region multiplies out") {
        // 5 RU/MHz * 10 MHz = 50 RU at 100 bits each.
        CHECK(phy::tb_capacity_bits(rat, car, 5.0) == 5000);
    }
    SUBCASE("doubling bandwidth doubles capacity") {
        CarrierCfg wide = car;
        wide.bandwidth_mhz = 20.0;
        for (double sinr : {-3.0, 1.0, 7.0, 30.0}) {
            CHECK(phy::tb_capacity_bits(rat, wide, sinr) ==
                  2 * phy::tb_capacity_bits(rat, car, sinr));
        }
    }
}

TEST_CASE("capacity is monotone in sinr") {
    RatProfile rat;
    rat.resource_units_per_mhz = 10;
    rat.se_curve = default_se_curve();
    CarrierCfg car;
    car.bandwidth_mhz = 10.0;
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const double s1 = -20 + rng.uniform() * 60;
        const double s2 = s1 + rng.uniform() * 30;
        CHECK(phy::tb_capacity_bits(rat, car, s2) >= phy::tb_capacity_bits(rat, car, s1));
    }
}

TEST_CASE("bler is 0.5 at the step boundary and decays a decade per 2 dB") {
    SeCurve curve = {{-6.0, 0}, {0.0, 50}, {10.0, 100}};
    PhyParams params;
    CHECK(phy::bler(curve, 0.0, params) == doctest::Approx(0.5));
    CHECK(phy::bler(curve, 2.0, params) == doctest::Approx(0.05));
    CHECK(phy::bler(curve, 4.0, params) == doctest::Approx(0.005));
    CHECK(phy::bler(curve, 10.0, params) == doctest::Approx(0.5));  // next step boundary
    CHECK(phy::bler(curve, 40.0, params) == doctest::Approx(params.bler_floor));
}

TEST_CASE("transmit: ideal link always delivers") {
    phy::LinkState link;
    link.sinr_db = -50.0;
    link.ideal = true;
    Rng rng(9);
    PhyParams params;
    for (int i = 0; i < 1000; ++i) {
        CHECK(phy::transmit(100, 100, link, default_se_curve(), params, rng) ==
              phy::TxOutcome::DELIVERED);
    }
}

TEST_CASE("transmit: oversized block is a MAC bug") {
    phy::LinkState link;
    link.ideal = true;
    Rng rng(1);
    PhyParams params;
    CHECK_THROWS_AS(phy::transmit(101, 100, link, default_se_curve(), params, rng), ProtocolError);
}

TEST_CASE("monte carlo loss at the step boundary matches 0.5 within 0.01") {
    SeCurve curve = {{-6.0, 0}, {0.0, 50}};
    PhyParams params;
    phy::LinkState link;
    link.sinr_db = 0.0;  // exactly at the boundary
    Rng rng(12345);
    const int trials = 100000;
    int lost = 0;
    for (int i = 0; i < trials; ++i) {
        if (phy::transmit(50, 50, link, curve, params, rng) == phy::TxOutcome::LOST) ++lost;
    }
    const double observed = static_cast<double>(lost) / trials;
    CHECK(observed == doctest::Approx(0.5).epsilon(0.02));
    CHECK(std::abs(observed - 0.5) <= 0.01);
}

TEST_CASE("empirical loss matches bler within 3 standard errors across margins") {
    SeCurve curve = {{-6.0, 0}, {0.0, 50}};
    PhyParams params;
    for (double margin : {0.0, 1.0, 2.0, 3.0}) {
        phy::LinkState link;
        link.sinr_db = margin;
        Rng rng(777 + static_cast<std::uint64_t>(margin * 10));
        const int trials = 100000;
        int lost = 0;
        for (int i = 0; i < trials; ++i) {
            if (phy::transmit(1, 50, link, curve, params, rng) == phy::TxOutcome::LOST) ++lost;
        }
        const double p = phy::bler(curve, margin, params);
        const double se = std::sqrt(p * (1 - p) / trials);
        CHECK(std::abs(static_cast<double>(lost) / trials - p) <= 3 * se + 1e-12);
    }
}

TEST_CASE("same seed gives an identical outcome sequence") {
    SeCurve curve = {{-6.0, 0}, {0.0, 50}};
    PhyParams params;
    phy::LinkState link;
    link.sinr_db = 1.0;
    auto run_once = [&](std::uint64_t seed) {
        Rng rng(seed);
        std::vector<int> outcomes;
        for (int i = 0; i < 500; ++i) {
            outcomes.push_back(
                phy::transmit(1, 50, link, curve, params, rng) == phy::TxOutcome::LOST ? 1 : 0);
        }
        return outcomes;
    };
    CHECK(run_once(42) == run_once(42));
    CHECK(run_once(42) != run_once(43));
}
