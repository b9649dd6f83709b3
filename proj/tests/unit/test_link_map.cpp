#include <doctest.h>

#include "ranstack/link_map.hpp"
#include "ranstack/phy.hpp"
#include "ranstack/rng.hpp"

using namespace ranstack;

namespace {

LinkGeometry random_geometry(Rng& rng, std::size_t n_ues, std::size_t n_carriers) {
    LinkGeometry geom;
    for (std::size_t c = 0; c < n_carriers; ++c) {
        LinkGeometry::CarrierGeom g;
        g.cell_position = {rng.uniform_range(-3000, 3000), rng.uniform_range(-3000, 3000)};
        g.tx_power_dbm = 20 + rng.uniform() * 26;
        g.freq_mhz = (c % 3 == 0) ? 800.0 : (c % 3 == 1 ? 2600.0 : 28000.0);
        g.band = freq_band_class(g.freq_mhz);
        g.noise_dbm = phy::noise_floor_dbm(10.0, 7.0);
        geom.carriers.push_back(std::move(g));
    }
    for (std::size_t c = 0; c < n_carriers; ++c) {
        for (std::size_t o = 0; o < n_carriers; ++o) {
            if (o != c && geom.carriers[o].freq_mhz == geom.carriers[c].freq_mhz) {
                geom.carriers[c].cochannel.push_back(static_cast<std::uint32_t>(o));
            }
        }
    }
    for (std::size_t u = 0; u < n_ues; ++u) {
        geom.ue_positions.push_back({rng.uniform_range(-4000, 4000), rng.uniform_range(-4000, 4000)});
    }
    return geom;
}

}  // namespace

TEST_CASE("parallel SINR fill is bit-identical to the serial reference") {
    Rng rng(99);
    for (int trial = 0; trial < 8; ++trial) {
        const auto geom = random_geometry(rng, 500 + rng.below(2000), 2 + rng.below(10));
        LinkMatrix serial, parallel;
        fill_link_matrix_serial(geom, serial);
        fill_link_matrix_parallel(geom, parallel);
        REQUIRE(serial.size() == parallel.size());
        for (std::size_t i = 0; i < serial.size(); ++i) {
            REQUIRE(serial[i] == parallel[i]);  // exact, not approximate
        }
    }
}

TEST_CASE("matrix entries match the scalar phy path") {
    Rng rng(5);
    const auto geom = random_geometry(rng, 16, 4);
    LinkMatrix out;
    fill_link_matrix_serial(geom, out);
    for (std::size_t u = 0; u < geom.ue_positions.size(); ++u) {
        for (std::size_t c = 0; c < geom.carriers.size(); ++c) {
            const auto& g = geom.carriers[c];
            const double pl = phy::path_loss_db(distance_m(geom.ue_positions[u], g.cell_position),
                                                g.freq_mhz, g.band);
            std::vector<double> interferers;
            for (auto j : g.cochannel) {
                const auto& ig = geom.carriers[j];
                interferers.push_back(
                    ig.tx_power_dbm -
                    phy::path_loss_db(distance_m(geom.ue_positions[u], ig.cell_position),
                                      ig.freq_mhz, ig.band));
            }
            const double expected = phy::sinr_db(phy::rx_power_dbm(g.tx_power_dbm, pl),
                                                 interferers, g.noise_dbm);
            CHECK(out[u * geom.carriers.size() + c] == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}
