#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ranstack/forwarding.hpp"

using namespace ranstack;

namespace {

PdcpPdu pdu_with_seq(std::uint64_t seq) {
    PdcpPdu pdu;
    pdu.seq = seq;
    pdu.sn = static_cast<std::uint16_t>(seq % kPdcpSnSpace);
    pdu.payload.assign(100, 0xab);
    return pdu;
}

}  // namespace

TEST_CASE("split weights are proportional to rates") {
    std::vector<fwd::PathEstimate> est(2);
    est[0].ewma_rate_bps = 2e6;
    est[1].ewma_rate_bps = 1e6;
    const auto w = fwd::split_weights(est);
    CHECK(w[0] == doctest::Approx(2.0 / 3.0));
    CHECK(w[1] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("single path gets weight one") {
    std::vector<fwd::PathEstimate> est(1);
    est[0].ewma_rate_bps = 5e6;
    const auto w = fwd::split_weights(est);
    REQUIRE(w.size() == 1);
    CHECK(w[0] == doctest::Approx(1.0));
}

TEST_CASE("all-zero rates degrade to uniform weights") {
    std::vector<fwd::PathEstimate> est(3);
    const auto w = fwd::split_weights(est);
    for (double x : w) CHECK(x == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("dispatch SINGLE places on the first tunnel") {
    fwd::Dispatcher d(DispatchMode::SINGLE);
    d.add_tunnel(0);
    d.add_tunnel(1);
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        const auto p = d.dispatch(pdu_with_seq(i), rng);
        REQUIRE(p.size() == 1);
        CHECK(p[0] == 0);
    }
}

TEST_CASE("dispatch DUPLICATE places on every tunnel with the same sn") {
    fwd::Dispatcher d(DispatchMode::DUPLICATE);
    d.add_tunnel(0);
    d.add_tunnel(1);
    Rng rng(2);
    const auto p = d.dispatch(pdu_with_seq(7), rng);
    CHECK(p == std::vector<std::size_t>{0, 1});
}

TEST_CASE("dispatch SPLIT with degenerate weights uses one tunnel only") {
    fwd::Dispatcher d(DispatchMode::SPLIT);
    d.add_tunnel(0);
    d.add_tunnel(1);
    d.tunnels()[0].estimate.ewma_rate_bps = 1e6;
    d.tunnels()[1].estimate.ewma_rate_bps = 0.0;
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const auto p = d.dispatch(pdu_with_seq(i), rng);
        REQUIRE(p.size() == 1);
        CHECK(p[0] == 0);
    }
}

TEST_CASE("dispatch SPLIT shares match the weights within 1%") {
    // Multinomial oracle: equal weights over 1e5 pdus -> share 0.5 +- 0.01.
    fwd::Dispatcher d(DispatchMode::SPLIT);
    d.add_tunnel(0);
    d.add_tunnel(1);
    Rng rng(2024);
    const int n = 100000;
    int first = 0;
    for (int i = 0; i < n; ++i) {
        const auto p = d.dispatch(pdu_with_seq(i), rng);
        if (p[0] == 0) ++first;
    }
    CHECK(std::abs(static_cast<double>(first) / n - 0.5) <= 0.01);
}

TEST_CASE("dispatch conservation: 1 placement for SINGLE/SPLIT, all for DUPLICATE") {
    Rng rng(17);
    for (auto mode : {DispatchMode::SINGLE, DispatchMode::SPLIT, DispatchMode::DUPLICATE}) {
        fwd::Dispatcher d(mode);
        const int tunnels = 3;
        for (int i = 0; i < tunnels; ++i) d.add_tunnel(static_cast<std::uint32_t>(i));
        for (int i = 0; i < 500; ++i) {
            const auto p = d.dispatch(pdu_with_seq(i), rng);
            if (mode == DispatchMode::DUPLICATE) {
                CHECK(p.size() == tunnels);
            } else {
                CHECK(p.size() == 1);
            }
        }
    }
}

TEST_CASE("no active tunnel holds pdus in a bounded queue") {
    fwd::Dispatcher d(DispatchMode::SINGLE);
    Rng rng(4);
    for (int i = 0; i < kDispatchHoldQueueLimit; ++i) {
        CHECK(d.dispatch(pdu_with_seq(i), rng).empty());
    }
    CHECK(d.held_size() == static_cast<std::size_t>(kDispatchHoldQueueLimit));
    CHECK(d.dispatch(pdu_with_seq(999999), rng).empty());
    CHECK(d.counters().overflow_drops == 1);
    CHECK(d.held_size() == static_cast<std::size_t>(kDispatchHoldQueueLimit));

    d.add_tunnel(0);
    const auto drained = d.take_held();
    CHECK(drained.size() == static_cast<std::size_t>(kDispatchHoldQueueLimit));
    CHECK(drained.front().seq == 0);
}

TEST_CASE("ewma converges to a constant delivery rate within 1%") {
    // Geometric-series oracle: after n samples the estimate reaches
    // R * (1 - (1-alpha)^n); 50 samples leave an error around 1e-5.
    fwd::Dispatcher d(DispatchMode::SINGLE);
    d.add_tunnel(0);
    const std::int64_t bits = 10000;
    const SimTime step = 10 * kUsPerMs;  // 1 Mb/s
    SimTime now = 0;
    for (int i = 0; i < 50; ++i) {
        now += step;
        d.confirm(0, bits, true, now, 1.0);
    }
    CHECK(d.tunnels()[0].estimate.ewma_rate_bps == doctest::Approx(1e6).epsilon(0.01));
}

TEST_CASE("all losses decay the rate toward zero monotonically") {
    fwd::Dispatcher d(DispatchMode::SINGLE);
    d.add_tunnel(0);
    SimTime now = 0;
    for (int i = 0; i < 30; ++i) {
        now += 10 * kUsPerMs;
        d.confirm(0, 10000, true, now, 1.0);
    }
    double prev = d.tunnels()[0].estimate.ewma_rate_bps;
    REQUIRE(prev > 0);
    for (int i = 0; i < 40; ++i) {
        now += 10 * kUsPerMs;
        d.confirm(0, 10000, false, now, 0.0);
        const double cur = d.tunnels()[0].estimate.ewma_rate_bps;
        CHECK(cur <= prev);
        prev = cur;
    }
    CHECK(prev < 1e3);
}

TEST_CASE("alternating delivery/loss converges to half the all-success rate") {
    // EWMA fixed-point oracle: samples alternate R,0 -> mean R/2 within 5%.
    fwd::Dispatcher d(DispatchMode::SINGLE);
    d.add_tunnel(0);
    const std::int64_t bits = 10000;
    const SimTime step = 10 * kUsPerMs;
    SimTime now = 0;
    double sum = 0.0;
    int samples = 0;
    for (int i = 0; i < 400; ++i) {
        now += step;
        d.confirm(0, bits, i % 2 == 0, now, 1.0);
        if (i >= 200) {
            sum += d.tunnels()[0].estimate.ewma_rate_bps;
            ++samples;
        }
    }
    CHECK(sum / samples == doctest::Approx(0.5e6).epsilon(0.05));
}
