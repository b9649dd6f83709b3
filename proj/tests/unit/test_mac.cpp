#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ranstack/mac.hpp"

using namespace ranstack;

TEST_CASE("band access: licensed always grants") {
    CarrierCfg car;
    car.regime = BandRegime::LICENSED;
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        CHECK(mac::band_access(car, i * 1000, rng) == mac::Access::GRANTED);
    }
}

TEST_CASE("band access: lightly licensed defers inside incumbent windows") {
    CarrierCfg car;
    car.regime = BandRegime::LIGHTLY_LICENSED;
    car.incumbent_windows = {{10.0, 20.0}, {50.0, 60.0}};
    Rng rng(1);
    CHECK(mac::band_access(car, ms_to_us(5), rng) == mac::Access::GRANTED);
    CHECK(mac::band_access(car, ms_to_us(10), rng) == mac::Access::DEFERRED);
    CHECK(mac::band_access(car, ms_to_us(19.999), rng) == mac::Access::DEFERRED);
    CHECK(mac::band_access(car, ms_to_us(20), rng) == mac::Access::GRANTED);
    CHECK(mac::band_access(car, ms_to_us(55), rng) == mac::Access::DEFERRED);
    CHECK(mac::band_access(car, ms_to_us(70), rng) == mac::Access::GRANTED);
}

TEST_CASE("band access: unlicensed busy_prob=1 always defers") {
    CarrierCfg car;
    car.regime = BandRegime::UNLICENSED;
    car.busy_prob = 1.0;
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        CHECK(mac::band_access(car, i * 1000, rng) == mac::Access::DEFERRED);
    }
}

TEST_CASE("band access: unlicensed grant rate matches 1 - busy_prob") {
    // Bernoulli oracle: busy 0.3 -> grants 0.7 +- 0.01 over 1e5 TTIs.
    CarrierCfg car;
    car.regime = BandRegime::UNLICENSED;
    car.busy_prob = 0.3;
    Rng rng(2024);
    const int ttis = 100000;
    int granted = 0;
    for (int i = 0; i < ttis; ++i) {
        if (mac::band_access(car, i * 1000, rng) == mac::Access::GRANTED) ++granted;
    }
    CHECK(std::abs(static_cast<double>(granted) / ttis - 0.7) <= 0.01);
}

TEST_CASE("scheduler: equal-priority equal-backlog splits capacity evenly") {
    // Capacity 3000 bits = 60 RU at 50 bits/RU; three saturated channels.
    mac::RrCursors cursors;
    std::vector<mac::SchedChannel> chans = {
        {0, 5, 100000, 50}, {1, 5, 100000, 50}, {2, 5, 100000, 50}};
    const auto allocs = mac::schedule_tti(60, chans, cursors);
    REQUIRE(allocs.size() == 3);
    for (const auto& a : allocs) {
        CHECK(a.ru == 20);
        CHECK(a.bytes * 8 == 1000);
    }
}

TEST_CASE("scheduler: strict priority serves urgent channels first") {
    // URC 200 pending bits; saturated xMBB; capacity 3000 bits (60 RU @ 50).
    mac::RrCursors cursors;
    std::vector<mac::SchedChannel> chans = {
        {0, 1, 25, 50},       // URC: 25 bytes = 200 bits
        {1, 5, 1000000, 50},  // xMBB saturated
    };
    const auto allocs = mac::schedule_tti(60, chans, cursors);
    REQUIRE(allocs.size() == 2);
    CHECK(allocs[0].channel == 0);
    CHECK(allocs[0].bytes * 8 == 200);
    CHECK(allocs[1].channel == 1);
    CHECK(allocs[1].bytes * 8 == 2800);
}

TEST_CASE("scheduler: empty queues produce an empty allocation list") {
    mac::RrCursors cursors;
    std::vector<mac::SchedChannel> chans = {{0, 5, 0, 50}, {1, 5, 0, 50}};
    CHECK(mac::schedule_tti(60, chans, cursors).empty());
}

TEST_CASE("scheduler: channels below the lowest se step are unschedulable") {
    mac::RrCursors cursors;
    std::vector<mac::SchedChannel> chans = {{0, 5, 1000, 0}};
    CHECK(mac::schedule_tti(60, chans, cursors).empty());
}

TEST_CASE("scheduler: allocation never exceeds capacity or backlog") {
    Rng rng(31);
    mac::RrCursors cursors;
    for (int trial = 0; trial < 300; ++trial) {
        const int ru_total = 1 + static_cast<int>(rng.below(200));
        std::vector<mac::SchedChannel> chans;
        const int n = 1 + static_cast<int>(rng.below(6));
        for (int i = 0; i < n; ++i) {
            chans.push_back({static_cast<std::uint32_t>(i), static_cast<int>(rng.below(3)),
                             static_cast<std::int64_t>(rng.below(4000)),
                             static_cast<int>(rng.below(3)) * 25});
        }
        const auto allocs = mac::schedule_tti(ru_total, chans, cursors);
        int ru_sum = 0;
        for (const auto& a : allocs) {
            ru_sum += a.ru;
            const auto& ch = chans[a.channel];
            CHECK(a.bytes <= ch.pending_bytes);
            CHECK(a.bytes * 8 <= static_cast<std::int64_t>(a.ru) * ch.se_bits_per_ru);
        }
        CHECK(ru_sum <= ru_total);
    }
}

TEST_CASE("scheduler: round-robin pointer rotates starvation away") {
    // One RU per TTI, three channels each wanting one RU: service must cycle.
    mac::RrCursors cursors;
    std::vector<std::uint32_t> served;
    for (int tti = 0; tti < 6; ++tti) {
        std::vector<mac::SchedChannel> chans = {
            {0, 5, 6, 50}, {1, 5, 6, 50}, {2, 5, 6, 50}};  // 6 bytes -> 1 RU each
        const auto allocs = mac::schedule_tti(1, chans, cursors);
        REQUIRE(allocs.size() == 1);
        served.push_back(allocs[0].channel);
    }
    CHECK(served == std::vector<std::uint32_t>{0, 1, 2, 0, 1, 2});
}

TEST_CASE("harq: delivery on first transmission completes the process") {
    mac::HarqBank bank;
    auto* proc = bank.acquire();
    REQUIRE(proc != nullptr);
    proc->tx_count = 1;
    proc->state = mac::HarqState::WAITING_FEEDBACK;
    CHECK(bank.feedback(*proc, true) == mac::HarqResult::DONE);
    CHECK(proc->state == mac::HarqState::IDLE);
    CHECK(bank.in_flight() == 0);
}

TEST_CASE("harq: loss retransmits until max_tx then drops") {
    mac::HarqBank bank;
    auto* proc = bank.acquire();
    proc->tx_count = 1;
    proc->state = mac::HarqState::WAITING_FEEDBACK;
    CHECK(bank.feedback(*proc, false) == mac::HarqResult::RETRANSMIT);
    proc->tx_count = 2;
    CHECK(bank.feedback(*proc, false) == mac::HarqResult::RETRANSMIT);
    proc->tx_count = 3;
    CHECK(bank.feedback(*proc, false) == mac::HarqResult::RETRANSMIT);
    proc->tx_count = 4;
    CHECK(bank.feedback(*proc, false) == mac::HarqResult::DROP);
    CHECK(proc->state == mac::HarqState::IDLE);
}

TEST_CASE("harq: feedback for an idle process is a protocol bug") {
    mac::HarqBank bank;
    auto& proc = bank.process(0);
    CHECK_THROWS_AS(bank.feedback(proc, true), ProtocolError);
}

TEST_CASE("harq: residual drop rate converges to p^max_tx") {
    // p = 0.5, max_tx = 4 -> 0.0625 expected over 1e5 transport blocks.
    mac::HarqBank bank;
    Rng rng(555);
    const int blocks = 100000;
    int drops = 0;
    for (int i = 0; i < blocks; ++i) {
        auto* proc = bank.acquire();
        REQUIRE(proc != nullptr);
        proc->state = mac::HarqState::WAITING_FEEDBACK;
        proc->tx_count = 1;
        while (true) {
            const bool delivered = !rng.bernoulli(0.5);
            const auto result = bank.feedback(*proc, delivered);
            if (result == mac::HarqResult::DONE) break;
            if (result == mac::HarqResult::DROP) {
                ++drops;
                break;
            }
            proc->tx_count++;
        }
    }
    CHECK(std::abs(static_cast<double>(drops) / blocks - 0.0625) <= 0.005);
}

namespace {

RlcPdu make_pdu(std::uint32_t bearer, std::uint16_t sn, std::size_t len) {
    RlcPdu pdu;
    pdu.transparent = true;
    pdu.sn = sn;
    pdu.last = true;
    pdu.bearer = bearer;
    pdu.data.assign(len, static_cast<std::uint8_t>(sn & 0xff));
    return pdu;
}

}  // namespace

TEST_CASE("mux/demux: single channel round-trip") {
    std::vector<MacSubPdu> subs = {{7, make_pdu(1, 3, 100)}};
    const auto tb = mac::mux(1, 0, 0, subs, 10);
    const auto out = mac::demux(tb);
    REQUIRE(out.has_value());
    REQUIRE(out->size() == 1);
    CHECK((*out)[0].channel == 7);
    CHECK((*out)[0].rlc.data == subs[0].rlc.data);
}

TEST_CASE("mux/demux: interleaved channels keep per-channel order") {
    std::vector<MacSubPdu> subs;
    for (int i = 0; i < 20; ++i) {
        subs.push_back({static_cast<std::uint32_t>(i % 3), make_pdu(1, static_cast<std::uint16_t>(i), 40)});
    }
    const auto tb = mac::mux(2, 0, 0, subs, 10);
    const auto out = mac::demux(tb);
    REQUIRE(out.has_value());
    std::map<std::uint32_t, std::vector<std::uint16_t>> got, want;
    for (const auto& sp : *out) got[sp.channel].push_back(sp.rlc.sn);
    for (const auto& sp : subs) want[sp.channel].push_back(sp.rlc.sn);
    CHECK(got == want);
}

TEST_CASE("mux/demux: random round-trip property") {
    Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<MacSubPdu> subs;
        const int n = static_cast<int>(rng.below(12));
        for (int i = 0; i < n; ++i) {
            subs.push_back({static_cast<std::uint32_t>(rng.below(4)),
                            make_pdu(0, static_cast<std::uint16_t>(rng.below(4096)),
                                     1 + rng.below(500))});
        }
        const auto tb = mac::mux(trial, 0, 0, subs, 1);
        const auto out = mac::demux(tb);
        REQUIRE(out.has_value());
        REQUIRE(out->size() == subs.size());
        for (std::size_t i = 0; i < subs.size(); ++i) {
            CHECK((*out)[i].channel == subs[i].channel);
            CHECK((*out)[i].rlc.sn == subs[i].rlc.sn);
            CHECK((*out)[i].rlc.data == subs[i].rlc.data);
        }
    }
}

TEST_CASE("demux: malformed block is discarded") {
    std::vector<MacSubPdu> subs = {{1, make_pdu(0, 9, 64)}};
    auto tb = mac::mux(3, 0, 0, subs, 10);
    tb.declared_bytes -= 1;  // corrupt the announced size
    CHECK_FALSE(mac::demux(tb).has_value());
}

TEST_CASE("mux: empty allocation emits no block payload") {
    const auto tb = mac::mux(4, 0, 0, {}, 0);
    CHECK(tb.subpdus.empty());
    CHECK(tb.wire_bytes() == 0);
}
