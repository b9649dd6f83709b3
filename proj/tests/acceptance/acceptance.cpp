// Acceptance suite: end-to-end checks over the shipped scenarios, one
// printed PASS/FAIL line per criterion. Exit code 0 iff everything passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ranstack/cli.hpp"
#include "ranstack/engine.hpp"
#include "ranstack/mac.hpp"
#include "ranstack/pdcp.hpp"
#include "ranstack/phy.hpp"
#include "ranstack/rlc.hpp"
#include "ranstack/rrc.hpp"
#include "ranstack/scenario_io.hpp"

using namespace ranstack;

namespace {

int failures = 0;
int counter = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
    ++counter;
    std::printf("[%s] criterion %2d: %-28s %s\n", ok ? "PASS" : "FAIL", counter, name.c_str(),
                detail.c_str());
    if (!ok) ++failures;
}

std::string scenario_path(const std::string& name) {
    return std::string(RANSTACK_SCENARIO_DIR) + "/" + name;
}

ScenarioConfig load(const std::string& name) { return load_scenario(scenario_path(name)); }

double wall_seconds(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

// Long-run application goodput of one full-buffer tunnel on an ideal carrier:
// every TTI moves `alloc` bytes of which 8 per segment are RLC+MAC headers,
// with one extra segment boundary per PDCP PDU of wire size W. Application
// bytes exclude the modeled upper header that compression carries as 4 bytes.
double tunnel_app_goodput_bps(double capacity_bps, double tti_s, int sdu_bytes) {
    const double alloc = capacity_bps * tti_s / 8.0;  // bytes per TTI
    const double wire_pdu = sdu_bytes - kUpperHeaderBytes + kCompressedHeaderBytes +
                            kPdcpHeaderBytes;
    const double app_per_wire = (sdu_bytes - kUpperHeaderBytes) / wire_pdu;
    const double per_seg = kRlcSegHeaderBytes + kMacSubheaderBytes;
    const double stream = (alloc - per_seg) / (1.0 + per_seg / wire_pdu);
    return stream * app_per_wire * 8.0 / tti_s;
}

// 1: transparent-mode identity (wifi-legacy path).
void criterion_transparent_identity() {
    Rng rng(1001);
    bool ok = true;
    std::string detail;

    // 1e4 random payloads through a transparent RLC entity: exact identity,
    // zero added bytes. The same blobs through a transparent RRC entity.
    rlc::RxEntity rx(rlc::Mode::TRANSPARENT);
    rrc::RrcEntity rrc_entity(0, 0, rrc::EntityMode::TRANSPARENT, {});
    for (int i = 0; i < 10000 && ok; ++i) {
        PdcpPdu pdu;
        pdu.sn = static_cast<std::uint16_t>(i % kPdcpSnSpace);
        pdu.payload.resize(1 + rng.below(1500));
        for (auto& b : pdu.payload) b = static_cast<std::uint8_t>(rng.next_u64());

        RlcPdu t;
        t.transparent = true;
        t.sn = pdu.sn;
        t.last = true;
        t.data = pdu.payload;
        if (t.wire_bytes() != pdu.wire_bytes()) ok = false;  // zero added bytes
        const auto out = rx.on_pdu(t, 0);
        if (!out || out->payload != pdu.payload) ok = false;

        if (rrc_entity.forward_transparent(pdu.payload) != pdu.payload) ok = false;
    }
    if (!ok) detail = "entity-level byte identity broken";

    // End-to-end: the wifi-legacy run must deliver byte-identical payloads.
    const auto cfg = load("wifi-legacy.json");
    const auto report_run = engine::run(cfg, 0);
    const auto& b = report_run.bearers.at(0);
    if (b.payload_mismatches != 0 || b.delivered == 0) {
        ok = false;
        detail += " end-to-end mismatches=" + std::to_string(b.payload_mismatches);
    }
    if (detail.empty()) {
        detail = "1e4 entity + " + std::to_string(b.delivered) + " e2e payloads byte-identical";
    }
    report("transparent-mode identity", ok, detail);
}

// 2: in-sequence delivery over randomized runs with random per-path delays.
void criterion_in_sequence() {
    Rng meta(2002);
    std::int64_t violations = 0;
    std::int64_t runs = 0;
    for (const char* name : {"urc-comp.json", "xmbb-aggregation.json"}) {
        for (int i = 0; i < 50; ++i) {
            auto cfg = load(name);
            for (auto& cell : cfg.cells) {
                for (auto& car : cell.carriers) {
                    car.path_delay_us = static_cast<SimTime>(meta.below(5000));
                }
            }
            engine::RunOptions opt;
            opt.duration_ms_override = 2000.0;
            const auto r = engine::run(cfg, meta.next_u64(), opt);
            violations += r.global.in_order_violations;
            ++runs;
        }
    }
    report("in-sequence delivery", violations == 0,
           std::to_string(runs) + " randomized runs, " + std::to_string(violations) +
               " in-order violations");
}

// 3: carrier aggregation throughput, 5+3 Mb/s ideal carriers, SPLIT.
void criterion_aggregation_throughput() {
    const auto cfg = load("xmbb-aggregation.json");
    MetricsReport r;
    const double wall = wall_seconds([&] { r = engine::run(cfg, 0); });
    const auto& b = r.bearers.at(0);
    const double expected = tunnel_app_goodput_bps(5e6, 1e-3, cfg.mtu_bytes) +
                            tunnel_app_goodput_bps(3e6, 1e-3, cfg.mtu_bytes);
    const double rel = std::abs(b.throughput_bps - expected) / expected;
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "goodput %.3f Mb/s vs oracle %.3f Mb/s (%.2f%%), dispatch %s, wall %.1fs",
                  b.throughput_bps / 1e6, expected / 1e6, rel * 100.0, b.dispatch.c_str(), wall);
    report("carrier aggregation", rel <= 0.02 && b.dispatch == "SPLIT" && wall < 10.0, detail);
}

// 4: CoMP reliability with two legs at loss 0.1, HARQ off, DUPLICATE.
void criterion_comp_reliability() {
    const auto cfg = load("urc-comp.json");
    const auto r = engine::run(cfg, 0);
    const auto& b = r.bearers.at(0);
    const double n = static_cast<double>(b.offered);
    const double expected_delivery = 1.0 - 0.1 * 0.1;
    const double expected_dup = 0.81 * n;
    const double dup_sigma = std::sqrt(n * 0.81 * 0.19);
    const bool delivery_ok = std::abs(b.delivery_ratio - expected_delivery) <= 0.005;
    const bool dup_ok =
        std::abs(static_cast<double>(b.duplicates_discarded) - expected_dup) <= 3 * dup_sigma;
    char detail[200];
    std::snprintf(detail, sizeof(detail),
                  "n=%lld delivery %.4f (want %.2f+-0.005), dup %lld (want %.0f+-%.0f), mode %s",
                  static_cast<long long>(b.offered), b.delivery_ratio, expected_delivery,
                  static_cast<long long>(b.duplicates_discarded), expected_dup, 3 * dup_sigma,
                  b.dispatch.c_str());
    report("CoMP reliability", delivery_ok && dup_ok && b.dispatch == "DUPLICATE", detail);
}

// 5: HARQ residual loss p^max_tx with p = 0.5, max_tx = 4.
void criterion_harq_residual() {
    mac::HarqBank bank;
    PhyParams params;
    SeCurve curve = {{-6.0, 0}, {0.0, 50}};
    phy::LinkState link;
    link.sinr_db = 10.0;
    link.fixed_loss_prob = 0.5;
    Rng rng(4004);
    const int blocks = 100000;
    int drops = 0;
    for (int i = 0; i < blocks; ++i) {
        auto* proc = bank.acquire();
        proc->state = mac::HarqState::WAITING_FEEDBACK;
        proc->tx_count = 1;
        while (true) {
            const bool delivered =
                phy::transmit(50, 50, link, curve, params, rng) == phy::TxOutcome::DELIVERED;
            const auto result = bank.feedback(*proc, delivered);
            if (result == mac::HarqResult::DONE) break;
            if (result == mac::HarqResult::DROP) {
                ++drops;
                break;
            }
            proc->tx_count++;
        }
    }
    const double rate = static_cast<double>(drops) / blocks;
    char detail[120];
    std::snprintf(detail, sizeof(detail), "drop rate %.4f over %d blocks (want 0.0625+-0.005)",
                  rate, blocks);
    report("HARQ residual loss", std::abs(rate - 0.0625) <= 0.005, detail);
}

// 6: scheduler exclusivity (validator rejects shared channels, exit 2) and
// strict priority (URC misses nothing in a congested mixed run).
void criterion_exclusivity_priority() {
    std::ostringstream out, err;
    const int code = cli::run(
        {"validate", "--config", std::string(RANSTACK_FIXTURE_DIR) + "/shared-channel.json"}, out,
        err);
    const bool validator_ok =
        code == 2 && err.str().find("ch-shared") != std::string::npos &&
        err.str().find("shared between schedulers") != std::string::npos;

    const auto r = engine::run(load("urc-mixed.json"), 0);
    const BearerMetrics* urc = nullptr;
    const BearerMetrics* xmbb = nullptr;
    for (const auto& b : r.bearers) {
        if (b.service == "URC") urc = &b;
        if (b.service == "XMBB") xmbb = &b;
    }
    const bool priority_ok = urc && xmbb && urc->deadline_miss_ratio == 0.0 &&
                             urc->delivered == urc->offered && xmbb->throughput_bps > 4e6;
    char detail[200];
    std::snprintf(detail, sizeof(detail),
                  "validate exit=%d, URC miss ratio %.4f (%lld/%lld), xMBB %.2f Mb/s", code,
                  urc ? urc->deadline_miss_ratio : -1.0,
                  urc ? static_cast<long long>(urc->delivered) : -1,
                  urc ? static_cast<long long>(urc->offered) : -1,
                  xmbb ? xmbb->throughput_bps / 1e6 : -1.0);
    report("exclusivity + priority", validator_ok && priority_ok, detail);
}

// 7: lossless handover on the deterministic drive-by trajectory.
void criterion_lossless_handover() {
    const auto r = engine::run(load("handover-driveby.json"), 0);
    const auto& b = r.bearers.at(0);
    const bool ok = r.global.handovers == 1 && b.lost == 0 && b.in_flight_end == 0 &&
                    b.in_order_violations == 0 && b.delivered == b.offered &&
                    r.global.audit_ok;
    char detail[200];
    std::snprintf(detail, sizeof(detail),
                  "handovers=%lld delivered %lld/%lld lost=%lld in-flight=%lld violations=%lld",
                  static_cast<long long>(r.global.handovers), static_cast<long long>(b.delivered),
                  static_cast<long long>(b.offered), static_cast<long long>(b.lost),
                  static_cast<long long>(b.in_flight_end),
                  static_cast<long long>(b.in_order_violations));
    report("lossless handover", ok, detail);
}

// 8: unlicensed band access grant rate.
void criterion_band_access() {
    CarrierCfg car;
    car.regime = BandRegime::UNLICENSED;
    car.busy_prob = 0.3;
    Rng rng(8008);
    const int ttis = 100000;
    int granted = 0;
    for (int i = 0; i < ttis; ++i) {
        if (mac::band_access(car, static_cast<SimTime>(i) * 1000, rng) == mac::Access::GRANTED) {
            ++granted;
        }
    }
    const double rate = static_cast<double>(granted) / ttis;
    char detail[120];
    std::snprintf(detail, sizeof(detail), "grant rate %.4f over %d TTIs (want 0.7+-0.01)", rate,
                  ttis);
    report("unlicensed band access", std::abs(rate - 0.7) <= 0.01, detail);
}

// 9: mMTC scale, 1e4 UEs over 60 s simulated in bounded wall-clock time.
void criterion_mmtc_scale() {
    const auto cfg = load("mmtc-scale.json");
    MetricsReport r;
    const double wall = wall_seconds([&] { r = engine::run(cfg, 0); });
    const double delivery = r.global.offered > 0 ? static_cast<double>(r.global.delivered) /
                                                       static_cast<double>(r.global.offered)
                                                 : 0.0;
    char detail[160];
    std::snprintf(detail, sizeof(detail), "%zu ues, offered %lld, delivery %.4f, wall %.1fs",
                  r.ues.size(), static_cast<long long>(r.global.offered), delivery, wall);
    report("mMTC scale", r.ues.size() == 10000 && delivery >= 0.99 && wall < 120.0, detail);
}

// 10: byte-identical report files for repeated seeds on every scenario.
void criterion_determinism() {
    namespace fs = std::filesystem;
    const auto tmp = fs::temp_directory_path() / "ranstack-determinism";
    fs::create_directories(tmp);
    bool ok = true;
    std::string first_diff;
    const char* names[] = {"xmbb-aggregation.json", "urc-comp.json",      "mmtc-scale.json",
                           "wifi-legacy.json",      "urc-mixed.json",     "handover-driveby.json",
                           "qos-escalation.json"};
    for (const auto* name : names) {
        for (std::uint64_t seed = 0; seed <= 2 && ok; ++seed) {
            std::array<std::string, 2> outputs;
            for (int rep = 0; rep < 2; ++rep) {
                const auto path =
                    (tmp / (std::string(name) + "." + std::to_string(seed) + "." +
                            std::to_string(rep) + ".json"))
                        .string();
                std::ostringstream out, err;
                const int code = cli::run({"run", "--config", scenario_path(name), "--seed",
                                           std::to_string(seed), "--out", path},
                                          out, err);
                if (code != 0) {
                    ok = false;
                    first_diff = std::string(name) + " exit " + std::to_string(code) + ": " +
                                 err.str();
                    break;
                }
                std::ifstream f(path, std::ios::binary);
                std::ostringstream buf;
                buf << f.rdbuf();
                outputs[static_cast<std::size_t>(rep)] = buf.str();
            }
            if (ok && (outputs[0].empty() || outputs[0] != outputs[1])) {
                ok = false;
                first_diff = std::string(name) + " seed " + std::to_string(seed);
            }
        }
        if (!ok) break;
    }
    report("determinism", ok,
           ok ? "7 scenarios x seeds {0,1,2} x 2 runs byte-identical" : "mismatch: " + first_diff);
}

// 11: QoS escalation SINGLE -> SPLIT with post-escalation rate at target.
void criterion_qos_escalation() {
    const auto cfg = load("qos-escalation.json");
    std::ostringstream rrm_trace;
    engine::RunOptions opt;
    opt.trace.rrm = &rrm_trace;
    const auto r = engine::run(cfg, 0, opt);
    const auto& b = r.bearers.at(0);

    int escalations = 0;
    {
        std::istringstream lines(rrm_trace.str());
        std::string line;
        while (std::getline(lines, line)) {
            if (line.find("escalate") != std::string::npos) ++escalations;
        }
    }

    bool ok = escalations == 1 && b.reconfigs.size() == 1 && b.reconfigs[0].from == "SINGLE" &&
              b.reconfigs[0].to == "SPLIT";
    double post_rate = 0.0;
    if (ok) {
        const auto& rec = b.reconfigs[0];
        const double post_bits =
            static_cast<double>(b.delivered_app_bytes - rec.delivered_app_bytes_at) * 8.0;
        const double post_seconds = (r.duration_ms - rec.time_ms) / 1000.0;
        post_rate = post_bits / post_seconds;
        const double target = cfg.bearers[0].qos.target_rate_bps;
        ok = post_rate >= 0.95 * target;
    }
    char detail[200];
    std::snprintf(detail, sizeof(detail),
                  "escalations=%d (%s->%s), post-escalation %.3f Mb/s vs target %.1f Mb/s",
                  escalations, b.reconfigs.empty() ? "?" : b.reconfigs[0].from.c_str(),
                  b.reconfigs.empty() ? "?" : b.reconfigs[0].to.c_str(), post_rate / 1e6,
                  cfg.bearers[0].qos.target_rate_bps / 1e6);
    report("QoS escalation", ok, detail);
}

}  // namespace

int main() {
    try {
        criterion_transparent_identity();
        criterion_in_sequence();
        criterion_aggregation_throughput();
        criterion_comp_reliability();
        criterion_harq_residual();
        criterion_exclusivity_priority();
        criterion_lossless_handover();
        criterion_band_access();
        criterion_mmtc_scale();
        criterion_determinism();
        criterion_qos_escalation();
    } catch (const std::exception& e) {
        std::printf("[FAIL] acceptance aborted: %s\n", e.what());
        return 1;
    }
    std::printf("%d/%d criteria passed\n", counter - failures, counter);
    return failures == 0 ? 0 : 1;
}
