#include "ranstack/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace ranstack {

const char* to_string(RatKind v) {
    switch (v) {
        case RatKind::LTE_LIKE: return "LTE_LIKE";
        case RatKind::WIFI_LIKE: return "WIFI_LIKE";
        case RatKind::FBMC_LIKE: return "FBMC_LIKE";
    }
    return "?";
}

const char* to_string(BandRegime v) {
    switch (v) {
        case BandRegime::LICENSED: return "LICENSED";
        case BandRegime::LIGHTLY_LICENSED: return "LIGHTLY_LICENSED";
        case BandRegime::UNLICENSED: return "UNLICENSED";
    }
    return "?";
}

const char* to_string(ServiceRole v) {
    switch (v) {
        case ServiceRole::XMBB: return "XMBB";
        case ServiceRole::MMTC: return "MMTC";
        case ServiceRole::URC: return "URC";
        case ServiceRole::ANY: return "ANY";
    }
    return "?";
}

const char* to_string(ServiceType v) {
    switch (v) {
        case ServiceType::XMBB: return "XMBB";
        case ServiceType::MMTC: return "MMTC";
        case ServiceType::URC: return "URC";
    }
    return "?";
}

const char* to_string(DispatchMode v) {
    switch (v) {
        case DispatchMode::AUTO: return "AUTO";
        case DispatchMode::SINGLE: return "SINGLE";
        case DispatchMode::SPLIT: return "SPLIT";
        case DispatchMode::DUPLICATE: return "DUPLICATE";
    }
    return "?";
}

const char* to_string(GroupPurpose v) {
    switch (v) {
        case GroupPurpose::AGGREGATION: return "AGGREGATION";
        case GroupPurpose::COMP: return "COMP";
    }
    return "?";
}

const char* to_string(BandClass v) {
    switch (v) {
        case BandClass::LOW: return "LOW";
        case BandClass::MID: return "MID";
        case BandClass::HIGH: return "HIGH";
    }
    return "?";
}

const char* to_string(AttachPolicy v) {
    switch (v) {
        case AttachPolicy::ON_DISCOVERY: return "on_discovery";
        case AttachPolicy::ON_DEMAND: return "on_demand";
    }
    return "?";
}

const char* to_string(TrafficKind v) {
    switch (v) {
        case TrafficKind::FULL_BUFFER: return "FULL_BUFFER";
        case TrafficKind::POISSON_FILES: return "POISSON_FILES";
        case TrafficKind::POISSON_PACKETS: return "POISSON_PACKETS";
        case TrafficKind::PERIODIC: return "PERIODIC";
    }
    return "?";
}

SeCurve default_se_curve() {
    return {
        {-6.0, 0}, {-3.0, 20}, {0.0, 40}, {3.0, 60},
        {9.0, 120}, {15.0, 200}, {21.0, 300},
    };
}

BandClass freq_band_class(double center_freq_mhz) {
    if (center_freq_mhz < 1000.0) return BandClass::LOW;
    if (center_freq_mhz <= 6000.0) return BandClass::MID;
    return BandClass::HIGH;
}

namespace {

class Checker {
public:
    void fail(const std::string& path, const std::string& message) {
        result_.violations.push_back({path, message});
    }

    ValidationResult take() { return std::move(result_); }

private:
    ValidationResult result_;
};

std::string idx_path(const char* group, std::size_t i, const std::string& id) {
    std::ostringstream os;
    os << group << "[" << i << "]";
    if (!id.empty()) os << "(" << id << ")";
    return os.str();
}

}  // namespace

ValidationResult validate_scenario(const ScenarioConfig& config) {
    Checker c;

    if (config.duration_ms <= 0) c.fail("duration_ms", "duration must be positive");
    if (config.mtu_bytes < 64) c.fail("mtu_bytes", "mtu must be at least 64 bytes");

    std::set<std::string> rat_ids;
    for (std::size_t i = 0; i < config.rats.size(); ++i) {
        const auto& rat = config.rats[i];
        const std::string path = idx_path("rats", i, rat.id);
        if (rat.id.empty()) c.fail(path, "rat id must be non-empty");
        if (!rat_ids.insert(rat.id).second) c.fail(path, "duplicate rat id");
        if (rat.tti_us <= 0) c.fail(path + ".tti_us", "tti must be positive");
        if (rat.resource_units_per_mhz <= 0)
            c.fail(path + ".resource_units_per_mhz", "resource units per TTI must be positive");
        if (rat.kind == RatKind::WIFI_LIKE && rat.has_rlc)
            c.fail(path + ".has_rlc", "WIFI_LIKE rat must have has_rlc=false (RLC runs transparent)");
        const auto& se = rat.se_curve;
        if (se.empty()) {
            c.fail(path + ".se_curve", "se_curve must be non-empty");
        } else {
            if (se.front().bits_per_ru != 0)
                c.fail(path + ".se_curve[0]", "lowest se_curve step must map to 0 bits");
            for (std::size_t k = 1; k < se.size(); ++k) {
                if (se[k].sinr_db <= se[k - 1].sinr_db)
                    c.fail(path + ".se_curve[" + std::to_string(k) + "]",
                           "se_curve thresholds must be strictly increasing");
                if (se[k].bits_per_ru < se[k - 1].bits_per_ru)
                    c.fail(path + ".se_curve[" + std::to_string(k) + "]",
                           "se_curve must be non-decreasing in SINR");
            }
            for (std::size_t k = 0; k < se.size(); ++k) {
                if (se[k].bits_per_ru < 0)
                    c.fail(path + ".se_curve[" + std::to_string(k) + "]", "bits per RU must be >= 0");
            }
        }
    }

    std::set<std::string> cell_ids;
    for (std::size_t i = 0; i < config.cells.size(); ++i) {
        const auto& cell = config.cells[i];
        const std::string path = idx_path("cells", i, cell.id);
        if (cell.id.empty()) c.fail(path, "cell id must be non-empty");
        if (!cell_ids.insert(cell.id).second) c.fail(path, "duplicate cell id");
        std::set<std::string> carrier_ids;
        for (std::size_t k = 0; k < cell.carriers.size(); ++k) {
            const auto& car = cell.carriers[k];
            const std::string cpath = path + "." + idx_path("carriers", k, car.id);
            if (!carrier_ids.insert(car.id).second)
                c.fail(cpath, "carrier ids must be unique within a cell");
            if (car.center_freq_mhz <= 0) c.fail(cpath + ".center_freq_mhz", "frequency must be positive");
            if (car.bandwidth_mhz <= 0) c.fail(cpath + ".bandwidth_mhz", "bandwidth must be positive");
            if (car.busy_prob < 0 || car.busy_prob > 1)
                c.fail(cpath + ".busy_prob", "busy_prob must lie in [0,1]");
            if (car.regime == BandRegime::LICENSED && car.busy_prob != 0)
                c.fail(cpath + ".busy_prob", "licensed carriers must have busy_prob = 0");
            if (!rat_ids.count(car.rat)) c.fail(cpath + ".rat", "unknown rat '" + car.rat + "'");
            if (car.fixed_loss_prob && (*car.fixed_loss_prob < 0 || *car.fixed_loss_prob > 1))
                c.fail(cpath + ".fixed_loss_prob", "loss probability must lie in [0,1]");
            if (car.path_delay_us < 0) c.fail(cpath + ".path_delay_us", "path delay must be >= 0");
            if (!car.incumbent_windows.empty() && car.regime != BandRegime::LIGHTLY_LICENSED)
                c.fail(cpath + ".incumbent_windows",
                       "incumbent windows apply to LIGHTLY_LICENSED carriers only");
            for (std::size_t w = 0; w < car.incumbent_windows.size(); ++w) {
                const auto& win = car.incumbent_windows[w];
                if (win.end_ms < win.start_ms)
                    c.fail(cpath + ".incumbent_windows[" + std::to_string(w) + "]",
                           "window end before start");
            }
        }
    }

    std::set<std::string> ue_ids;
    for (std::size_t i = 0; i < config.ues.size(); ++i) {
        const auto& ue = config.ues[i];
        const std::string path = idx_path("ues", i, ue.id);
        if (ue.id.empty()) c.fail(path, "ue id must be non-empty");
        if (!ue_ids.insert(ue.id).second) c.fail(path, "duplicate ue id");
        if (ue.count < 1) c.fail(path + ".count", "count must be >= 1");
        if (!ue.position && !ue.placement)
            c.fail(path, "ue needs a position or a placement");
        if (ue.placement && ue.placement->radius_m <= 0)
            c.fail(path + ".placement.radius_m", "placement radius must be positive");
        if (ue.rats.empty()) c.fail(path + ".rats", "ue must support at least one rat");
        for (const auto& r : ue.rats) {
            if (!rat_ids.count(r)) c.fail(path + ".rats", "unknown rat '" + r + "'");
        }
        if (ue.freq_min_mhz <= 0 || ue.freq_max_mhz <= ue.freq_min_mhz)
            c.fail(path + ".freq_range", "frequency range must satisfy 0 < min < max");
        if (ue.initial_state == RrcState::CONNECTED && ue.serving_cells.empty())
            c.fail(path + ".serving_cells", "CONNECTED ue must list serving cells");
        if (ue.initial_state == RrcState::IDLE && !ue.serving_cells.empty())
            c.fail(path + ".serving_cells", "IDLE ue must have no serving cells");
        for (const auto& s : ue.serving_cells) {
            if (!cell_ids.count(s)) c.fail(path + ".serving_cells", "unknown cell '" + s + "'");
        }
        if (ue.initial_state == RrcState::CONNECTED && ue.count != 1)
            c.fail(path, "pre-connected ue specs cannot be bulk-expanded");
        if (ue.release_at_ms && *ue.release_at_ms <= 0)
            c.fail(path + ".release_at_ms", "must be positive");
    }

    // Explicit tunnels pin concrete channel names, which cannot be expanded.
    for (std::size_t i = 0; i < config.bearers.size(); ++i) {
        const auto& b = config.bearers[i];
        if (b.tunnels.empty()) continue;
        const auto ue_it = std::find_if(config.ues.begin(), config.ues.end(),
                                        [&](const UeCfg& u) { return u.id == b.ue; });
        if (ue_it != config.ues.end() && ue_it->count > 1)
            c.fail(idx_path("bearers", i, b.id) + ".tunnels",
                   "explicit tunnels cannot be used with bulk-expanded ues");
    }

    // QoS priority discipline: URC profiles must be strictly more urgent than
    // every non-URC profile in the scenario.
    int min_other = std::numeric_limits<int>::max();
    int max_urc = std::numeric_limits<int>::min();
    bool any_urc = false, any_other = false;
    for (const auto& b : config.bearers) {
        if (b.qos.service_type == ServiceType::URC) {
            any_urc = true;
            max_urc = std::max(max_urc, b.qos.priority);
        } else {
            any_other = true;
            min_other = std::min(min_other, b.qos.priority);
        }
    }
    if (any_urc && any_other && max_urc >= min_other)
        c.fail("bearers", "URC bearers must have strictly lower priority numbers than all others");

    std::set<std::string> bearer_ids;
    // channel id -> (cell, rat) scheduler binding; a channel under two
    // different bindings is the shared-scheduler violation.
    std::map<std::string, std::pair<std::string, std::string>> channel_binding;
    for (std::size_t i = 0; i < config.bearers.size(); ++i) {
        const auto& b = config.bearers[i];
        const std::string path = idx_path("bearers", i, b.id);
        if (b.id.empty()) c.fail(path, "bearer id must be non-empty");
        if (!bearer_ids.insert(b.id).second) c.fail(path, "duplicate bearer id");
        if (!ue_ids.count(b.ue)) c.fail(path + ".ue", "unknown ue '" + b.ue + "'");
        if (b.qos.reliability_target <= 0 || b.qos.reliability_target > 1)
            c.fail(path + ".qos.reliability_target", "reliability target must lie in (0,1]");
        if (b.qos.latency_budget_ms <= 0)
            c.fail(path + ".qos.latency_budget_ms", "latency budget must be positive");
        if (b.qos.target_rate_bps < 0)
            c.fail(path + ".qos.target_rate_bps", "target rate must be >= 0");

        if (!b.tunnels.empty()) {
            if ((b.dispatch == DispatchMode::SPLIT || b.dispatch == DispatchMode::DUPLICATE) &&
                b.tunnels.size() < 2)
                c.fail(path + ".tunnels", "SPLIT and DUPLICATE dispatch require at least 2 tunnels");
            for (std::size_t t = 0; t < b.tunnels.size(); ++t) {
                const auto& tun = b.tunnels[t];
                const std::string tpath = path + ".tunnels[" + std::to_string(t) + "]";
                const auto cell_it = std::find_if(config.cells.begin(), config.cells.end(),
                                                  [&](const CellCfg& cc) { return cc.id == tun.cell; });
                if (cell_it == config.cells.end()) {
                    c.fail(tpath + ".cell", "unknown cell '" + tun.cell + "'");
                } else {
                    const bool hosts = std::any_of(
                        cell_it->carriers.begin(), cell_it->carriers.end(),
                        [&](const CarrierCfg& car) { return car.rat == tun.rat; });
                    if (!hosts)
                        c.fail(tpath + ".rat", "cell '" + tun.cell + "' hosts no carrier of rat '" +
                                                   tun.rat + "'");
                }
                if (tun.channel.empty()) {
                    c.fail(tpath + ".channel", "channel id must be non-empty");
                } else {
                    const auto binding = std::make_pair(tun.cell, tun.rat);
                    auto [it, inserted] = channel_binding.emplace(tun.channel, binding);
                    if (!inserted && it->second != binding)
                        c.fail(tpath + ".channel",
                               "channel '" + tun.channel + "' shared between schedulers (" +
                                   it->second.first + "/" + it->second.second + " and " + tun.cell +
                                   "/" + tun.rat + ")");
                }
            }
        } else if (b.dispatch == DispatchMode::SPLIT || b.dispatch == DispatchMode::DUPLICATE) {
            // Planned at runtime; RRM needs at least two cells to satisfy it.
            if (config.cells.size() < 2)
                c.fail(path + ".dispatch", "SPLIT/DUPLICATE dispatch needs at least 2 cells");
        }
    }

    std::set<std::string> group_ids;
    std::set<std::string> grouped_cells;
    for (std::size_t i = 0; i < config.cell_groups.size(); ++i) {
        const auto& g = config.cell_groups[i];
        const std::string path = idx_path("cell_groups", i, g.id);
        if (!group_ids.insert(g.id).second) c.fail(path, "duplicate group id");
        if (g.cells.size() < 2) c.fail(path + ".cells", "a cell group needs at least 2 member cells");
        for (const auto& cid : g.cells) {
            if (!cell_ids.count(cid)) c.fail(path + ".cells", "unknown cell '" + cid + "'");
            if (!grouped_cells.insert(cid).second)
                c.fail(path + ".cells", "cell '" + cid + "' belongs to more than one group");
        }
    }

    std::set<std::string> traffic_bearers;
    for (std::size_t i = 0; i < config.traffic.size(); ++i) {
        const auto& t = config.traffic[i];
        const std::string path = idx_path("traffic", i, t.bearer);
        if (!bearer_ids.count(t.bearer)) c.fail(path + ".bearer", "unknown bearer '" + t.bearer + "'");
        if (!traffic_bearers.insert(t.bearer).second)
            c.fail(path + ".bearer", "bearer has more than one traffic model");
        switch (t.kind) {
            case TrafficKind::FULL_BUFFER:
                break;
            case TrafficKind::POISSON_FILES:
                if (t.mean_file_bytes <= 0) c.fail(path + ".mean_file_bytes", "must be positive");
                if (t.files_per_s <= 0) c.fail(path + ".files_per_s", "must be positive");
                break;
            case TrafficKind::POISSON_PACKETS:
                if (t.packets_per_s <= 0) c.fail(path + ".packets_per_s", "must be positive");
                if (t.size_bytes <= 0) c.fail(path + ".size_bytes", "must be positive");
                break;
            case TrafficKind::PERIODIC:
                if (t.period_ms <= 0) c.fail(path + ".period_ms", "must be positive");
                if (t.size_bytes <= 0) c.fail(path + ".size_bytes", "must be positive");
                break;
        }
        if (t.start_ms < 0) c.fail(path + ".start_ms", "must be >= 0");
        if (t.stop_ms && *t.stop_ms <= t.start_ms) c.fail(path + ".stop_ms", "must be after start");
    }

    if (config.measurement) {
        const auto& m = *config.measurement;
        if (m.period_ms <= 0) c.fail("measurement.period_ms", "must be positive");
        if (m.a3_offset_db < 0) c.fail("measurement.a3_offset_db", "must be >= 0");
        if (m.time_to_trigger_ms < 0) c.fail("measurement.time_to_trigger_ms", "must be >= 0");
    }

    return c.take();
}

}  // namespace ranstack
