#include "ranstack/scenario_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ranstack/params.hpp"
#include "ranstack/rng.hpp"

namespace ranstack {

using nlohmann::json;

namespace {

template <typename E>
E enum_from(const json& j, const char* what, std::initializer_list<std::pair<const char*, E>> table) {
    const auto s = j.get<std::string>();
    for (const auto& [name, value] : table) {
        if (s == name) return value;
    }
    throw std::runtime_error(std::string("invalid ") + what + " '" + s + "'");
}

RatKind rat_kind_from(const json& j) {
    return enum_from<RatKind>(j, "rat kind",
                              {{"LTE_LIKE", RatKind::LTE_LIKE},
                               {"WIFI_LIKE", RatKind::WIFI_LIKE},
                               {"FBMC_LIKE", RatKind::FBMC_LIKE}});
}

BandRegime regime_from(const json& j) {
    return enum_from<BandRegime>(j, "regime",
                                 {{"LICENSED", BandRegime::LICENSED},
                                  {"LIGHTLY_LICENSED", BandRegime::LIGHTLY_LICENSED},
                                  {"UNLICENSED", BandRegime::UNLICENSED}});
}

ServiceRole role_from(const json& j) {
    return enum_from<ServiceRole>(j, "service role",
                                  {{"XMBB", ServiceRole::XMBB},
                                   {"MMTC", ServiceRole::MMTC},
                                   {"URC", ServiceRole::URC},
                                   {"ANY", ServiceRole::ANY}});
}

ServiceType service_from(const json& j) {
    return enum_from<ServiceType>(j, "service type",
                                  {{"XMBB", ServiceType::XMBB},
                                   {"MMTC", ServiceType::MMTC},
                                   {"URC", ServiceType::URC}});
}

DispatchMode dispatch_from(const json& j) {
    return enum_from<DispatchMode>(j, "dispatch mode",
                                   {{"AUTO", DispatchMode::AUTO},
                                    {"SINGLE", DispatchMode::SINGLE},
                                    {"SPLIT", DispatchMode::SPLIT},
                                    {"DUPLICATE", DispatchMode::DUPLICATE}});
}

GroupPurpose purpose_from(const json& j) {
    return enum_from<GroupPurpose>(j, "group purpose",
                                   {{"AGGREGATION", GroupPurpose::AGGREGATION},
                                    {"COMP", GroupPurpose::COMP}});
}

TrafficKind traffic_kind_from(const json& j) {
    return enum_from<TrafficKind>(j, "traffic kind",
                                  {{"FULL_BUFFER", TrafficKind::FULL_BUFFER},
                                   {"POISSON_FILES", TrafficKind::POISSON_FILES},
                                   {"POISSON_PACKETS", TrafficKind::POISSON_PACKETS},
                                   {"PERIODIC", TrafficKind::PERIODIC}});
}

AttachPolicy attach_policy_from(const json& j) {
    return enum_from<AttachPolicy>(j, "attach policy",
                                   {{"on_discovery", AttachPolicy::ON_DISCOVERY},
                                    {"on_demand", AttachPolicy::ON_DEMAND}});
}

Position position_from(const json& j) {
    return Position{j.at(0).get<double>(), j.at(1).get<double>()};
}

json position_to(const Position& p) { return json::array({p.x, p.y}); }

SeCurve se_curve_from(const json& j) {
    SeCurve curve;
    for (const auto& step : j) {
        curve.push_back({step.at("sinr_db").get<double>(), step.at("bits_per_ru").get<int>()});
    }
    return curve;
}

json se_curve_to(const SeCurve& curve) {
    json arr = json::array();
    for (const auto& step : curve) {
        arr.push_back({{"sinr_db", step.sinr_db}, {"bits_per_ru", step.bits_per_ru}});
    }
    return arr;
}

}  // namespace

ScenarioConfig scenario_from_json_text(const std::string& text) {
    const json j = json::parse(text);
    ScenarioConfig cfg;

    cfg.duration_ms = j.at("duration_ms").get<double>();
    cfg.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("attach_policy")) cfg.attach_policy = attach_policy_from(j.at("attach_policy"));
    cfg.mtu_bytes = j.value("mtu_bytes", 1500);
    cfg.verify_payloads = j.value("verify_payloads", true);

    if (j.contains("measurement")) {
        const auto& m = j.at("measurement");
        MeasurementCfg mc;
        mc.period_ms = m.value("period_ms", 40.0);
        mc.a3_offset_db = m.value("a3_offset_db", kDefaultA3OffsetDb);
        mc.time_to_trigger_ms = m.value("time_to_trigger_ms", kDefaultTimeToTriggerMs);
        if (m.contains("carriers")) mc.carriers = m.at("carriers").get<std::vector<std::string>>();
        cfg.measurement = mc;
    }

    if (j.contains("phy")) {
        const auto& p = j.at("phy");
        cfg.phy.noise_figure_db = p.value("noise_figure_db", cfg.phy.noise_figure_db);
        cfg.phy.detection_threshold_db = p.value("detection_threshold_db", cfg.phy.detection_threshold_db);
        cfg.phy.bler_at_boundary = p.value("bler_at_boundary", cfg.phy.bler_at_boundary);
        cfg.phy.bler_decade_per_db = p.value("bler_decade_per_db", cfg.phy.bler_decade_per_db);
        cfg.phy.bler_floor = p.value("bler_floor", cfg.phy.bler_floor);
    }

    for (const auto& r : j.value("rats", json::array())) {
        RatProfile rat;
        rat.id = r.at("id").get<std::string>();
        rat.kind = rat_kind_from(r.at("kind"));
        rat.tti_us = r.value("tti_us", std::int64_t{1000});
        rat.has_rlc = r.value("has_rlc", rat.kind != RatKind::WIFI_LIKE);
        rat.has_harq = r.value("has_harq", rat.kind != RatKind::WIFI_LIKE);
        rat.resource_units_per_mhz = r.value("resource_units_per_mhz", 10);
        rat.se_curve = r.contains("se_curve") ? se_curve_from(r.at("se_curve")) : default_se_curve();
        cfg.rats.push_back(std::move(rat));
    }

    for (const auto& cj : j.value("cells", json::array())) {
        CellCfg cell;
        cell.id = cj.at("id").get<std::string>();
        cell.position = position_from(cj.at("position_m"));
        cell.tx_power_dbm = cj.value("tx_power_dbm", 30.0);
        for (const auto& kj : cj.value("carriers", json::array())) {
            CarrierCfg car;
            car.id = kj.at("id").get<std::string>();
            car.center_freq_mhz = kj.at("center_freq_mhz").get<double>();
            car.bandwidth_mhz = kj.at("bandwidth_mhz").get<double>();
            if (kj.contains("regime")) car.regime = regime_from(kj.at("regime"));
            car.rat = kj.at("rat").get<std::string>();
            if (kj.contains("service_role")) car.service_role = role_from(kj.at("service_role"));
            car.busy_prob = kj.value("busy_prob", 0.0);
            car.ideal = kj.value("ideal", false);
            if (kj.contains("fixed_loss_prob") && !kj.at("fixed_loss_prob").is_null())
                car.fixed_loss_prob = kj.at("fixed_loss_prob").get<double>();
            car.path_delay_us = kj.value("path_delay_us", std::int64_t{0});
            for (const auto& wj : kj.value("incumbent_windows", json::array())) {
                car.incumbent_windows.push_back(
                    {wj.at("start_ms").get<double>(), wj.at("end_ms").get<double>()});
            }
            cell.carriers.push_back(std::move(car));
        }
        cfg.cells.push_back(std::move(cell));
    }

    for (const auto& uj : j.value("ues", json::array())) {
        UeCfg ue;
        ue.id = uj.at("id").get<std::string>();
        ue.count = uj.value("count", 1);
        if (uj.contains("position_m")) ue.position = position_from(uj.at("position_m"));
        if (uj.contains("placement")) {
            const auto& pj = uj.at("placement");
            DiscPlacement p;
            p.center = position_from(pj.at("center_m"));
            p.radius_m = pj.at("radius_m").get<double>();
            ue.placement = p;
        }
        if (uj.contains("velocity_mps")) ue.velocity_mps = position_from(uj.at("velocity_mps"));
        ue.rats = uj.at("rats").get<std::vector<std::string>>();
        if (uj.contains("freq_range_mhz")) {
            ue.freq_min_mhz = uj.at("freq_range_mhz").at(0).get<double>();
            ue.freq_max_mhz = uj.at("freq_range_mhz").at(1).get<double>();
        }
        if (uj.value("connected", false)) ue.initial_state = RrcState::CONNECTED;
        if (uj.contains("serving_cells"))
            ue.serving_cells = uj.at("serving_cells").get<std::vector<std::string>>();
        if (uj.contains("release_at_ms") && !uj.at("release_at_ms").is_null())
            ue.release_at_ms = uj.at("release_at_ms").get<double>();
        cfg.ues.push_back(std::move(ue));
    }

    for (const auto& bj : j.value("bearers", json::array())) {
        BearerCfg b;
        b.id = bj.at("id").get<std::string>();
        b.ue = bj.at("ue").get<std::string>();
        const auto& qj = bj.at("qos");
        b.qos.service_type = service_from(qj.at("service_type"));
        b.qos.priority = qj.at("priority").get<int>();
        b.qos.latency_budget_ms = qj.value("latency_budget_ms", 300.0);
        b.qos.target_rate_bps = qj.value("target_rate_bps", 0.0);
        b.qos.reliability_target = qj.value("reliability_target", 0.95);
        if (bj.contains("dispatch")) b.dispatch = dispatch_from(bj.at("dispatch"));
        for (const auto& tj : bj.value("tunnels", json::array())) {
            b.tunnels.push_back({tj.at("cell").get<std::string>(), tj.at("rat").get<std::string>(),
                                 tj.at("channel").get<std::string>()});
        }
        cfg.bearers.push_back(std::move(b));
    }

    for (const auto& gj : j.value("cell_groups", json::array())) {
        CellGroupCfg g;
        g.id = gj.at("id").get<std::string>();
        g.cells = gj.at("cells").get<std::vector<std::string>>();
        g.purpose = purpose_from(gj.at("purpose"));
        cfg.cell_groups.push_back(std::move(g));
    }

    for (const auto& tj : j.value("traffic", json::array())) {
        TrafficCfg t;
        t.bearer = tj.at("bearer").get<std::string>();
        t.kind = traffic_kind_from(tj.at("kind"));
        t.mean_file_bytes = tj.value("mean_file_bytes", t.mean_file_bytes);
        t.files_per_s = tj.value("files_per_s", t.files_per_s);
        t.packets_per_s = tj.value("packets_per_s", t.packets_per_s);
        t.period_ms = tj.value("period_ms", t.period_ms);
        t.size_bytes = tj.value("size_bytes", t.size_bytes);
        t.start_ms = tj.value("start_ms", 0.0);
        if (tj.contains("stop_ms") && !tj.at("stop_ms").is_null())
            t.stop_ms = tj.at("stop_ms").get<double>();
        cfg.traffic.push_back(std::move(t));
    }

    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_json_text(buf.str());
}

std::string scenario_to_json_text(const ScenarioConfig& cfg, int indent) {
    json j;
    j["duration_ms"] = cfg.duration_ms;
    j["seed"] = cfg.seed;
    j["attach_policy"] = to_string(cfg.attach_policy);
    j["mtu_bytes"] = cfg.mtu_bytes;
    j["verify_payloads"] = cfg.verify_payloads;

    if (cfg.measurement) {
        json m;
        m["period_ms"] = cfg.measurement->period_ms;
        m["a3_offset_db"] = cfg.measurement->a3_offset_db;
        m["time_to_trigger_ms"] = cfg.measurement->time_to_trigger_ms;
        if (!cfg.measurement->carriers.empty()) m["carriers"] = cfg.measurement->carriers;
        j["measurement"] = m;
    }

    j["phy"] = {{"noise_figure_db", cfg.phy.noise_figure_db},
                {"detection_threshold_db", cfg.phy.detection_threshold_db},
                {"bler_at_boundary", cfg.phy.bler_at_boundary},
                {"bler_decade_per_db", cfg.phy.bler_decade_per_db},
                {"bler_floor", cfg.phy.bler_floor}};

    j["rats"] = json::array();
    for (const auto& rat : cfg.rats) {
        j["rats"].push_back({{"id", rat.id},
                             {"kind", to_string(rat.kind)},
                             {"tti_us", rat.tti_us},
                             {"has_rlc", rat.has_rlc},
                             {"has_harq", rat.has_harq},
                             {"resource_units_per_mhz", rat.resource_units_per_mhz},
                             {"se_curve", se_curve_to(rat.se_curve)}});
    }

    j["cells"] = json::array();
    for (const auto& cell : cfg.cells) {
        json cj;
        cj["id"] = cell.id;
        cj["position_m"] = position_to(cell.position);
        cj["tx_power_dbm"] = cell.tx_power_dbm;
        cj["carriers"] = json::array();
        for (const auto& car : cell.carriers) {
            json kj;
            kj["id"] = car.id;
            kj["center_freq_mhz"] = car.center_freq_mhz;
            kj["bandwidth_mhz"] = car.bandwidth_mhz;
            kj["regime"] = to_string(car.regime);
            kj["rat"] = car.rat;
            kj["service_role"] = to_string(car.service_role);
            kj["busy_prob"] = car.busy_prob;
            kj["ideal"] = car.ideal;
            if (car.fixed_loss_prob) kj["fixed_loss_prob"] = *car.fixed_loss_prob;
            kj["path_delay_us"] = car.path_delay_us;
            if (!car.incumbent_windows.empty()) {
                kj["incumbent_windows"] = json::array();
                for (const auto& w : car.incumbent_windows) {
                    kj["incumbent_windows"].push_back({{"start_ms", w.start_ms}, {"end_ms", w.end_ms}});
                }
            }
            cj["carriers"].push_back(std::move(kj));
        }
        j["cells"].push_back(std::move(cj));
    }

    j["ues"] = json::array();
    for (const auto& ue : cfg.ues) {
        json uj;
        uj["id"] = ue.id;
        uj["count"] = ue.count;
        if (ue.position) uj["position_m"] = position_to(*ue.position);
        if (ue.placement) {
            uj["placement"] = {{"center_m", position_to(ue.placement->center)},
                               {"radius_m", ue.placement->radius_m}};
        }
        uj["velocity_mps"] = position_to(ue.velocity_mps);
        uj["rats"] = ue.rats;
        uj["freq_range_mhz"] = json::array({ue.freq_min_mhz, ue.freq_max_mhz});
        if (ue.initial_state == RrcState::CONNECTED) uj["connected"] = true;
        if (!ue.serving_cells.empty()) uj["serving_cells"] = ue.serving_cells;
        if (ue.release_at_ms) uj["release_at_ms"] = *ue.release_at_ms;
        j["ues"].push_back(std::move(uj));
    }

    j["bearers"] = json::array();
    for (const auto& b : cfg.bearers) {
        json bj;
        bj["id"] = b.id;
        bj["ue"] = b.ue;
        bj["qos"] = {{"service_type", to_string(b.qos.service_type)},
                     {"priority", b.qos.priority},
                     {"latency_budget_ms", b.qos.latency_budget_ms},
                     {"target_rate_bps", b.qos.target_rate_bps},
                     {"reliability_target", b.qos.reliability_target}};
        bj["dispatch"] = to_string(b.dispatch);
        if (!b.tunnels.empty()) {
            bj["tunnels"] = json::array();
            for (const auto& t : b.tunnels) {
                bj["tunnels"].push_back({{"cell", t.cell}, {"rat", t.rat}, {"channel", t.channel}});
            }
        }
        j["bearers"].push_back(std::move(bj));
    }

    if (!cfg.cell_groups.empty()) {
        j["cell_groups"] = json::array();
        for (const auto& g : cfg.cell_groups) {
            j["cell_groups"].push_back(
                {{"id", g.id}, {"cells", g.cells}, {"purpose", to_string(g.purpose)}});
        }
    }

    j["traffic"] = json::array();
    for (const auto& t : cfg.traffic) {
        json tj;
        tj["bearer"] = t.bearer;
        tj["kind"] = to_string(t.kind);
        switch (t.kind) {
            case TrafficKind::FULL_BUFFER:
                break;
            case TrafficKind::POISSON_FILES:
                tj["mean_file_bytes"] = t.mean_file_bytes;
                tj["files_per_s"] = t.files_per_s;
                break;
            case TrafficKind::POISSON_PACKETS:
                tj["packets_per_s"] = t.packets_per_s;
                tj["size_bytes"] = t.size_bytes;
                break;
            case TrafficKind::PERIODIC:
                tj["period_ms"] = t.period_ms;
                tj["size_bytes"] = t.size_bytes;
                break;
        }
        tj["start_ms"] = t.start_ms;
        if (t.stop_ms) tj["stop_ms"] = *t.stop_ms;
        j["traffic"].push_back(std::move(tj));
    }

    return j.dump(indent);
}

std::string scenario_hash_hex(const ScenarioConfig& config) {
    const std::string canonical = scenario_to_json_text(config, -1);
    const std::uint64_t h = fnv1a64(canonical);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string defaults_json_text() {
    json j;
    j["se_curve"] = se_curve_to(default_se_curve());
    j["phy"] = {{"noise_figure_db", PhyParams{}.noise_figure_db},
                {"detection_threshold_db", PhyParams{}.detection_threshold_db},
                {"bler_at_boundary", PhyParams{}.bler_at_boundary},
                {"bler_decade_per_db", PhyParams{}.bler_decade_per_db},
                {"bler_floor", PhyParams{}.bler_floor},
                {"thermal_noise_dbm_per_hz", kThermalNoiseDbmPerHz},
                {"path_loss_exponent", {{"LOW", kPathLossExponentLow},
                                        {"MID", kPathLossExponentMid},
                                        {"HIGH", kPathLossExponentHigh}}}};
    j["headers_bytes"] = {{"upper", kUpperHeaderBytes},
                          {"compressed_upper", kCompressedHeaderBytes},
                          {"pdcp", kPdcpHeaderBytes},
                          {"rlc_segment", kRlcSegHeaderBytes},
                          {"mac_subheader", kMacSubheaderBytes}};
    j["pdcp"] = {{"sn_space", kPdcpSnSpace},
                 {"window", kPdcpWindow},
                 {"t_reordering_ms", kPdcpReorderingUs / kUsPerMs}};
    j["rlc"] = {{"reassembly_timeout_ms", kRlcReassemblyTimeoutUs / kUsPerMs}};
    j["harq"] = {{"processes", kHarqProcesses},
                 {"max_tx", kHarqMaxTx},
                 {"feedback_ttis", kHarqFeedbackTtis}};
    j["rrc"] = {{"sib_period_ms", kSibPeriodUs / kUsPerMs},
                {"signaling_delay_ms", kSignalingDelayUs / kUsPerMs},
                {"a3_offset_db", kDefaultA3OffsetDb},
                {"time_to_trigger_ms", kDefaultTimeToTriggerMs}};
    j["forwarding"] = {{"ewma_alpha", kPathEstimateAlpha},
                       {"hold_queue_limit", kDispatchHoldQueueLimit}};
    j["rrm"] = {{"qos_eval_period_ms", kQosEvalPeriodUs / kUsPerMs},
                {"qos_rate_factor", kQosRateFactor},
                {"radio_map_stale_periods", kRadioMapStalePeriods}};
    return j.dump(2);
}

}  // namespace ranstack
