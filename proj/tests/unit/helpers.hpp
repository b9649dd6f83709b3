#pragma once

#include <string>

#include "ranstack/domain.hpp"
#include "ranstack/scenario_io.hpp"

namespace testutil {

using namespace ranstack;

// Minimal structurally valid scenario: one LTE-like cell, one UE, one bearer.
inline ScenarioConfig base_scenario() {
    ScenarioConfig cfg;
    cfg.duration_ms = 1000;

    RatProfile lte;
    lte.id = "lte";
    lte.kind = RatKind::LTE_LIKE;
    lte.tti_us = 1000;
    lte.has_rlc = true;
    lte.has_harq = true;
    lte.resource_units_per_mhz = 10;
    lte.se_curve = default_se_curve();
    cfg.rats.push_back(lte);

    CellCfg cell;
    cell.id = "cellA";
    cell.position = {0, 0};
    cell.tx_power_dbm = 43.0;
    CarrierCfg car;
    car.id = "a0";
    car.center_freq_mhz = 2600;
    car.bandwidth_mhz = 10;
    car.regime = BandRegime::LICENSED;
    car.rat = "lte";
    cell.carriers.push_back(car);
    cfg.cells.push_back(cell);

    UeCfg ue;
    ue.id = "ue0";
    ue.position = Position{100, 0};
    ue.rats = {"lte"};
    cfg.ues.push_back(ue);

    BearerCfg bearer;
    bearer.id = "b0";
    bearer.ue = "ue0";
    bearer.qos.service_type = ServiceType::XMBB;
    bearer.qos.priority = 5;
    bearer.qos.latency_budget_ms = 300;
    cfg.bearers.push_back(bearer);

    TrafficCfg traffic;
    traffic.bearer = "b0";
    traffic.kind = TrafficKind::PERIODIC;
    traffic.period_ms = 10;
    traffic.size_bytes = 200;
    cfg.traffic.push_back(traffic);

    return cfg;
}

inline std::string scenario_path(const std::string& name) {
    return std::string(RANSTACK_SCENARIO_DIR) + "/" + name;
}

inline std::string fixture_path(const std::string& name) {
    return std::string(RANSTACK_FIXTURE_DIR) + "/" + name;
}

}  // namespace testutil
