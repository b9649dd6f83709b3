#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ranstack/common.hpp"

namespace ranstack {

enum class RatKind { LTE_LIKE, WIFI_LIKE, FBMC_LIKE };
enum class BandRegime { LICENSED, LIGHTLY_LICENSED, UNLICENSED };
enum class ServiceRole { XMBB, MMTC, URC, ANY };
enum class ServiceType { XMBB, MMTC, URC };
enum class DispatchMode { AUTO, SINGLE, SPLIT, DUPLICATE };
enum class RrcState { IDLE, CONNECTED };
enum class GroupPurpose { AGGREGATION, COMP };
enum class BandClass { LOW, MID, HIGH };
enum class AttachPolicy { ON_DISCOVERY, ON_DEMAND };

const char* to_string(RatKind v);
const char* to_string(BandRegime v);
const char* to_string(ServiceRole v);
const char* to_string(ServiceType v);
const char* to_string(DispatchMode v);
const char* to_string(GroupPurpose v);
const char* to_string(BandClass v);
const char* to_string(AttachPolicy v);

struct Position {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Position&) const = default;
};

inline double distance_m(const Position& a, const Position& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    double d = std::sqrt(dx * dx + dy * dy);
    return d;
}

// Spectral-efficiency step table: bits per resource unit as a monotone step
// function of SINR. Below the first threshold the link carries nothing; the
// first step itself must map to 0 bits.
struct SeStep {
    double sinr_db = 0.0;
    int bits_per_ru = 0;
    bool operator==(const SeStep&) const = default;
};

using SeCurve = std::vector<SeStep>;

SeCurve default_se_curve();

struct RatProfile {
    std::string id;
    RatKind kind = RatKind::LTE_LIKE;
    std::int64_t tti_us = 1000;
    bool has_rlc = true;
    bool has_harq = true;
    int resource_units_per_mhz = 10;  // resource units per TTI per MHz of carrier bandwidth
    SeCurve se_curve;
    bool operator==(const RatProfile&) const = default;
};

struct IncumbentWindow {
    double start_ms = 0.0;
    double end_ms = 0.0;
    bool operator==(const IncumbentWindow&) const = default;
};

struct CarrierCfg {
    std::string id;
    double center_freq_mhz = 2600.0;
    double bandwidth_mhz = 10.0;
    BandRegime regime = BandRegime::LICENSED;
    std::string rat;
    ServiceRole service_role = ServiceRole::ANY;
    double busy_prob = 0.0;
    // Link-model knobs, loadable per carrier. `ideal` disables stochastic
    // loss; `fixed_loss_prob` pins the block error rate regardless of SINR.
    bool ideal = false;
    std::optional<double> fixed_loss_prob;
    std::int64_t path_delay_us = 0;
    std::vector<IncumbentWindow> incumbent_windows;
    bool operator==(const CarrierCfg&) const = default;
};

struct CellCfg {
    std::string id;
    Position position;
    double tx_power_dbm = 30.0;
    std::vector<CarrierCfg> carriers;
    bool operator==(const CellCfg&) const = default;
};

// Uniform placement over a disc, used by bulk UE populations.
struct DiscPlacement {
    Position center;
    double radius_m = 1000.0;
    bool operator==(const DiscPlacement&) const = default;
};

struct UeCfg {
    std::string id;
    int count = 1;  // > 1 expands into count instances "<id>#k"
    std::optional<Position> position;
    std::optional<DiscPlacement> placement;
    Position velocity_mps;
    std::vector<std::string> rats;  // RAT capability set
    double freq_min_mhz = 400.0;
    double freq_max_mhz = 100000.0;
    RrcState initial_state = RrcState::IDLE;
    std::vector<std::string> serving_cells;  // only valid when initial_state = CONNECTED
    std::optional<double> release_at_ms;     // scripted connection release
    bool operator==(const UeCfg&) const = default;
};

struct QosProfile {
    ServiceType service_type = ServiceType::XMBB;
    int priority = 5;  // lower number = more urgent
    double latency_budget_ms = 300.0;
    double target_rate_bps = 0.0;
    double reliability_target = 0.95;
    bool operator==(const QosProfile&) const = default;
};

struct TunnelCfg {
    std::string cell;
    std::string rat;
    std::string channel;
    bool operator==(const TunnelCfg&) const = default;
};

struct BearerCfg {
    std::string id;
    std::string ue;
    QosProfile qos;
    DispatchMode dispatch = DispatchMode::AUTO;
    std::vector<TunnelCfg> tunnels;  // optional explicit plumbing; empty = planned by RRM
    bool operator==(const BearerCfg&) const = default;
};

struct CellGroupCfg {
    std::string id;
    std::vector<std::string> cells;
    GroupPurpose purpose = GroupPurpose::AGGREGATION;
    bool operator==(const CellGroupCfg&) const = default;
};

enum class TrafficKind { FULL_BUFFER, POISSON_FILES, POISSON_PACKETS, PERIODIC };

const char* to_string(TrafficKind v);

struct TrafficCfg {
    std::string bearer;
    TrafficKind kind = TrafficKind::PERIODIC;
    double mean_file_bytes = 1048576.0;  // POISSON_FILES
    double files_per_s = 0.5;            // POISSON_FILES
    double packets_per_s = 1.0 / 60.0;   // POISSON_PACKETS
    double period_ms = 10.0;             // PERIODIC
    double size_bytes = 200.0;           // PERIODIC / POISSON_PACKETS
    double start_ms = 0.0;
    std::optional<double> stop_ms;
    bool operator==(const TrafficCfg&) const = default;
};

struct MeasurementCfg {
    double period_ms = 40.0;
    double a3_offset_db = 3.0;
    double time_to_trigger_ms = 160.0;
    std::vector<std::string> carriers;  // empty = all carriers
    bool operator==(const MeasurementCfg&) const = default;
};

// Model constants that may be overridden per scenario.
struct PhyParams {
    double noise_figure_db = 7.0;
    double detection_threshold_db = -6.0;
    double bler_at_boundary = 0.5;
    double bler_decade_per_db = 2.0;  // loss decays x0.1 per this many dB above the step boundary
    double bler_floor = 1e-4;
    bool operator==(const PhyParams&) const = default;
};

struct ScenarioConfig {
    double duration_ms = 1000.0;
    std::uint64_t seed = 0;
    AttachPolicy attach_policy = AttachPolicy::ON_DISCOVERY;
    int mtu_bytes = 1500;
    bool verify_payloads = true;
    std::optional<MeasurementCfg> measurement;
    PhyParams phy;
    std::vector<RatProfile> rats;
    std::vector<CellCfg> cells;
    std::vector<UeCfg> ues;
    std::vector<BearerCfg> bearers;
    std::vector<CellGroupCfg> cell_groups;
    std::vector<TrafficCfg> traffic;
    bool operator==(const ScenarioConfig&) const = default;
};

struct Violation {
    std::string path;
    std::string message;
    bool operator==(const Violation&) const = default;
};

struct ValidationResult {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

// Checks every structural invariant expressible in a scenario file and
// returns all violations with a path to the offending element. Violations
// are data, not failures; the order is the deterministic traversal order.
ValidationResult validate_scenario(const ScenarioConfig& config);

// Band classification used by the path-loss model. Cut points: below 1 GHz
// is LOW, 1-6 GHz is MID, above 6 GHz is HIGH.
BandClass freq_band_class(double center_freq_mhz);
inline BandClass freq_band_class(const CarrierCfg& carrier) {
    return freq_band_class(carrier.center_freq_mhz);
}

}  // namespace ranstack
