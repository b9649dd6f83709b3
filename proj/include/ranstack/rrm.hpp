#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ranstack/domain.hpp"
#include "ranstack/params.hpp"

namespace ranstack::rrm {

// Latest measured SINR per (ue, cell, carrier) with staleness tracking;
// entries older than kRadioMapStalePeriods report periods read as unknown.
class RadioMap {
public:
    void set_report_period(SimTime period_us) { report_period_us_ = period_us; }
    SimTime report_period() const { return report_period_us_; }

    void update(std::uint32_t ue, std::uint32_t cell, std::uint32_t carrier, double sinr_db,
                SimTime now);
    void forget(std::uint32_t ue, std::uint32_t cell, std::uint32_t carrier);

    // Bulk freshness stamp for static topologies: every stored entry still
    // reflects reality, so re-measuring would only rewrite the same values.
    void touch_all(SimTime now) { last_touch_ = std::max(last_touch_, now); }

    std::optional<double> sinr(std::uint32_t ue, std::uint32_t cell, std::uint32_t carrier,
                               SimTime now) const;

    // Best known carrier SINR of a cell for this UE, if any entry is fresh.
    std::optional<double> best_cell_sinr(std::uint32_t ue, std::uint32_t cell, SimTime now) const;

    std::vector<std::uint32_t> known_cells(std::uint32_t ue, SimTime now) const;

private:
    struct Entry {
        double sinr_db = 0.0;
        SimTime updated_at = 0;
    };
    bool fresh(const Entry& e, SimTime now) const {
        return now - std::max(e.updated_at, last_touch_) <=
               kRadioMapStalePeriods * report_period_us_;
    }

    SimTime report_period_us_ = kSibPeriodUs;
    SimTime last_touch_ = 0;
    std::map<std::uint32_t, std::map<std::uint32_t, std::map<std::uint32_t, Entry>>> entries_;
};

// Read-only topology view the planner works against.
struct CandidateCarrier {
    std::uint32_t cell = 0;
    std::uint32_t carrier = 0;
    std::uint32_t rat = 0;
    ServiceRole role = ServiceRole::ANY;
    double rate_estimate_bps = 0.0;      // capacity at the last known SINR
    double delivery_estimate = 1.0;      // 1 - expected block error rate
};

struct TunnelPlan {
    std::uint32_t cell = 0;
    std::uint32_t rat = 0;
};

struct BearerPlan {
    DispatchMode mode = DispatchMode::SINGLE;
    std::vector<TunnelPlan> tunnels;
    std::optional<GroupPurpose> group;  // group to form over the tunnel cells
    bool best_effort = false;           // demand not satisfiable with current resources
};

// Serving-cell choice: the RAT-compatible cell with the best known carrier
// SINR; ties break to the lowest cell index.
std::optional<std::uint32_t> attach(std::uint32_t ue, const std::vector<std::uint32_t>& candidates,
                                    const RadioMap& map, SimTime now);

// Bearer blueprint from QoS demand and the current radio knowledge:
// URC escalates to DUPLICATE over the two best cells when a single leg
// cannot meet the reliability target; xMBB escalates to SPLIT over enough
// carriers/cells to cover the target rate; everything else rides SINGLE on
// the serving cell. Carrier choice prefers matching service roles.
BearerPlan plan_bearer(const QosProfile& qos, std::uint32_t serving_cell,
                       const std::vector<CandidateCarrier>& candidates);

struct CellGroupState {
    std::uint32_t id = 0;
    std::string name;
    std::set<std::uint32_t> members;
    GroupPurpose purpose = GroupPurpose::AGGREGATION;
};

// Cell group lifecycle with the single-membership invariant and dissolve
// blocking while bearers still reference the group.
class GroupRegistry {
public:
    std::uint32_t form(const std::set<std::uint32_t>& cells, GroupPurpose purpose,
                       const std::string& name);
    void dissolve(std::uint32_t group_id);

    void add_reference(std::uint32_t group_id, const std::string& bearer);
    void drop_reference(std::uint32_t group_id, const std::string& bearer);

    std::optional<std::uint32_t> group_of(std::uint32_t cell) const;
    // Existing group with exactly these members and purpose, if any.
    std::optional<std::uint32_t> find(const std::set<std::uint32_t>& cells,
                                      GroupPurpose purpose) const;
    const CellGroupState& state(std::uint32_t group_id) const;
    const std::map<std::uint32_t, CellGroupState>& groups() const { return groups_; }
    const std::map<std::uint32_t, std::set<std::string>>& references() const { return refs_; }

private:
    std::uint32_t next_id_ = 0;
    std::map<std::uint32_t, CellGroupState> groups_;
    std::map<std::uint32_t, std::set<std::string>> refs_;  // group -> referencing bearers
};

// Windowed per-bearer QoS observation for the periodic evaluation.
struct QosWindow {
    double measured_rate_bps = 0.0;
    double deadline_miss_ratio = 0.0;
    std::int64_t offered = 0;
};

enum class CommandKind { ESCALATE_SPLIT, ESCALATE_DUPLICATE };

// Stack reconfiguration command; applied at the next TTI boundary after
// validation against the domain invariants.
struct StackConfigCommand {
    CommandKind kind = CommandKind::ESCALATE_SPLIT;
    std::string bearer;
    std::vector<TunnelPlan> add_tunnels;
    SimTime apply_at = 0;
};

struct QosDecision {
    std::optional<StackConfigCommand> command;
    bool flagged = false;  // shortfall with no escalation available
};

// One evaluation round for one bearer. Mode transitions follow the ladder
// SINGLE -> SPLIT (rate shortfall) and anything -> DUPLICATE (reliability
// shortfall); at most one command per bearer per round.
QosDecision enforce_qos(const QosProfile& qos, DispatchMode current_mode,
                        const std::vector<TunnelPlan>& current_tunnels, const QosWindow& window,
                        std::uint32_t serving_cell,
                        const std::vector<CandidateCarrier>& candidates);

}  // namespace ranstack::rrm
