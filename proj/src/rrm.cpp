#include "ranstack/rrm.hpp"

#include <algorithm>

namespace ranstack::rrm {

void RadioMap::update(std::uint32_t ue, std::uint32_t cell, std::uint32_t carrier, double sinr_db,
                      SimTime now) {
    entries_[ue][cell][carrier] = Entry{sinr_db, now};
}

void RadioMap::forget(std::uint32_t ue, std::uint32_t cell, std::uint32_t carrier) {
    auto ue_it = entries_.find(ue);
    if (ue_it == entries_.end()) return;
    auto cell_it = ue_it->second.find(cell);
    if (cell_it == ue_it->second.end()) return;
    cell_it->second.erase(carrier);
}

std::optional<double> RadioMap::sinr(std::uint32_t ue, std::uint32_t cell, std::uint32_t carrier,
                                     SimTime now) const {
    auto ue_it = entries_.find(ue);
    if (ue_it == entries_.end()) return std::nullopt;
    auto cell_it = ue_it->second.find(cell);
    if (cell_it == ue_it->second.end()) return std::nullopt;
    auto car_it = cell_it->second.find(carrier);
    if (car_it == cell_it->second.end()) return std::nullopt;
    if (!fresh(car_it->second, now)) return std::nullopt;
    return car_it->second.sinr_db;
}

std::optional<double> RadioMap::best_cell_sinr(std::uint32_t ue, std::uint32_t cell,
                                               SimTime now) const {
    auto ue_it = entries_.find(ue);
    if (ue_it == entries_.end()) return std::nullopt;
    auto cell_it = ue_it->second.find(cell);
    if (cell_it == ue_it->second.end()) return std::nullopt;
    std::optional<double> best;
    for (const auto& [carrier, entry] : cell_it->second) {
        if (!fresh(entry, now)) continue;
        if (!best || entry.sinr_db > *best) best = entry.sinr_db;
    }
    return best;
}

std::vector<std::uint32_t> RadioMap::known_cells(std::uint32_t ue, SimTime now) const {
    std::vector<std::uint32_t> cells;
    auto ue_it = entries_.find(ue);
    if (ue_it == entries_.end()) return cells;
    for (const auto& [cell, carriers] : ue_it->second) {
        for (const auto& [carrier, entry] : carriers) {
            if (fresh(entry, now)) {
                cells.push_back(cell);
                break;
            }
        }
    }
    return cells;
}

std::optional<std::uint32_t> attach(std::uint32_t ue, const std::vector<std::uint32_t>& candidates,
                                    const RadioMap& map, SimTime now) {
    std::vector<std::uint32_t> ordered = candidates;
    std::sort(ordered.begin(), ordered.end());
    ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());
    std::optional<std::uint32_t> best_cell;
    double best_sinr = 0.0;
    for (std::uint32_t cell : ordered) {
        const auto sinr = map.best_cell_sinr(ue, cell, now);
        if (!sinr) continue;
        // Strictly-better wins; equal SINR keeps the lower cell index because
        // candidates are visited in ascending order.
        if (!best_cell || *sinr > best_sinr) {
            best_cell = cell;
            best_sinr = *sinr;
        }
    }
    return best_cell;
}

namespace {

// Role preference: exact service match beats ANY beats mismatch.
int role_rank(ServiceRole role, ServiceType service) {
    const bool match = (role == ServiceRole::XMBB && service == ServiceType::XMBB) ||
                       (role == ServiceRole::MMTC && service == ServiceType::MMTC) ||
                       (role == ServiceRole::URC && service == ServiceType::URC);
    if (match) return 0;
    if (role == ServiceRole::ANY) return 1;
    return 2;
}

std::vector<CandidateCarrier> sorted_candidates(const std::vector<CandidateCarrier>& in,
                                                ServiceType service) {
    std::vector<CandidateCarrier> out = in;
    std::stable_sort(out.begin(), out.end(), [&](const CandidateCarrier& a, const CandidateCarrier& b) {
        const int ra = role_rank(a.role, service);
        const int rb = role_rank(b.role, service);
        if (ra != rb) return ra < rb;
        if (a.rate_estimate_bps != b.rate_estimate_bps) return a.rate_estimate_bps > b.rate_estimate_bps;
        if (a.cell != b.cell) return a.cell < b.cell;
        return a.carrier < b.carrier;
    });
    return out;
}

const CandidateCarrier* best_on_cell(const std::vector<CandidateCarrier>& sorted,
                                     std::uint32_t cell) {
    for (const auto& c : sorted) {
        if (c.cell == cell) return &c;
    }
    return nullptr;
}

void add_tunnel_unique(std::vector<TunnelPlan>& tunnels, std::uint32_t cell, std::uint32_t rat) {
    for (const auto& t : tunnels) {
        if (t.cell == cell && t.rat == rat) return;
    }
    tunnels.push_back({cell, rat});
}

}  // namespace

BearerPlan plan_bearer(const QosProfile& qos, std::uint32_t serving_cell,
                       const std::vector<CandidateCarrier>& candidates) {
    BearerPlan plan;
    const auto sorted = sorted_candidates(candidates, qos.service_type);
    const CandidateCarrier* serving_best = best_on_cell(sorted, serving_cell);
    if (!serving_best) {
        plan.best_effort = true;
        return plan;
    }

    if (qos.service_type == ServiceType::URC) {
        if (serving_best->delivery_estimate >= qos.reliability_target) {
            plan.mode = DispatchMode::SINGLE;
            plan.tunnels.push_back({serving_cell, serving_best->rat});
            return plan;
        }
        // One leg is not reliable enough: duplicate over the two best cells.
        plan.mode = DispatchMode::DUPLICATE;
        plan.tunnels.push_back({serving_cell, serving_best->rat});
        for (const auto& c : sorted) {
            if (c.cell == serving_cell) continue;
            add_tunnel_unique(plan.tunnels, c.cell, c.rat);
            if (plan.tunnels.size() >= 2) break;
        }
        if (plan.tunnels.size() < 2) {
            plan.mode = DispatchMode::SINGLE;
            plan.best_effort = true;  // nothing to duplicate over
            return plan;
        }
        plan.group = GroupPurpose::COMP;
        // Composed delivery: 1 - product of per-leg loss.
        double loss = 1.0;
        for (const auto& t : plan.tunnels) {
            if (const auto* c = best_on_cell(sorted, t.cell)) loss *= 1.0 - c->delivery_estimate;
        }
        if (1.0 - loss < qos.reliability_target) plan.best_effort = true;
        return plan;
    }

    if (qos.service_type == ServiceType::XMBB && qos.target_rate_bps > 0.0 &&
        qos.target_rate_bps > serving_best->rate_estimate_bps) {
        // Aggregate carriers/cells until the estimates cover the target.
        plan.mode = DispatchMode::SPLIT;
        double covered = 0.0;
        std::set<std::uint32_t> cells_used;
        for (const auto& c : sorted) {
            if (c.rate_estimate_bps <= 0.0) continue;
            add_tunnel_unique(plan.tunnels, c.cell, c.rat);
            cells_used.insert(c.cell);
            covered += c.rate_estimate_bps;
            if (covered >= qos.target_rate_bps) break;
        }
        if (plan.tunnels.size() < 2) {
            // A single tunnel cannot split; fall back to the serving cell.
            plan.mode = DispatchMode::SINGLE;
            plan.tunnels.clear();
            plan.tunnels.push_back({serving_cell, serving_best->rat});
            plan.best_effort = true;
            return plan;
        }
        if (covered < qos.target_rate_bps) plan.best_effort = true;
        if (cells_used.size() > 1) plan.group = GroupPurpose::AGGREGATION;
        return plan;
    }

    plan.mode = DispatchMode::SINGLE;
    plan.tunnels.push_back({serving_cell, serving_best->rat});
    return plan;
}

std::uint32_t GroupRegistry::form(const std::set<std::uint32_t>& cells, GroupPurpose purpose,
                                  const std::string& name) {
    if (cells.size() < 2) throw ProtocolError("cell group needs at least 2 members");
    for (std::uint32_t cell : cells) {
        if (group_of(cell)) {
            throw ProtocolError("cell " + std::to_string(cell) + " already belongs to a group");
        }
    }
    const std::uint32_t id = next_id_++;
    groups_[id] = CellGroupState{id, name, cells, purpose};
    return id;
}

void GroupRegistry::dissolve(std::uint32_t group_id) {
    const auto it = groups_.find(group_id);
    if (it == groups_.end()) throw ProtocolError("dissolving unknown group");
    const auto ref_it = refs_.find(group_id);
    if (ref_it != refs_.end() && !ref_it->second.empty()) {
        std::string blockers;
        for (const auto& b : ref_it->second) {
            if (!blockers.empty()) blockers += ", ";
            blockers += b;
        }
        throw ProtocolError("group still referenced by bearers: " + blockers);
    }
    refs_.erase(group_id);
    groups_.erase(it);
}

void GroupRegistry::add_reference(std::uint32_t group_id, const std::string& bearer) {
    refs_[group_id].insert(bearer);
}

void GroupRegistry::drop_reference(std::uint32_t group_id, const std::string& bearer) {
    auto it = refs_.find(group_id);
    if (it == refs_.end()) return;
    it->second.erase(bearer);
}

std::optional<std::uint32_t> GroupRegistry::group_of(std::uint32_t cell) const {
    for (const auto& [id, g] : groups_) {
        if (g.members.count(cell)) return id;
    }
    return std::nullopt;
}

std::optional<std::uint32_t> GroupRegistry::find(const std::set<std::uint32_t>& cells,
                                                 GroupPurpose purpose) const {
    for (const auto& [id, g] : groups_) {
        if (g.purpose == purpose && g.members == cells) return id;
    }
    return std::nullopt;
}

const CellGroupState& GroupRegistry::state(std::uint32_t group_id) const {
    return groups_.at(group_id);
}

QosDecision enforce_qos(const QosProfile& qos, DispatchMode current_mode,
                        const std::vector<TunnelPlan>& current_tunnels, const QosWindow& window,
                        std::uint32_t serving_cell,
                        const std::vector<CandidateCarrier>& candidates) {
    QosDecision decision;
    const auto sorted = sorted_candidates(candidates, qos.service_type);

    auto unused_tunnels = [&](std::size_t want) {
        std::vector<TunnelPlan> extra;
        for (const auto& c : sorted) {
            bool used = false;
            for (const auto& t : current_tunnels) {
                if (t.cell == c.cell && t.rat == c.rat) used = true;
            }
            if (used) continue;
            bool dup = false;
            for (const auto& t : extra) {
                if (t.cell == c.cell && t.rat == c.rat) dup = true;
            }
            if (dup) continue;
            extra.push_back({c.cell, c.rat});
            if (extra.size() >= want) break;
        }
        return extra;
    };

    if (qos.service_type == ServiceType::XMBB && qos.target_rate_bps > 0.0 && window.offered > 0) {
        if (window.measured_rate_bps < kQosRateFactor * qos.target_rate_bps) {
            auto extra = unused_tunnels(1);
            if (extra.empty()) {
                decision.flagged = true;
                return decision;
            }
            StackConfigCommand cmd;
            cmd.kind = CommandKind::ESCALATE_SPLIT;
            cmd.add_tunnels = std::move(extra);
            decision.command = cmd;
            return decision;
        }
        return decision;
    }

    if (qos.service_type == ServiceType::URC && window.offered > 0) {
        const double allowed_miss = 1.0 - qos.reliability_target;
        if (window.deadline_miss_ratio > allowed_miss) {
            if (current_mode == DispatchMode::DUPLICATE) {
                decision.flagged = true;  // already at the top of the ladder
                return decision;
            }
            auto extra = unused_tunnels(1);
            if (extra.empty()) {
                decision.flagged = true;
                return decision;
            }
            StackConfigCommand cmd;
            cmd.kind = CommandKind::ESCALATE_DUPLICATE;
            cmd.add_tunnels = std::move(extra);
            decision.command = cmd;
            return decision;
        }
    }

    (void)serving_cell;
    return decision;
}

}  // namespace ranstack::rrm
