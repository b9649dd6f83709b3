#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ranstack/domain.hpp"
#include "ranstack/pdu.hpp"

namespace ranstack::rrc {

enum class EntityMode { FULL, TRANSPARENT };

// System information record broadcast by FULL entities.
struct Sib {
    std::uint32_t cell = 0;
    std::string rat;
    std::vector<std::uint32_t> carriers;
    Bytes nas_payload;  // opaque non-access-stratum blob
};

// Per-(cell, RAT) control-plane entity. WIFI_LIKE RATs have no control plane
// of their own, so their entity runs transparent: it forwards configuration
// untouched and emits no control events.
class RrcEntity {
public:
    RrcEntity() = default;
    RrcEntity(std::uint32_t cell, std::uint32_t rat, EntityMode mode, Sib sib)
        : cell_(cell), rat_(rat), mode_(mode), sib_(std::move(sib)) {}

    std::uint32_t cell() const { return cell_; }
    std::uint32_t rat() const { return rat_; }
    EntityMode mode() const { return mode_; }
    const Sib& sib() const { return sib_; }

    // Transparent pass-through for stateless entities; byte identity.
    Bytes forward_transparent(const Bytes& config_blob) const { return config_blob; }

private:
    std::uint32_t cell_ = 0;
    std::uint32_t rat_ = 0;
    EntityMode mode_ = EntityMode::FULL;
    Sib sib_;
};

enum class PageOutcome { REACHED, UNREACHED, NOOP };

// Paging: reached iff the idle UE currently detects the cell; paging a
// connected UE is a logged no-op.
PageOutcome page(RrcState ue_state, bool ue_detects_cell);

// Connection lifecycle guards. The engine owns the actual state mutation;
// these enforce the (IDLE -> CONNECTED -> IDLE)* protocol and derive keys.
void check_establish(RrcState state);
void check_release(RrcState state);

// Security key stub: 128-bit hash of ue id, cell id and a per-run nonce.
std::array<std::uint8_t, 16> derive_key(std::string_view ue_id, std::string_view cell_id,
                                        std::uint64_t nonce);

struct MeasurementReport {
    std::uint32_t ue = 0;
    SimTime timestamp = 0;
    // (cell, carrier) -> sinr_db for the configured carriers in range
    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> entries;
};

struct HandoverDecision {
    std::uint32_t ue = 0;
    std::uint32_t source_cell = 0;
    std::uint32_t target_cell = 0;
    SimTime decided_at = 0;
};

// A3-style mobility trigger: a neighbour must beat the serving cell by
// a3_offset_db continuously for time_to_trigger before a decision fires.
class A3Tracker {
public:
    std::optional<HandoverDecision> feed(const MeasurementReport& report,
                                         std::uint32_t serving_cell, double a3_offset_db,
                                         SimTime time_to_trigger_us);

    void reset() { better_since_.clear(); }

private:
    std::map<std::uint32_t, SimTime> better_since_;  // neighbour cell -> condition start
};

}  // namespace ranstack::rrc
