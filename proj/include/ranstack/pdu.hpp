#pragma once

#include <cstdint>
#include <vector>

#include "ranstack/common.hpp"
#include "ranstack/params.hpp"

namespace ranstack {

using Bytes = std::vector<std::uint8_t>;

// Service data unit entering the stack. `seq` and `created_at` are simulator
// instrumentation (think packet tags), not modeled wire content.
struct Sdu {
    std::uint32_t bearer = 0;
    std::uint64_t seq = 0;  // absolute per-bearer sequence, for accounting
    SimTime created_at = 0;
    Bytes payload;
};

// PDCP PDU. Wire cost = kPdcpHeaderBytes + payload size; payload is the
// (possibly compressed) upper packet after ciphering.
struct PdcpPdu {
    std::uint32_t bearer = 0;
    std::uint16_t sn = 0;
    bool compressed = false;
    bool ciphered = false;
    Bytes payload;
    // instrumentation
    std::uint64_t seq = 0;
    SimTime created_at = 0;

    int wire_bytes() const { return kPdcpHeaderBytes + static_cast<int>(payload.size()); }
};

// RLC PDU: either a transparent pass-through of a whole PDCP PDU (zero added
// header bytes) or one unacknowledged-mode segment of it.
struct RlcPdu {
    bool transparent = false;
    std::uint16_t sn = 0;       // upstream PDCP SN (keys reassembly)
    std::uint32_t offset = 0;   // first payload byte of this segment
    bool last = false;
    Bytes data;                 // segment bytes (whole PDU payload when transparent)
    // PDCP header ride-along so the receiver can rebuild the PDU.
    std::uint32_t bearer = 0;
    bool compressed = false;
    bool ciphered = false;
    std::uint64_t seq = 0;
    SimTime created_at = 0;

    // The PDCP header travels (and is costed) with the first segment; a
    // transparent PDU is the whole PDCP PDU with zero added RLC bytes.
    int wire_bytes() const {
        if (transparent) return kPdcpHeaderBytes + static_cast<int>(data.size());
        return kRlcSegHeaderBytes + static_cast<int>(data.size()) +
               (offset == 0 ? kPdcpHeaderBytes : 0);
    }
};

struct MacSubPdu {
    std::uint32_t channel = 0;
    RlcPdu rlc;
};

// One transport block per (carrier, UE, TTI): the MAC-level multiplex of all
// scheduled logical channels of that UE.
struct TransportBlock {
    std::uint64_t tb_id = 0;
    std::uint32_t carrier = 0;
    std::uint32_t ue = 0;
    int ru_cost = 0;            // resource units this block occupies
    int declared_bytes = 0;     // announced total, checked by demux
    std::vector<MacSubPdu> subpdus;

    int wire_bytes() const {
        int total = 0;
        for (const auto& sp : subpdus) total += kMacSubheaderBytes + sp.rlc.wire_bytes();
        return total;
    }
};

}  // namespace ranstack
