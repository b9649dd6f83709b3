#include "ranstack/rlc.hpp"

#include <algorithm>

namespace ranstack::rlc {

std::vector<RlcPdu> segment(const PdcpPdu& pdu, int max_bytes) {
    std::vector<RlcPdu> out;
    const auto total = static_cast<std::uint32_t>(pdu.payload.size());
    std::uint32_t offset = 0;
    do {
        // max_bytes caps header + payload share; the upstream PDCP header
        // rides with the first segment and is costed at the MAC multiplex.
        if (max_bytes <= kRlcSegHeaderBytes) {
            throw ProtocolError("rlc segment budget below header overhead");
        }
        const auto chunk = std::min<std::uint32_t>(
            total - offset, static_cast<std::uint32_t>(max_bytes - kRlcSegHeaderBytes));
        RlcPdu seg;
        seg.transparent = false;
        seg.sn = pdu.sn;
        seg.offset = offset;
        seg.data.assign(pdu.payload.begin() + offset, pdu.payload.begin() + offset + chunk);
        seg.last = (offset + chunk == total);
        seg.bearer = pdu.bearer;
        seg.compressed = pdu.compressed;
        seg.ciphered = pdu.ciphered;
        seg.seq = pdu.seq;
        seg.created_at = pdu.created_at;
        out.push_back(std::move(seg));
        offset += chunk;
    } while (offset < total);
    return out;
}

std::optional<PdcpPdu> RxEntity::on_pdu(const RlcPdu& pdu, SimTime now) {
    if (mode_ == Mode::TRANSPARENT || pdu.transparent) {
        // Byte-level identity: no buffering, no header stripping needed.
        PdcpPdu out;
        out.bearer = pdu.bearer;
        out.sn = pdu.sn;
        out.compressed = pdu.compressed;
        out.ciphered = pdu.ciphered;
        out.payload = pdu.data;
        out.seq = pdu.seq;
        out.created_at = pdu.created_at;
        counters_.delivered++;
        return out;
    }

    auto [it, inserted] = partials_.try_emplace(pdu.sn);
    Partial& p = it->second;
    if (inserted) {
        p.started_at = now;
        p.header_template = pdu;
    }

    // Duplicate and overlap handling: an exact duplicate is idempotent; an
    // overlap with different bytes poisons the whole PDU.
    const std::uint32_t seg_end = pdu.offset + static_cast<std::uint32_t>(pdu.data.size());
    for (const auto& [off, bytes] : p.chunks) {
        const std::uint32_t end = off + static_cast<std::uint32_t>(bytes.size());
        if (pdu.offset >= end || seg_end <= off) continue;  // disjoint
        if (pdu.offset == off && seg_end == end &&
            std::equal(bytes.begin(), bytes.end(), pdu.data.begin())) {
            counters_.duplicate_segments++;
            return std::nullopt;
        }
        // Partial overlap or content mismatch: inconsistent segmentation.
        counters_.inconsistent_discards++;
        partials_.erase(it);
        return std::nullopt;
    }

    if (pdu.last) {
        if (p.last_seen && p.total_len != seg_end) {
            counters_.inconsistent_discards++;
            partials_.erase(it);
            return std::nullopt;
        }
        p.last_seen = true;
        p.total_len = seg_end;
    } else if (p.last_seen && seg_end > p.total_len) {
        counters_.inconsistent_discards++;
        partials_.erase(it);
        return std::nullopt;
    }

    p.covered += static_cast<std::uint32_t>(pdu.data.size());
    p.chunks.emplace(pdu.offset, pdu.data);
    return try_complete(pdu.sn, p);
}

std::optional<PdcpPdu> RxEntity::try_complete(std::uint16_t sn, Partial& p) {
    if (!p.last_seen || p.covered != p.total_len) return std::nullopt;

    // Contiguity check: chunks are disjoint, so covering total_len bytes
    // starting from offset 0 means the whole PDU is present.
    if (p.chunks.empty() || p.chunks.begin()->first != 0) return std::nullopt;

    PdcpPdu out;
    const RlcPdu& h = p.header_template;
    out.bearer = h.bearer;
    out.sn = sn;
    out.compressed = h.compressed;
    out.ciphered = h.ciphered;
    out.seq = h.seq;
    out.created_at = h.created_at;
    out.payload.reserve(p.total_len);
    for (const auto& [off, bytes] : p.chunks) {
        out.payload.insert(out.payload.end(), bytes.begin(), bytes.end());
    }
    partials_.erase(sn);
    counters_.delivered++;
    return out;
}

void RxEntity::poll_timeouts(SimTime now) {
    for (auto it = partials_.begin(); it != partials_.end();) {
        if (now - it->second.started_at >= kRlcReassemblyTimeoutUs) {
            counters_.timeout_discards++;
            it = partials_.erase(it);
        } else {
            ++it;
        }
    }
}

}  // namespace ranstack::rlc
