#include "ranstack/pdcp.hpp"

#include <algorithm>

#include "ranstack/rng.hpp"

namespace ranstack::pdcp {

void cipher_in_place(Bytes& payload, const Key& key, std::uint16_t sn) {
    std::uint64_t seed = fnv1a64(key.data(), key.size());
    seed = fnv1a64(&sn, sizeof(sn), seed);
    Rng stream(seed);
    std::size_t i = 0;
    while (i < payload.size()) {
        std::uint64_t word = stream.next_u64();
        for (int b = 0; b < 8 && i < payload.size(); ++b, ++i) {
            payload[i] ^= static_cast<std::uint8_t>(word >> (8 * b));
        }
    }
}

Bytes upper_header_for(std::string_view bearer_id) {
    Rng stream(fnv1a64(bearer_id) ^ 0x5c5c5c5c5c5c5c5cULL);
    Bytes header(kUpperHeaderBytes);
    for (auto& byte : header) byte = static_cast<std::uint8_t>(stream.next_u64() & 0xff);
    return header;
}

PdcpEntity::PdcpEntity(std::uint32_t bearer, std::string_view bearer_id)
    : bearer_(bearer),
      upper_header_(upper_header_for(bearer_id)),
      header_tag_(static_cast<std::uint32_t>(fnv1a64(bearer_id))) {}

PdcpPdu PdcpEntity::tx(const Sdu& sdu) {
    PdcpPdu pdu;
    pdu.bearer = bearer_;
    pdu.sn = static_cast<std::uint16_t>(tx_next_ % kPdcpSnSpace);
    pdu.seq = tx_next_;
    pdu.created_at = sdu.created_at;
    ++tx_next_;

    // Header compression: strip the modeled 40-byte upper header down to a
    // 4-byte context tag when it matches the bearer context; anything else
    // travels uncompressed.
    const bool matches =
        sdu.payload.size() >= upper_header_.size() &&
        std::equal(upper_header_.begin(), upper_header_.end(), sdu.payload.begin());
    if (matches && !upper_header_.empty()) {
        pdu.compressed = true;
        pdu.payload.reserve(sdu.payload.size() - kUpperHeaderBytes + kCompressedHeaderBytes);
        for (int i = 0; i < kCompressedHeaderBytes; ++i) {
            pdu.payload.push_back(static_cast<std::uint8_t>(header_tag_ >> (8 * i)));
        }
        pdu.payload.insert(pdu.payload.end(), sdu.payload.begin() + kUpperHeaderBytes,
                           sdu.payload.end());
    } else {
        pdu.compressed = false;
        pdu.payload = sdu.payload;
    }

    cipher_in_place(pdu.payload, key_, pdu.sn);
    pdu.ciphered = true;

    retransmit_buffer_.emplace(pdu.seq, pdu);
    if (retransmit_buffer_.size() > static_cast<std::size_t>(kPdcpWindow)) {
        retransmit_buffer_.erase(retransmit_buffer_.begin());
        counters_.unconfirmed_evicted++;
    }
    return pdu;
}

Sdu PdcpEntity::to_sdu(const PdcpPdu& pdu) const {
    Sdu sdu;
    sdu.bearer = pdu.bearer;
    sdu.seq = pdu.seq;
    sdu.created_at = pdu.created_at;
    Bytes payload = pdu.payload;
    if (pdu.ciphered) cipher_in_place(payload, key_, pdu.sn);
    if (pdu.compressed) {
        sdu.payload = upper_header_;
        sdu.payload.insert(sdu.payload.end(), payload.begin() + kCompressedHeaderBytes,
                           payload.end());
    } else {
        sdu.payload = std::move(payload);
    }
    return sdu;
}

void PdcpEntity::prune_skipped() {
    const std::uint64_t window_start =
        rx_deliv_ > static_cast<std::uint64_t>(kPdcpWindow) ? rx_deliv_ - kPdcpWindow : 0;
    while (!skipped_.empty() && *skipped_.begin() < window_start) {
        skipped_.erase(skipped_.begin());
    }
}

void PdcpEntity::deliver_ready(RxResult& out) {
    auto it = reorder_buffer_.begin();
    while (it != reorder_buffer_.end() && it->first == rx_deliv_) {
        out.delivered.push_back(to_sdu(it->second));
        ++rx_deliv_;
        counters_.delivered++;
        it = reorder_buffer_.erase(it);
    }
    prune_skipped();
}

void PdcpEntity::update_timer(SimTime now) {
    const bool gap = !reorder_buffer_.empty() && reorder_buffer_.begin()->first > rx_deliv_;
    if (gap) {
        if (!reorder_deadline_) {
            reorder_deadline_ = now + kPdcpReorderingUs;
            ++reorder_epoch_;
        }
    } else if (reorder_deadline_) {
        reorder_deadline_.reset();
        ++reorder_epoch_;
    }
}

PdcpEntity::RxResult PdcpEntity::rx(const PdcpPdu& pdu, SimTime now) {
    RxResult out;

    // Map the 12-bit wire SN to an absolute position relative to rx_deliv_:
    // the window ahead is new data, the half behind is duplicate/late.
    const auto d = static_cast<std::uint64_t>(
        (pdu.sn + kPdcpSnSpace - static_cast<int>(rx_deliv_ % kPdcpSnSpace)) % kPdcpSnSpace);
    if (d < static_cast<std::uint64_t>(kPdcpWindow)) {
        const std::uint64_t abs = rx_deliv_ + d;
        if (reorder_buffer_.count(abs)) {
            counters_.duplicates_discarded++;
            return out;
        }
        reorder_buffer_.emplace(abs, pdu);
        deliver_ready(out);
        counters_.reorder_peak_depth = std::max<std::int64_t>(
            counters_.reorder_peak_depth, static_cast<std::int64_t>(reorder_buffer_.size()));
        update_timer(now);
        return out;
    }

    // Behind the delivery edge: everything there was delivered unless the
    // reordering timer skipped it.
    const std::uint64_t back = kPdcpSnSpace - d;
    if (back > rx_deliv_) {
        counters_.late_discarded++;  // before the start of the stream
        return out;
    }
    const std::uint64_t abs = rx_deliv_ - back;
    if (skipped_.count(abs)) {
        counters_.late_discarded++;
    } else {
        counters_.duplicates_discarded++;
    }
    return out;
}

PdcpEntity::RxResult PdcpEntity::on_reorder_expiry(SimTime now, std::uint64_t epoch) {
    RxResult out;
    if (epoch != reorder_epoch_ || !reorder_deadline_) return out;
    reorder_deadline_.reset();
    ++reorder_epoch_;
    if (reorder_buffer_.empty()) return out;

    // Jump the delivery edge past the gap; the skipped SNs are lost.
    const std::uint64_t first = reorder_buffer_.begin()->first;
    while (rx_deliv_ < first) {
        skipped_.insert(rx_deliv_);
        ++rx_deliv_;
        counters_.gaps_skipped++;
    }
    deliver_ready(out);
    update_timer(now);
    return out;
}

void PdcpEntity::confirm(std::uint64_t seq) { retransmit_buffer_.erase(seq); }

std::vector<PdcpPdu> PdcpEntity::handover_flush() const {
    std::vector<PdcpPdu> out;
    out.reserve(retransmit_buffer_.size());
    for (const auto& [seq, pdu] : retransmit_buffer_) out.push_back(pdu);
    return out;
}

}  // namespace ranstack::pdcp
