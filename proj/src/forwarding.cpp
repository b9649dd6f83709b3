#include "ranstack/forwarding.hpp"

#include <algorithm>

namespace ranstack::fwd {

std::vector<double> split_weights(const std::vector<PathEstimate>& estimates) {
    std::vector<double> weights(estimates.size(), 0.0);
    if (estimates.empty()) return weights;
    double total = 0.0;
    for (const auto& e : estimates) total += std::max(e.ewma_rate_bps, 0.0);
    if (total <= 0.0) {
        std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(estimates.size()));
        return weights;
    }
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        weights[i] = std::max(estimates[i].ewma_rate_bps, 0.0) / total;
    }
    return weights;
}

std::vector<std::size_t> Dispatcher::active_indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < tunnels_.size(); ++i) {
        if (tunnels_[i].active) idx.push_back(i);
    }
    return idx;
}

std::vector<std::size_t> Dispatcher::dispatch(const PdcpPdu& pdu, Rng& rng) {
    const auto active = active_indices();
    if (active.empty()) {
        if (held_.size() >= static_cast<std::size_t>(kDispatchHoldQueueLimit)) {
            counters_.overflow_drops++;
            return {};
        }
        held_.push_back(pdu);
        counters_.held++;
        return {};
    }

    counters_.dispatched++;
    std::vector<std::size_t> placements;
    switch (mode_) {
        case DispatchMode::SINGLE:
        case DispatchMode::AUTO:  // resolved by RRM before traffic flows; fall back to primary
            placements.push_back(active.front());
            break;
        case DispatchMode::SPLIT: {
            std::vector<PathEstimate> est;
            est.reserve(active.size());
            for (auto i : active) est.push_back(tunnels_[i].estimate);
            const auto weights = split_weights(est);
            const double u = rng.uniform();
            double acc = 0.0;
            std::size_t chosen = active.back();
            for (std::size_t k = 0; k < active.size(); ++k) {
                acc += weights[k];
                if (u < acc) {
                    chosen = active[k];
                    break;
                }
            }
            placements.push_back(chosen);
            break;
        }
        case DispatchMode::DUPLICATE:
            placements = active;
            break;
    }
    counters_.placements += static_cast<std::int64_t>(placements.size());
    return placements;
}

void Dispatcher::confirm(std::size_t tunnel_index, std::int64_t bits, bool delivered, SimTime now,
                         double delay_ms) {
    auto& est = tunnels_.at(tunnel_index).estimate;
    const SimTime dt = now - est.last_update;
    est.last_update = now;
    if (dt <= 0) return;
    const double sample_rate = delivered ? static_cast<double>(bits) / us_to_s(dt) : 0.0;
    if (!est.has_sample) {
        est.ewma_rate_bps = kPathEstimateAlpha * sample_rate;
        est.ewma_delay_ms = delivered ? delay_ms : 0.0;
        est.has_sample = true;
    } else {
        est.ewma_rate_bps =
            kPathEstimateAlpha * sample_rate + (1.0 - kPathEstimateAlpha) * est.ewma_rate_bps;
        if (delivered) {
            est.ewma_delay_ms =
                kPathEstimateAlpha * delay_ms + (1.0 - kPathEstimateAlpha) * est.ewma_delay_ms;
        }
    }
}

std::vector<PdcpPdu> Dispatcher::take_held() {
    std::vector<PdcpPdu> out(held_.begin(), held_.end());
    held_.clear();
    return out;
}

}  // namespace ranstack::fwd
