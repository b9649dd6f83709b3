#include "ranstack/phy.hpp"

#include <algorithm>
#include <cmath>

#include "ranstack/params.hpp"

namespace ranstack::phy {

double path_loss_exponent(BandClass band) {
    switch (band) {
        case BandClass::LOW: return kPathLossExponentLow;
        case BandClass::MID: return kPathLossExponentMid;
        case BandClass::HIGH: return kPathLossExponentHigh;
    }
    return kPathLossExponentMid;
}

double path_loss_db(double distance_m, double freq_mhz, BandClass band) {
    const double d = std::max(distance_m, 1.0);
    const double fspl_1m = 20.0 * std::log10(freq_mhz) - 27.55;
    return fspl_1m + 10.0 * path_loss_exponent(band) * std::log10(d);
}

double noise_floor_dbm(double bandwidth_mhz, double noise_figure_db) {
    return kThermalNoiseDbmPerHz + 10.0 * std::log10(bandwidth_mhz * 1e6) + noise_figure_db;
}

double rx_power_dbm(double tx_power_dbm, double path_loss_db) {
    return tx_power_dbm - path_loss_db;
}

namespace {
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }
}  // namespace

double sinr_db(double rx_dbm, std::span<const double> interferer_rx_dbm, double noise_dbm) {
    double denom_mw = dbm_to_mw(noise_dbm);
    for (double i : interferer_rx_dbm) denom_mw += dbm_to_mw(i);
    return mw_to_dbm(dbm_to_mw(rx_dbm) / denom_mw);
}

int se_bits_per_ru(const SeCurve& curve, double sinr_db) {
    int bits = 0;
    for (const auto& step : curve) {
        if (sinr_db >= step.sinr_db) bits = step.bits_per_ru;
        else break;
    }
    return bits;
}

std::int64_t tb_capacity_bits(const RatProfile& rat, const CarrierCfg& carrier, double sinr_db) {
    const auto resource_units =
        static_cast<std::int64_t>(rat.resource_units_per_mhz * carrier.bandwidth_mhz);
    return resource_units * se_bits_per_ru(rat.se_curve, sinr_db);
}

double bler(const SeCurve& curve, double sinr_db, const PhyParams& params) {
    // Boundary of the active (highest satisfied) step.
    double boundary = curve.empty() ? 0.0 : curve.front().sinr_db;
    for (const auto& step : curve) {
        if (sinr_db >= step.sinr_db) boundary = step.sinr_db;
        else break;
    }
    const double margin = sinr_db - boundary;
    const double p = params.bler_at_boundary * std::pow(10.0, -margin / params.bler_decade_per_db);
    return std::clamp(p, params.bler_floor, params.bler_at_boundary);
}

TxOutcome transmit(std::int64_t tb_bits, std::int64_t capacity_bits, const LinkState& link,
                   const SeCurve& curve, const PhyParams& params, Rng& rng) {
    if (tb_bits > capacity_bits) {
        throw ProtocolError("transport block exceeds link capacity (" + std::to_string(tb_bits) +
                            " > " + std::to_string(capacity_bits) + " bits)");
    }
    if (link.ideal) return TxOutcome::DELIVERED;
    const double loss =
        link.fixed_loss_prob ? *link.fixed_loss_prob : bler(curve, link.sinr_db, params);
    return rng.bernoulli(loss) ? TxOutcome::LOST : TxOutcome::DELIVERED;
}

}  // namespace ranstack::phy
