#pragma once

#include <span>

#include "ranstack/domain.hpp"
#include "ranstack/rng.hpp"

namespace ranstack::phy {

// Log-distance path loss anchored at the 1 m free-space reference:
// PL = 20*log10(f_MHz) - 27.55 + 10*n*log10(d), n per band class.
// Distances below 1 m clamp to the reference point.
double path_loss_db(double distance_m, double freq_mhz, BandClass band);

double path_loss_exponent(BandClass band);

// Thermal noise floor for the carrier bandwidth plus receiver noise figure.
double noise_floor_dbm(double bandwidth_mhz, double noise_figure_db);

double rx_power_dbm(double tx_power_dbm, double path_loss_db);

// Linear-domain SINR: rx / (noise + sum of interferer rx), returned in dB.
double sinr_db(double rx_dbm, std::span<const double> interferer_rx_dbm, double noise_dbm);

// Bits per resource unit at the given SINR (0 below the lowest step).
int se_bits_per_ru(const SeCurve& curve, double sinr_db);

// Transport block capacity for one TTI on this carrier at this SINR.
std::int64_t tb_capacity_bits(const RatProfile& rat, const CarrierCfg& carrier, double sinr_db);

// Stepwise block error rate: bler_at_boundary at the SINR threshold of the
// active SE step, decaying one decade per bler_decade_per_db dB of margin,
// floored at bler_floor. Undefined below the lowest non-zero step (the MAC
// never transmits there: capacity is 0).
double bler(const SeCurve& curve, double sinr_db, const PhyParams& params);

// Per-link view the MAC hands to transmit().
struct LinkState {
    std::uint32_t ue = 0;
    std::uint32_t cell = 0;
    std::uint32_t carrier = 0;
    double sinr_db = 0.0;
    bool ideal = false;                     // bypasses stochastic loss entirely
    std::optional<double> fixed_loss_prob;  // pins the loss probability when set
    SimTime updated_at = 0;
};

enum class TxOutcome { DELIVERED, LOST };

// Bernoulli transport-block outcome. Oversized blocks are a MAC bug, not a
// radio condition, and are rejected hard.
TxOutcome transmit(std::int64_t tb_bits, std::int64_t capacity_bits, const LinkState& link,
                   const SeCurve& curve, const PhyParams& params, Rng& rng);

}  // namespace ranstack::phy
