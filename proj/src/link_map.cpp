#include "ranstack/link_map.hpp"

#include "ranstack/phy.hpp"

namespace ranstack {

namespace {

inline double entry_sinr(const LinkGeometry& geom, std::size_t ue, std::size_t car) {
    const auto& c = geom.carriers[car];
    const Position& up = geom.ue_positions[ue];
    const double pl = phy::path_loss_db(distance_m(up, c.cell_position), c.freq_mhz, c.band);
    const double rx = phy::rx_power_dbm(c.tx_power_dbm, pl);
    double denom_mw = std::pow(10.0, c.noise_dbm / 10.0);
    for (std::uint32_t j : c.cochannel) {
        const auto& ic = geom.carriers[j];
        const double ipl =
            phy::path_loss_db(distance_m(up, ic.cell_position), ic.freq_mhz, ic.band);
        denom_mw += std::pow(10.0, (ic.tx_power_dbm - ipl) / 10.0);
    }
    return rx - 10.0 * std::log10(denom_mw);
}

}  // namespace

void fill_link_matrix_serial(const LinkGeometry& geom, LinkMatrix& out) {
    const std::size_t n_ue = geom.ue_positions.size();
    const std::size_t n_car = geom.carriers.size();
    out.resize(n_ue * n_car);
    for (std::size_t u = 0; u < n_ue; ++u) {
        for (std::size_t c = 0; c < n_car; ++c) {
            out[u * n_car + c] = entry_sinr(geom, u, c);
        }
    }
}

void fill_link_matrix_parallel(const LinkGeometry& geom, LinkMatrix& out) {
    const std::size_t n_ue = geom.ue_positions.size();
    const std::size_t n_car = geom.carriers.size();
    out.resize(n_ue * n_car);
    const auto total = static_cast<std::int64_t>(n_ue * n_car);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < total; ++i) {
        const std::size_t u = static_cast<std::size_t>(i) / n_car;
        const std::size_t c = static_cast<std::size_t>(i) % n_car;
        out[i] = entry_sinr(geom, u, c);
    }
}

void fill_link_matrix(const LinkGeometry& geom, LinkMatrix& out) {
    const std::size_t entries = geom.ue_positions.size() * geom.carriers.size();
    if (entries >= 4096) {
        fill_link_matrix_parallel(geom, out);
    } else {
        fill_link_matrix_serial(geom, out);
    }
}

}  // namespace ranstack
