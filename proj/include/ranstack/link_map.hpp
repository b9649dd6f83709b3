#pragma once

#include <vector>

#include "ranstack/domain.hpp"

namespace ranstack {

// Flattened radio geometry consumed by the SINR fill kernel. One entry per
// carrier instance across all cells; `cochannel` lists the other instances
// that interfere (same center frequency, different cell).
struct LinkGeometry {
    std::vector<Position> ue_positions;
    struct CarrierGeom {
        Position cell_position;
        double tx_power_dbm = 0.0;
        double freq_mhz = 0.0;
        BandClass band = BandClass::MID;
        double noise_dbm = 0.0;
        std::vector<std::uint32_t> cochannel;
    };
    std::vector<CarrierGeom> carriers;
};

// Output: sinr_db[ue * carriers.size() + carrier].
using LinkMatrix = std::vector<double>;

// Serial reference implementation, kept for testing the parallel kernel.
void fill_link_matrix_serial(const LinkGeometry& geom, LinkMatrix& out);

// OpenMP kernel. Every matrix entry is an independent pure-function
// evaluation, so the result is bit-identical to the serial reference under
// any thread count or schedule.
void fill_link_matrix_parallel(const LinkGeometry& geom, LinkMatrix& out);

// Dispatches to the parallel kernel for large matrices, serial otherwise.
void fill_link_matrix(const LinkGeometry& geom, LinkMatrix& out);

}  // namespace ranstack
