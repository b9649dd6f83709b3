#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ranstack {

// Simulation clock. All layer timers are quantized to microseconds.
using SimTime = std::int64_t;

constexpr SimTime kUsPerMs = 1000;
constexpr SimTime kUsPerSec = 1000000;

inline SimTime ms_to_us(double ms) { return static_cast<SimTime>(ms * kUsPerMs); }
inline double us_to_ms(SimTime us) { return static_cast<double>(us) / kUsPerMs; }
inline double us_to_s(SimTime us) { return static_cast<double>(us) / kUsPerSec; }

// Thrown on protocol bugs: invalid state transitions, feedback for idle
// HARQ processes, oversized transport blocks. These are programming errors,
// not simulation outcomes.
class ProtocolError : public std::logic_error {
public:
    explicit ProtocolError(const std::string& what) : std::logic_error(what) {}
};

// Thrown when a run detects an invariant violation (in-order violation,
// conservation audit failure) and --keep-going is not set.
class SimAbort : public std::runtime_error {
public:
    explicit SimAbort(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ranstack
