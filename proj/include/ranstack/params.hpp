#pragma once

#include <cstdint>

#include "ranstack/common.hpp"

namespace ranstack {

// Modeled wire costs and protocol timers. These are the constants every
// analytic throughput/latency oracle is derived from; change them and the
// golden numbers in the test suites move with them.

// Each SDU is assumed to start with a modeled 40-byte upper-protocol header;
// header compression replaces it with a 4-byte context tag.
constexpr int kUpperHeaderBytes = 40;
constexpr int kCompressedHeaderBytes = 4;

constexpr int kPdcpHeaderBytes = 3;      // 12-bit SN + flags
constexpr int kRlcSegHeaderBytes = 4;    // sn/offset/length/last, flat cost
constexpr int kMacSubheaderBytes = 4;    // channel id + length per contained PDU

constexpr int kPdcpSnSpace = 4096;       // 12-bit sequence numbers
constexpr int kPdcpWindow = 2048;
constexpr SimTime kPdcpReorderingUs = 50 * kUsPerMs;

constexpr SimTime kRlcReassemblyTimeoutUs = 100 * kUsPerMs;

constexpr int kHarqProcesses = 8;
constexpr int kHarqMaxTx = 4;
constexpr int kHarqFeedbackTtis = 1;

constexpr SimTime kSibPeriodUs = 80 * kUsPerMs;
constexpr SimTime kSignalingDelayUs = 1 * kUsPerMs;

constexpr double kDefaultA3OffsetDb = 3.0;
constexpr double kDefaultTimeToTriggerMs = 160.0;

constexpr double kPathEstimateAlpha = 0.2;
constexpr int kDispatchHoldQueueLimit = 10000;

constexpr SimTime kQosEvalPeriodUs = 100 * kUsPerMs;
constexpr double kQosRateFactor = 0.9;  // escalate when measured < factor * target
constexpr int kRadioMapStalePeriods = 2;

constexpr SimTime kMobilityUpdateUs = 10 * kUsPerMs;

constexpr double kThermalNoiseDbmPerHz = -174.0;

// Path-loss exponents per band class (LOW/MID/HIGH).
constexpr double kPathLossExponentLow = 2.7;
constexpr double kPathLossExponentMid = 3.0;
constexpr double kPathLossExponentHigh = 3.5;

// Full-buffer sources keep at least this many bytes queued in the stack.
constexpr std::int64_t kFullBufferWatermarkBytes = 300000;

}  // namespace ranstack
