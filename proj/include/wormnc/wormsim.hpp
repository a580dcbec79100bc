#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wormnc/platform.hpp"

namespace wormnc {

/// Per-flow periodic injection: the flow wakes at its offset, releases its
/// whole packet burst back-to-back, then one packet per period (the maximal
/// schedule that stays inside the flow's leaky-bucket envelope).
struct TrafficSchedule {
    std::uint64_t seed = 0;
    std::int64_t horizon = 0;            // injection horizon; 0 = auto (>= 5 packets per flow)
    std::vector<std::int64_t> offsets;   // per flow, in [0, P_f); empty = drawn from seed
    int runs = 0;                        // sweep runs, when read from a schedule file
};

enum class SimEvent : std::uint8_t { Inject, Arrive, Forward, Deliver, Alloc, Release, Stall, Wait };

const char* sim_event_name(SimEvent e);

struct TraceEvent {
    std::int64_t cycle;
    NodeId node;
    int vc;
    int flow_id;
    SimEvent event;
};

struct FlowSimStats {
    std::vector<Rat> delays;  // per delivered packet, injection of head to delivery of tail
    Rat max_delay{0};
    std::int64_t flits_injected = 0;
    std::int64_t flits_delivered = 0;
    std::int64_t packets_released = 0;
    std::int64_t packets_delivered = 0;
};

struct SimResult {
    std::vector<FlowSimStats> flows;  // by flow index
    std::vector<std::int64_t> offsets_used;
    std::int64_t cycles_run = 0;
};

/// Cycle-accurate wormhole simulation: per (router, input, VC) buffers,
/// preemptive fixed priority across VCs at flit granularity with bypass,
/// round-robin packet arbitration within a VC, credit-limited forwarding at
/// R^r flits/cycle with T^r pipeline cycles per node. Runs past the horizon
/// until every injected packet drains. Throws DeadlockDetected if nothing
/// moves for a full detection window while packets remain.
SimResult simulate(const Config& config, const TrafficSchedule& schedule,
                   std::vector<TraceEvent>* trace = nullptr);

struct TightnessOptions {
    int runs = 1;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::int64_t horizon = 0;  // 0 = auto
};

struct TightnessResult {
    std::vector<Rat> max_delay;   // per flow, over all runs
    std::vector<Rat> bound;       // per flow
    std::vector<double> tau;      // max_delay / bound
    double avg_tau = 0;
};

/// Repeated simulation with per-run random offsets; checks every observed
/// delay against the per-flow analytic bound and throws SafetyViolation on
/// the first exceedance (scanned in run order).
TightnessResult tightness_sweep(const Config& config, const std::vector<Rat>& bounds,
                                const TightnessOptions& options);

void write_trace_csv(const std::vector<TraceEvent>& trace, const Config& config,
                     const std::string& path);

}  // namespace wormnc
