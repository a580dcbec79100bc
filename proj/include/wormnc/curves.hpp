#pragma once

#include <cstddef>
#include <vector>

#include "wormnc/rational.hpp"

namespace wormnc {

/// Leaky-bucket envelope: value at t > 0 is sigma + rho * t.
struct ArrivalCurve {
    Rat sigma;  // burst, flits
    Rat rho;    // long-term rate, flits/cycle

    ArrivalCurve(Rat sigma_, Rat rho_);
};

/// Rate-latency guarantee: value is rate * max(0, t - latency).
struct ServiceCurve {
    Rat rate;     // flits/cycle, > 0
    Rat latency;  // cycles, >= 0

    ServiceCurve(Rat rate_, Rat latency_);
};

struct DelayBound {
    Rat cycles;
};

/// Maximum horizontal deviation h(alpha, beta): sigma / R + T.
DelayBound horizontal_deviation(const ArrivalCurve& alpha, const ServiceCurve& beta);

/// Maximum vertical deviation v(alpha, beta): sigma + rho * T, in flits.
Rat backlog_bound(const ArrivalCurve& alpha, const ServiceCurve& beta);

/// Deconvolution of an affine curve by a rate-latency curve:
/// (sigma + rho * T, rho).
ArrivalCurve output_curve(const ArrivalCurve& alpha, const ServiceCurve& beta);

/// One node of a left-over service computation. `standalone_blocking` is the
/// per-node blocking term added once for the path (flit-preemption or packet
/// blocking, depending on the caller's policy); `serialization_blocking` is
/// the term used inside each interferer's serialization sum.
struct PmooNode {
    Rat rate;
    Rat latency;
    Rat standalone_blocking;
    Rat serialization_blocking;
};

/// One interferer of same-or-higher priority. `shared_nodes` indexes into the
/// node sequence passed alongside; the burst is the interferer's burst at its
/// first convergence node, counted exactly once.
struct PmooInterferer {
    Rat burst_at_convergence;
    Rat rho;
    std::vector<std::size_t> shared_nodes;
};

/// Left-over rate-latency curve over a node sequence under non-preemptive FP
/// multiplexing, paying each interferer's burst once at its convergence point.
/// Throws UnstableSystem when a residual rate is not positive.
ServiceCurve pmoo_left_over(const std::vector<PmooNode>& nodes,
                            const std::vector<PmooInterferer>& interferers);

}  // namespace wormnc
