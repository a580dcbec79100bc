#include "wormnc/curves.hpp"

#include <stdexcept>
#include <string>

#include "wormnc/errors.hpp"

namespace wormnc {

ArrivalCurve::ArrivalCurve(Rat sigma_, Rat rho_) : sigma(std::move(sigma_)), rho(std::move(rho_)) {
    if (sigma < 0) throw std::invalid_argument("arrival curve burst must be non-negative");
    if (rho < 0) throw std::invalid_argument("arrival curve rate must be non-negative");
}

ServiceCurve::ServiceCurve(Rat rate_, Rat latency_) : rate(std::move(rate_)), latency(std::move(latency_)) {
    if (rate <= 0) throw std::invalid_argument("service curve rate must be positive");
    if (latency < 0) throw std::invalid_argument("service curve latency must be non-negative");
}

namespace {

void require_stable(const ArrivalCurve& alpha, const ServiceCurve& beta) {
    if (alpha.rho > beta.rate)
        throw UnstableSystem("service curve", rat_to_double(beta.rate - alpha.rho),
                             "arrival rate " + rat_to_string(alpha.rho) +
                                 " exceeds service rate " + rat_to_string(beta.rate));
}

}  // namespace

DelayBound horizontal_deviation(const ArrivalCurve& alpha, const ServiceCurve& beta) {
    require_stable(alpha, beta);
    return DelayBound{alpha.sigma / beta.rate + beta.latency};
}

Rat backlog_bound(const ArrivalCurve& alpha, const ServiceCurve& beta) {
    require_stable(alpha, beta);
    return alpha.sigma + alpha.rho * beta.latency;
}

ArrivalCurve output_curve(const ArrivalCurve& alpha, const ServiceCurve& beta) {
    require_stable(alpha, beta);
    return ArrivalCurve(alpha.sigma + alpha.rho * beta.latency, alpha.rho);
}

ServiceCurve pmoo_left_over(const std::vector<PmooNode>& nodes,
                            const std::vector<PmooInterferer>& interferers) {
    if (nodes.empty()) throw std::invalid_argument("left-over service over empty node sequence");

    // Residual rate: min over nodes of (R^r - sum of crossing interferer rates).
    std::vector<Rat> residual;
    residual.reserve(nodes.size());
    for (const auto& n : nodes) residual.push_back(n.rate);
    for (const auto& it : interferers)
        for (std::size_t idx : it.shared_nodes) residual.at(idx) -= it.rho;

    Rat rate = residual[0];
    std::size_t argmin = 0;
    for (std::size_t i = 1; i < residual.size(); ++i)
        if (residual[i] < rate) {
            rate = residual[i];
            argmin = i;
        }
    if (rate <= 0)
        throw UnstableSystem("node #" + std::to_string(argmin), rat_to_double(rate),
                             "residual service rate is not positive");

    Rat latency(0);
    for (const auto& n : nodes) latency += n.latency + n.standalone_blocking;
    for (const auto& it : interferers) {
        Rat serialization(0);
        for (std::size_t idx : it.shared_nodes)
            serialization += nodes[idx].latency + nodes[idx].serialization_blocking;
        latency += (it.burst_at_convergence + it.rho * serialization) / rate;
    }
    return ServiceCurve(rate, latency);
}

}  // namespace wormnc
