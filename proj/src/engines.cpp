#include "pteem/engines.hpp"

namespace pteem {

MoveBudget move_budget(Algorithm alg, long long burnin, long long ring_init, long long kept,
                       int chains, double p_ee) {
    if (burnin <= 0 || kept <= 0) throw config_error("move budget: burnin and kept must be positive");
    if (chains < 2) throw config_error("move budget: need at least 2 chains");
    MoveBudget budget;
    if (alg == Algorithm::pt || alg == Algorithm::pteem) {
        budget.local = static_cast<double>(chains) * static_cast<double>(kept + burnin);
        budget.global = static_cast<double>(kept + burnin);
        return budget;
    }
    if (ring_init <= 0) throw config_error("move budget: ring_init must be positive");
    if (!(p_ee >= 0.0) || !(p_ee < 1.0))
        throw config_error("move budget: jump probability must lie in [0, 1)");
    double K = chains;
    double BR = static_cast<double>(burnin + ring_init);
    double MR = static_cast<double>(kept - ring_init);
    double bracket = K * (K - 1.0) / 2.0 * BR + (K - 1.0) * MR;
    budget.local = K * BR + MR + (1.0 - p_ee) * bracket;
    budget.global = p_ee * bracket;
    return budget;
}

MoveBudget move_budget_ees_example(long long burnin, long long ring_init, long long kept,
                                   int chains, double p_ee) {
    if (burnin <= 0 || kept <= 0 || ring_init <= 0)
        throw config_error("move budget: counts must be positive");
    if (chains < 2) throw config_error("move budget: need at least 2 chains");
    if (!(p_ee >= 0.0) || !(p_ee < 1.0))
        throw config_error("move budget: jump probability must lie in [0, 1)");
    double K = chains;
    double BR = static_cast<double>(burnin + ring_init);
    double M = static_cast<double>(kept);
    double bracket = K * (K - 1.0) / 2.0 * BR + (K - 1.0) * M;
    MoveBudget budget;
    budget.local = K * BR + M + (1.0 - p_ee) * bracket;
    budget.global = p_ee * bracket;
    return budget;
}

} // namespace pteem
