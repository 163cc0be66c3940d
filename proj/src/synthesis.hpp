#pragma once

#include <cstdint>
#include <vector>

#include "dynamics.hpp"
#include "network.hpp"

namespace spinmu {

struct Controller {
    BiasField d;
    double t_f = 0.0;
    double p_tf = 0.0;   // squared fidelity at t_f
    double p_avg = 0.0;  // time-averaged squared fidelity
    int m = 0;           // 1-based index after sorting by descending p_tf
};

struct SynthOptions {
    double bias_bound = 100.0;  // box [-B, B] per bias entry
    double t_min = 0.1;
    double t_max = 0.0;  // <= 0 means the 5N default
    int max_iters = 250;
    double grad_tol = 1e-6;
    double time_penalty = 0.0;         // w_t in the objective p - w_t * t
    double restart_bias_range = 10.0;  // initial D ~ U[-r, r]^N

    double effective_t_max(int n) const { return t_max > 0.0 ? t_max : 5.0 * n; }
};

struct ControllerEnsemble {
    SpinNetworkSpec spec;
    TransferProblem problem;
    std::vector<Controller> controllers;  // descending p_tf
    std::vector<int> avg_rank;            // avg_rank[i] = rank of controllers[i] by p_avg
    std::uint64_t seed = 0;
    SynthOptions opts;
};

// Multistart local maximization of p(D, t) - w_t * t over the box, one
// independent deterministic restart per member. Failed runs stay in the
// ensemble; the robustness studies need the low-fidelity tail.
ControllerEnsemble synthesize(const SpinNetworkSpec& spec, const TransferProblem& prob, int count,
                              std::uint64_t seed, const SynthOptions& opts = {});

// Permutation I: I[i] is the 1-based rank of controllers[i] when reordered by
// descending time-averaged probability. Ties break by list position.
std::vector<int> rank_by_time_average(const std::vector<Controller>& controllers);

}  // namespace spinmu
