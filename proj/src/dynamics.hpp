#pragma once

#include <optional>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "network.hpp"

namespace spinmu {

struct TransferProblem {
    int in_spin = 1;   // 1-based, |IN> = e_in
    int out_spin = 1;  // 1-based, |OUT> = e_out
    int n = 0;

    void validate() const;
};

// d p / d delta at delta = 0 for one perturbation direction, plus its
// logarithmic form value / (1 - p). log_value is absent when p is within
// 1e-12 of 1 (the division blows up; serialized as null/empty downstream).
struct SensitivityRecord {
    double value = 0.0;
    std::optional<double> log_value;
    std::string structure_label;
    double t = 0.0;
    double p = 0.0;  // squared fidelity the record was taken at
};

// exp(-i h t) psi0 via Hermitian eigendecomposition. Throws NumericalError
// when h deviates from Hermitian by more than 1e-12.
Vec propagate(const Mat& h_total, const Vec& psi0, double t);

// |<out| exp(-i (H + diag d) t) |in>|^2
double transfer_probability(const Mat& h, const BiasField& d, const TransferProblem& prob,
                            double t);

// Long-run mean of p(t), in closed form from eigenprojections onto distinct
// eigenvalues of H + diag d. Eigenvalues closer than 1e-9 * max(1, ||H||_F)
// are merged into one projection.
double time_averaged_probability(const Mat& h, const BiasField& d, const TransferProblem& prob);

// Trapezoidal (1/T) integral of p(t) over [0, T] with `steps` intervals.
// Numeric oracle for the closed form above.
double windowed_average_probability(const Mat& h, const BiasField& d, const TransferProblem& prob,
                                    double big_t, int steps);

// Exact derivative of the squared fidelity in the direction scale * S via the
// Daleckii-Krein divided-difference kernel of the matrix exponential.
SensitivityRecord differential_sensitivity(const Mat& h, const BiasField& d,
                                           const PerturbationStructure& s, double scale,
                                           const TransferProblem& prob, double t);

// Squared fidelity with its full gradient, for the synthesis optimizer.
// One eigendecomposition serves p, dp/dt, and all dp/dD_k.
struct FidelityEval {
    double p = 0.0;
    double dp_dt = 0.0;
    std::vector<double> dp_dd;
};
FidelityEval fidelity_with_gradient(const Mat& h, const BiasField& d, const TransferProblem& prob,
                                    double t);

}  // namespace spinmu
