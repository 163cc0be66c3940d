#pragma once

#include <cstddef>
#include <vector>

#include "lft.hpp"
#include "linalg.hpp"

namespace spinmu {

enum class BlockKind { RepeatedScalar, FullComplex };

struct UncertaintyBlock {
    BlockKind kind = BlockKind::FullComplex;
    std::size_t rows = 0;
    std::size_t cols = 0;

    static UncertaintyBlock repeated_scalar(std::size_t dim) {
        return {BlockKind::RepeatedScalar, dim, dim};
    }
    static UncertaintyBlock full(std::size_t rows, std::size_t cols) {
        return {BlockKind::FullComplex, rows, cols};
    }
};

// Ordered block-diagonal uncertainty set: delta_i I blocks and full complex
// blocks. Only square channels are supported (everything the toolkit builds
// is square).
struct BlockStructure {
    std::vector<UncertaintyBlock> blocks;

    std::size_t total_dim() const;
    std::size_t repeated_count() const;
    std::vector<std::size_t> offsets() const;  // start index of each channel
    void validate(std::size_t g_dim) const;    // throws ConfigError on mismatch
};

struct MuOptions {
    int lower_restarts = 10;
    int lower_max_iters = 500;
    double lower_residual_tol = 1e-9;
    int upper_max_iters = 200;
    double upper_rel_tol = 1e-6;
};

struct MuResult {
    double lower = 0.0;
    double upper = 0.0;
    Mat witness;                // structured, ||witness|| = 1/lower; empty when lower = 0
    double witness_norm = 0.0;  // 0 when no witness
    Mat scaling;                // block-diagonal D achieving the upper bound
    bool converged = true;
    int iterations = 0;
};

// min over admissible scalings of sigma_max(D G D^{-1}): full invertible
// blocks on repeated-scalar channels, positive scalars on full channels.
// Always a valid upper bound; sigma_max(G) is the fallback.
struct UpperBound {
    double beta = 0.0;
    Mat scaling;
    int iterations = 0;
};
UpperBound mu_upper_bound(const Mat& g, const BlockStructure& structure,
                          const MuOptions& opts = {});

// Power/alignment iteration for a destabilizing perturbation. The returned
// witness satisfies det(I - G witness) = 0 up to eigensolver accuracy and
// ||witness|| = 1/beta.
struct LowerBound {
    double beta = 0.0;
    Mat witness;
    bool converged = false;
    int iterations = 0;
};
LowerBound mu_lower_bound(const Mat& g, const BlockStructure& structure,
                          const MuOptions& opts = {});

struct BruteForceOptions {
    long max_evals = 200000;  // grid budget; density derives from this
    int refine_rounds = 80;
};

// Independent oracle: grid + coordinate refinement over unit-norm structured
// directions, maximizing the spectral radius of G * Delta. Dimension capped
// at 6.
double mu_brute_force(const Mat& g, const BlockStructure& structure,
                      const BruteForceOptions& opts = {});

MuResult compute_mu(const Mat& g, const BlockStructure& structure, const MuOptions& opts = {});

// Appends the full performance block (n x n) to the uncertainty structure,
// assembles G as one square matrix, and evaluates mu over the augmented set.
MuResult robust_performance_mu(const GMatrix& g, const BlockStructure& uncertainty,
                               const MuOptions& opts = {});

}  // namespace spinmu
