#pragma once

#include <string>
#include <vector>

#include "dynamics.hpp"
#include "linalg.hpp"
#include "network.hpp"

namespace spinmu {

// Square error-selection matrix: identity with the OUT row zeroed, so that
// z = C psi spans |OUT>-perp and ||C psi||^2 + |psi_out|^2 = 1 for unit psi.
struct OutputMatrix {
    Mat c;
    int out_spin = 0;  // 1-based
};

OutputMatrix output_matrix(const TransferProblem& prob);

// Phi = (s0 I + i H)^{-1}. Throws NumericalError when s0 I + iH is singular
// or has 1-norm condition above 1e12; the message suggests an s0 offset.
Mat resolvent(const Mat& h, cplx s0);

// Open-loop plant over signals (zeta_1..zeta_J, z, psi) x (v_1..v_J, w, u),
// one zeta/v channel per perturbation structure; every block is n x n.
// Leakage channels are stored unscaled here; the D_k gain is applied when the
// controller is absorbed.
struct PlantMatrix {
    std::size_t n = 0;
    std::size_t channels = 0;
    Mat p;  // assembled ((J+2)n) x ((J+2)n)
    cplx s0{};
    std::vector<std::string> structure_labels;
    std::vector<PerturbationKind> channel_kinds;
    std::vector<int> channel_sites;

    std::size_t channel_dim() const { return channels * n; }
    Mat block11() const { return p.block(0, 0, channel_dim(), channel_dim()); }
    Mat block(int row, int col) const;  // 1..3 block coordinates (v|w|u)
};

PlantMatrix build_plant(const Mat& h, const OutputMatrix& c,
                        const std::vector<PerturbationStructure>& structures, cplx s0);

// Controller-absorbed plant mapping (v, w) -> (zeta, z).
struct GMatrix {
    Mat g11, g12, g21, g22;
    cplx s0{};
    std::size_t n = 0;
    std::size_t channels = 0;
    std::vector<std::string> structure_labels;

    Mat assembled() const;  // [[g11, g12], [g21, g22]]
};

// G_ij = P_ij - P_i3 iD (I + P_33 iD)^{-1} P_3j, the virtual feedback
// u = -iD psi folded into the plant. Leakage channel rows pick up their D_k
// gain here.
GMatrix absorb_controller(const PlantMatrix& p, const BiasField& d);

// Upper LFT closing v = Delta zeta: T_zw = G22 + G21 Delta (I - G11 Delta)^{-1} G12.
Mat closed_loop_tzw(const GMatrix& g, const Mat& delta);

}  // namespace spinmu
