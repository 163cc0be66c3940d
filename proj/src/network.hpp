#pragma once

#include <string>
#include <vector>

#include "linalg.hpp"

namespace spinmu {

enum class Topology { Chain, Ring };
enum class CouplingModel { XX, XXX };

// Homogeneous spin network restricted to the single-excitation subspace.
// Couplings are nominally 1; XXX adds the identity to the XX matrix.
struct SpinNetworkSpec {
    int n = 0;
    Topology topology = Topology::Chain;
    CouplingModel coupling = CouplingModel::XX;

    void validate() const;  // throws ConfigError: n >= 2, rings need n >= 3
};

using BiasField = std::vector<double>;  // diagonal entries D_1..D_N

enum class PerturbationKind { Coupling, Leakage };

// Fixed Hermitian direction S of a structured Hamiltonian error delta*S.
// Coupling: 1 at (k,k+1) and (k+1,k), ring closure pair (1,n) for k = n.
// Leakage: -1 at (k,k), +1/2 at the neighbors that receive the spill.
struct PerturbationStructure {
    std::string label;
    Mat s;
    PerturbationKind kind = PerturbationKind::Coupling;
    int site = 0;  // the k the structure was built from (1-based)
};

struct AppliedPerturbation {
    PerturbationStructure structure;
    double magnitude = 0.0;  // delta
    double scale = 1.0;      // 1 for coupling, D_k for leakage of bias k
};

Mat build_hamiltonian(const SpinNetworkSpec& spec);

PerturbationStructure coupling_structure(const SpinNetworkSpec& spec, int k);
PerturbationStructure leakage_structure(const SpinNetworkSpec& spec, int k);

// H + diag(d) + sum of delta*scale*S over the applied perturbations.
Mat total_hamiltonian(const Mat& h, const BiasField& d,
                      const std::vector<AppliedPerturbation>& perturbations);

std::string topology_name(Topology t);
std::string coupling_name(CouplingModel c);
Topology topology_from_name(const std::string& name);
CouplingModel coupling_from_name(const std::string& name);

}  // namespace spinmu
