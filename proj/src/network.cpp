#include "network.hpp"

#include <string>

#include "errors.hpp"

namespace spinmu {

void SpinNetworkSpec::validate() const {
    if (n < 2) throw ConfigError("network: n must be >= 2, got " + std::to_string(n));
    if (topology == Topology::Ring && n < 3)
        throw ConfigError("network: rings need n >= 3, got " + std::to_string(n));
}

Mat build_hamiltonian(const SpinNetworkSpec& spec) {
    spec.validate();
    const std::size_t n = static_cast<std::size_t>(spec.n);
    Mat h(n, n);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h(k, k + 1) = 1.0;
        h(k + 1, k) = 1.0;
    }
    if (spec.topology == Topology::Ring) {
        h(0, n - 1) = 1.0;
        h(n - 1, 0) = 1.0;
    }
    if (spec.coupling == CouplingModel::XXX)
        for (std::size_t k = 0; k < n; ++k) h(k, k) += 1.0;
    return h;
}

PerturbationStructure coupling_structure(const SpinNetworkSpec& spec, int k) {
    spec.validate();
    const int n = spec.n;
    if (k < 1 || k > n)
        throw ConfigError("coupling_structure: k out of range 1.." + std::to_string(n));
    if (k == n && spec.topology == Topology::Chain)
        throw ConfigError("coupling_structure: chain has no (1," + std::to_string(n) +
                          ") closure coupling");

    PerturbationStructure out;
    out.kind = PerturbationKind::Coupling;
    out.site = k;
    out.s = Mat::zero(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    int a = k, b = (k == n) ? 1 : k + 1;  // 1-based pair, (1,n) for the ring closure
    out.s(static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1)) = 1.0;
    out.s(static_cast<std::size_t>(b - 1), static_cast<std::size_t>(a - 1)) = 1.0;
    out.label = "coupling(" + std::to_string(std::min(a, b)) + "," + std::to_string(std::max(a, b)) + ")";
    return out;
}

PerturbationStructure leakage_structure(const SpinNetworkSpec& spec, int k) {
    spec.validate();
    const int n = spec.n;
    if (k < 1 || k > n)
        throw ConfigError("leakage_structure: k out of range 1.." + std::to_string(n));

    PerturbationStructure out;
    out.kind = PerturbationKind::Leakage;
    out.site = k;
    out.s = Mat::zero(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    out.s(static_cast<std::size_t>(k - 1), static_cast<std::size_t>(k - 1)) = -1.0;
    // Spill to the missing neighbor at a chain end is dropped, not renormalized.
    if (spec.topology == Topology::Ring) {
        int left = (k == 1) ? n : k - 1;
        int right = (k == n) ? 1 : k + 1;
        out.s(static_cast<std::size_t>(left - 1), static_cast<std::size_t>(left - 1)) += 0.5;
        out.s(static_cast<std::size_t>(right - 1), static_cast<std::size_t>(right - 1)) += 0.5;
    } else {
        if (k > 1) out.s(static_cast<std::size_t>(k - 2), static_cast<std::size_t>(k - 2)) += 0.5;
        if (k < n) out.s(static_cast<std::size_t>(k), static_cast<std::size_t>(k)) += 0.5;
    }
    out.label = "leakage(" + std::to_string(k) + ")";
    return out;
}

Mat total_hamiltonian(const Mat& h, const BiasField& d,
                      const std::vector<AppliedPerturbation>& perturbations) {
    if (h.rows() != h.cols()) throw ConfigError("total_hamiltonian: H must be square");
    if (!d.empty() && d.size() != h.rows())
        throw ConfigError("total_hamiltonian: bias length does not match H");
    Mat out = h;
    for (std::size_t i = 0; i < d.size(); ++i) out(i, i) += d[i];
    for (const auto& p : perturbations) {
        if (p.structure.s.rows() != h.rows() || p.structure.s.cols() != h.cols())
            throw ConfigError("total_hamiltonian: structure dimension mismatch for " +
                              p.structure.label);
        out += cplx(p.magnitude * p.scale, 0.0) * p.structure.s;
    }
    return out;
}

std::string topology_name(Topology t) { return t == Topology::Chain ? "chain" : "ring"; }
std::string coupling_name(CouplingModel c) { return c == CouplingModel::XX ? "xx" : "xxx"; }

Topology topology_from_name(const std::string& name) {
    if (name == "chain") return Topology::Chain;
    if (name == "ring") return Topology::Ring;
    throw ConfigError("unknown topology '" + name + "' (expected chain|ring)");
}

CouplingModel coupling_from_name(const std::string& name) {
    if (name == "xx") return CouplingModel::XX;
    if (name == "xxx") return CouplingModel::XXX;
    throw ConfigError("unknown coupling '" + name + "' (expected xx|xxx)");
}

}  // namespace spinmu
