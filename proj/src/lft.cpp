#include "lft.hpp"

#include <sstream>

#include "errors.hpp"

namespace spinmu {

OutputMatrix output_matrix(const TransferProblem& prob) {
    prob.validate();
    OutputMatrix out;
    out.out_spin = prob.out_spin;
    out.c = Mat::identity(static_cast<std::size_t>(prob.n));
    const std::size_t row = static_cast<std::size_t>(prob.out_spin - 1);
    for (std::size_t j = 0; j < out.c.cols(); ++j) out.c(row, j) = 0.0;
    return out;
}

Mat resolvent(const Mat& h, cplx s0) {
    if (h.rows() != h.cols()) throw ConfigError("resolvent: H must be square");
    const std::size_t n = h.rows();
    Mat a = kImag * h;
    for (std::size_t i = 0; i < n; ++i) a(i, i) += s0;

    const double cond = cond_1(a);
    if (!(cond < 1e12)) {
        std::ostringstream msg;
        msg << "resolvent: s0 I + iH is singular or near-singular at s0 = (" << s0.real() << ", "
            << s0.imag() << "); H has an eigenvalue at i*s0. Evaluate at an offset instead, "
            << "e.g. --s0-offset 1e-6.";
        throw NumericalError(msg.str());
    }
    return inverse(a);
}

Mat PlantMatrix::block(int row, int col) const {
    const std::size_t cd = channel_dim();
    const std::size_t off[4] = {0, 0, cd, cd + n};
    const std::size_t size[4] = {0, cd, n, n};
    return p.block(off[row], off[col], size[row], size[col]);
}

PlantMatrix build_plant(const Mat& h, const OutputMatrix& c,
                        const std::vector<PerturbationStructure>& structures, cplx s0) {
    if (structures.empty()) throw ConfigError("build_plant: at least one structure required");
    const std::size_t n = h.rows();
    if (c.c.rows() != n || c.c.cols() != n)
        throw ConfigError("build_plant: output matrix dimension mismatch");

    PlantMatrix out;
    out.n = n;
    out.channels = structures.size();
    out.s0 = s0;

    Mat phi = resolvent(h, s0);
    Mat cphi = c.c * phi;

    const std::size_t j_n = out.channels * n;
    const std::size_t total = j_n + 2 * n;
    out.p = Mat::zero(total, total);

    // channel rows: zeta_j = i S_j psi, so -iS_jPhi on every v column and
    // +iS_jPhi on the w and u columns
    for (std::size_t j = 0; j < out.channels; ++j) {
        const auto& s = structures[j];
        if (s.s.rows() != n || s.s.cols() != n)
            throw ConfigError("build_plant: structure dimension mismatch for " + s.label);
        Mat is_phi = kImag * (s.s * phi);
        Mat neg = cplx(-1.0, 0.0) * is_phi;
        for (std::size_t l = 0; l < out.channels; ++l) out.p.set_block(j * n, l * n, neg);
        out.p.set_block(j * n, j_n, is_phi);
        out.p.set_block(j * n, j_n + n, is_phi);
        out.structure_labels.push_back(s.label);
        out.channel_kinds.push_back(s.kind);
        out.channel_sites.push_back(s.site);
    }

    // z row
    Mat neg_cphi = cplx(-1.0, 0.0) * cphi;
    for (std::size_t l = 0; l < out.channels; ++l) out.p.set_block(j_n, l * n, neg_cphi);
    out.p.set_block(j_n, j_n, cphi);
    out.p.set_block(j_n, j_n + n, cphi);

    // psi row
    Mat neg_phi = cplx(-1.0, 0.0) * phi;
    for (std::size_t l = 0; l < out.channels; ++l) out.p.set_block(j_n + n, l * n, neg_phi);
    out.p.set_block(j_n + n, j_n, phi);
    out.p.set_block(j_n + n, j_n + n, phi);

    return out;
}

Mat GMatrix::assembled() const {
    const std::size_t cd = g11.rows();
    Mat g(cd + n, cd + n);
    g.set_block(0, 0, g11);
    g.set_block(0, cd, g12);
    g.set_block(cd, 0, g21);
    g.set_block(cd, cd, g22);
    return g;
}

GMatrix absorb_controller(const PlantMatrix& p, const BiasField& d) {
    const std::size_t n = p.n;
    if (d.size() != n) throw ConfigError("absorb_controller: bias dimension mismatch");

    Mat id_feedback(n, n);  // iD
    for (std::size_t i = 0; i < n; ++i) id_feedback(i, i) = kImag * d[i];

    Mat p33 = p.block(3, 3);
    Mat loop = Mat::identity(n) + p33 * id_feedback;
    if (!(cond_1(loop) < 1e12))
        throw NumericalError("absorb_controller: I + P33 iD is singular");
    Mat m = id_feedback * inverse(loop);  // iD (I + P33 iD)^{-1}

    Mat p13 = p.block(1, 3), p31 = p.block(3, 1), p32 = p.block(3, 2), p23 = p.block(2, 3);

    GMatrix g;
    g.n = n;
    g.channels = p.channels;
    g.s0 = p.s0;
    g.structure_labels = p.structure_labels;
    g.g11 = p.block(1, 1) - p13 * m * p31;
    g.g12 = p.block(1, 2) - p13 * m * p32;
    g.g21 = p.block(2, 1) - p23 * m * p31;
    g.g22 = p.block(2, 2) - p23 * m * p32;

    // leakage channels expose the product delta_kk * D_k as channel gain
    for (std::size_t j = 0; j < p.channels; ++j) {
        if (p.channel_kinds[j] != PerturbationKind::Leakage) continue;
        const double scale = d[static_cast<std::size_t>(p.channel_sites[j] - 1)];
        for (std::size_t r = j * n; r < (j + 1) * n; ++r) {
            for (std::size_t col = 0; col < g.g11.cols(); ++col) g.g11(r, col) *= scale;
            for (std::size_t col = 0; col < g.g12.cols(); ++col) g.g12(r, col) *= scale;
        }
    }
    return g;
}

Mat closed_loop_tzw(const GMatrix& g, const Mat& delta) {
    const std::size_t cd = g.g11.rows();
    if (delta.rows() != cd || delta.cols() != cd)
        throw ConfigError("closed_loop_tzw: Delta dimension mismatch");
    Mat loop = Mat::identity(cd) - g.g11 * delta;
    if (!(cond_1(loop) < 1e12))
        throw NumericalError("closed_loop_tzw: I - G11 Delta is singular (at the mu boundary)");
    // z = G21 v + G22 w with v = Delta (I - G11 Delta)^{-1} G12 w
    return g.g22 + g.g21 * delta * inverse(loop) * g.g12;
}

}  // namespace spinmu
