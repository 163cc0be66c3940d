#include "ssv.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "rng.hpp"

namespace spinmu {

std::size_t BlockStructure::total_dim() const {
    std::size_t d = 0;
    for (const auto& b : blocks) d += b.rows;
    return d;
}

std::size_t BlockStructure::repeated_count() const {
    std::size_t c = 0;
    for (const auto& b : blocks)
        if (b.kind == BlockKind::RepeatedScalar) ++c;
    return c;
}

std::vector<std::size_t> BlockStructure::offsets() const {
    std::vector<std::size_t> off;
    off.reserve(blocks.size());
    std::size_t o = 0;
    for (const auto& b : blocks) {
        off.push_back(o);
        o += b.rows;
    }
    return off;
}

void BlockStructure::validate(std::size_t g_dim) const {
    if (blocks.empty()) throw ConfigError("block structure: no blocks");
    for (const auto& b : blocks) {
        if (b.rows == 0 || b.cols == 0) throw ConfigError("block structure: empty block");
        if (b.rows != b.cols)
            throw ConfigError("block structure: only square channels are supported");
    }
    if (total_dim() != g_dim)
        throw ConfigError("block structure: total dimension " + std::to_string(total_dim()) +
                          " does not match matrix dimension " + std::to_string(g_dim));
}

namespace {

Mat herm_exp(const Mat& x) {
    HermitianEig e = hermitian_eig(x);
    const std::size_t n = x.rows();
    Mat out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx acc{};
            for (std::size_t k = 0; k < n; ++k)
                acc += e.vectors(i, k) * std::exp(e.values[k]) * std::conj(e.vectors(j, k));
            out(i, j) = acc;
        }
    return out;
}

Mat block_diag(const std::vector<Mat>& parts) {
    std::size_t dim = 0;
    for (const auto& p : parts) dim += p.rows();
    Mat out = Mat::zero(dim, dim);
    std::size_t off = 0;
    for (const auto& p : parts) {
        out.set_block(off, off, p);
        off += p.rows();
    }
    return out;
}

Vec slice(const Vec& x, std::size_t off, std::size_t len) {
    return Vec(x.begin() + off, x.begin() + off + len);
}

Vec adjoint_times(const Mat& g, const Vec& x) {
    const std::size_t r = g.rows(), c = g.cols();
    Vec y(c, cplx{});
    for (std::size_t i = 0; i < r; ++i) {
        const cplx xi = x[i];
        for (std::size_t j = 0; j < c; ++j) y[j] += std::conj(g(i, j)) * xi;
    }
    return y;
}

// Best unit-norm structured Delta maximizing Re(y^H Delta x) channel by
// channel; (x, y) carry the right-eigenvector and G^H-left-eigenvector data
// of the current G Delta.
Mat aligned_delta(const BlockStructure& structure, const Vec& x, const Vec& y) {
    const auto off = structure.offsets();
    std::vector<Mat> parts;
    parts.reserve(structure.blocks.size());
    for (std::size_t c = 0; c < structure.blocks.size(); ++c) {
        const auto& b = structure.blocks[c];
        if (b.kind == BlockKind::RepeatedScalar) {
            cplx inner{};
            for (std::size_t i = 0; i < b.rows; ++i)
                inner += std::conj(y[off[c] + i]) * x[off[c] + i];
            cplx delta = std::abs(inner) > 1e-300 ? std::conj(inner) / std::abs(inner) : cplx(1.0);
            Mat part = Mat::identity(b.rows);
            part *= delta;
            parts.push_back(std::move(part));
        } else {
            Vec yc = slice(y, off[c], b.rows);
            Vec xc = slice(x, off[c], b.cols);
            const double ny = vec_norm(yc), nx = vec_norm(xc);
            Mat part = Mat::zero(b.rows, b.cols);
            if (ny * nx > 1e-300) {
                for (std::size_t i = 0; i < b.rows; ++i)
                    for (std::size_t j = 0; j < b.cols; ++j)
                        part(i, j) = yc[i] * std::conj(xc[j]) / (ny * nx);
            }
            parts.push_back(std::move(part));
        }
    }
    return block_diag(parts);
}

bool witness_is_valid(const Mat& g, const Mat& witness, double g_norm) {
    const std::size_t dim = g.rows();
    Mat test = Mat::identity(dim) - g * witness;
    const double tol = 1e-6 * std::pow(1.0 + g_norm, static_cast<double>(dim));
    return std::abs(determinant(test)) <= tol;
}

}  // namespace

UpperBound mu_upper_bound(const Mat& g, const BlockStructure& structure, const MuOptions& opts) {
    structure.validate(g.rows());
    const std::size_t dim = g.rows();
    const auto off = structure.offsets();
    const std::size_t nch = structure.blocks.size();

    UpperBound out;
    out.scaling = Mat::identity(dim);
    if (g.max_abs() == 0.0) return out;

    // per-channel scaling factors T and their inverses, updated multiplicatively
    std::vector<Mat> t(nch), tinv(nch);
    for (std::size_t c = 0; c < nch; ++c) {
        t[c] = Mat::identity(structure.blocks[c].rows);
        tinv[c] = Mat::identity(structure.blocks[c].rows);
    }

    auto scaled = [&](const std::vector<Mat>& tc, const std::vector<Mat>& tci) {
        return block_diag(tc) * g * block_diag(tci);
    };

    // Osborne balancing on per-channel scalars: equalize channel row and
    // column norms of the scaled matrix.
    if (nch > 1) {
        std::vector<double> s(nch, 1.0);
        for (int sweep = 0; sweep < 8; ++sweep) {
            for (std::size_t c = 0; c < nch; ++c) {
                double row2 = 0.0, col2 = 0.0;
                for (std::size_t l = 0; l < nch; ++l) {
                    if (l == c) continue;
                    double fr = (s[c] / s[l]) * g.block(off[c], off[l], structure.blocks[c].rows,
                                                        structure.blocks[l].rows)
                                    .frobenius_norm();
                    double fc = (s[l] / s[c]) * g.block(off[l], off[c], structure.blocks[l].rows,
                                                        structure.blocks[c].rows)
                                    .frobenius_norm();
                    row2 += fr * fr;
                    col2 += fc * fc;
                }
                if (row2 > 1e-300 && col2 > 1e-300)
                    s[c] *= std::pow(col2 / row2, 0.25);
            }
        }
        std::vector<Mat> t_osb(nch), tinv_osb(nch);
        for (std::size_t c = 0; c < nch; ++c) {
            t_osb[c] = Mat::identity(structure.blocks[c].rows);
            t_osb[c] *= cplx(s[c]);
            tinv_osb[c] = Mat::identity(structure.blocks[c].rows);
            tinv_osb[c] *= cplx(1.0 / s[c]);
        }
        if (max_singular_value(scaled(t_osb, tinv_osb)) < max_singular_value(g)) {
            t = std::move(t_osb);
            tinv = std::move(tinv_osb);
        }
    }

    Mat a = scaled(t, tinv);
    double f = max_singular_value(a);
    double best = std::min(f, max_singular_value(g));
    std::vector<Mat> best_t = t;

    double alpha_init = 0.5;
    int iter = 0;
    for (; iter < opts.upper_max_iters; ++iter) {
        Svd dec = svd(a);
        const double sigma = dec.sigma.front();
        if (sigma <= 0.0) break;
        Vec u(dim), v(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            u[i] = dec.u(i, 0);
            v[i] = std::conj(dec.vh(0, i));
        }

        // gradient of sigma_max under multiplicative Hermitian scaling updates
        std::vector<Mat> grad(nch);
        double gnorm2 = 0.0;
        for (std::size_t c = 0; c < nch; ++c) {
            const auto& b = structure.blocks[c];
            if (b.kind == BlockKind::RepeatedScalar) {
                Mat e(b.rows, b.rows);
                for (std::size_t i = 0; i < b.rows; ++i)
                    for (std::size_t j = 0; j < b.rows; ++j) {
                        cplx m = u[off[c] + i] * std::conj(u[off[c] + j]) -
                                 v[off[c] + i] * std::conj(v[off[c] + j]);
                        e(i, j) = sigma * m;
                    }
                // enforce Hermiticity against rounding
                Mat eh = e.adjoint();
                e += eh;
                e *= cplx(0.5);
                grad[c] = e;
            } else {
                double du = 0.0, dv = 0.0;
                for (std::size_t i = 0; i < b.rows; ++i) {
                    du += std::norm(u[off[c] + i]);
                    dv += std::norm(v[off[c] + i]);
                }
                Mat e = Mat::identity(b.rows);
                e *= cplx(sigma * (du - dv));
                grad[c] = e;
            }
            gnorm2 += grad[c].frobenius_norm() * grad[c].frobenius_norm();
        }
        const double gnorm = std::sqrt(gnorm2);
        if (gnorm <= 1e-14 * std::max(1.0, f)) break;

        bool accepted = false;
        double alpha = alpha_init;
        std::vector<Mat> t_new, tinv_new;
        double f_new = f;
        for (int ls = 0; ls < 30; ++ls) {
            std::vector<Mat> tt(nch), tti(nch);
            for (std::size_t c = 0; c < nch; ++c) {
                Mat y = grad[c];
                y *= cplx(-alpha / gnorm);
                tt[c] = herm_exp(y) * t[c];
                y *= cplx(-1.0);
                tti[c] = tinv[c] * herm_exp(y);
            }
            double trial = max_singular_value(scaled(tt, tti));
            if (trial <= f - 1e-4 * alpha * gnorm) {
                t_new = std::move(tt);
                tinv_new = std::move(tti);
                f_new = trial;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;

        const double rel = (f - f_new) / std::max(f, 1e-300);
        t = std::move(t_new);
        tinv = std::move(tinv_new);
        f = f_new;
        a = scaled(t, tinv);
        if (f < best) {
            best = f;
            best_t = t;
        }
        alpha_init = std::min(1.0, 2.0 * alpha);
        if (rel < opts.upper_rel_tol) break;
    }

    out.beta = best;
    out.scaling = block_diag(best_t);
    out.iterations = iter;
    return out;
}

LowerBound mu_lower_bound(const Mat& g, const BlockStructure& structure, const MuOptions& opts) {
    structure.validate(g.rows());
    const std::size_t dim = g.rows();

    LowerBound out;
    if (g.max_abs() == 0.0) {
        out.converged = true;
        return out;
    }
    const double g_norm = max_singular_value(g);

    auto consider = [&](const Mat& delta_unit, bool converged, int iters) {
        EigPair top = dominant_eigenpair(g * delta_unit);
        const double beta = std::abs(top.lambda);
        if (!(beta > out.beta)) return;
        Mat witness = delta_unit;
        witness *= cplx(1.0) / top.lambda;
        if (!witness_is_valid(g, witness, g_norm)) return;
        out.beta = beta;
        out.witness = std::move(witness);
        out.converged = converged;
        out.iterations = iters;
    };

    // Ascent on beta(Delta) = rho(G Delta): realign Delta from the dominant
    // left/right eigenvector pair, keep the best certified point. Restarts
    // handle the local maxima of mixed structures.
    auto ascend = [&](Mat delta) {
        double local_best = -1.0;
        Mat local_best_delta;
        bool converged = false;
        int stagnant = 0;
        int it = 0;
        for (; it < opts.lower_max_iters; ++it) {
            EigTriple t = dominant_eigentriple(g * delta);
            const double beta = std::abs(t.lambda);
            if (beta > local_best) {
                local_best = beta;
                local_best_delta = delta;
                stagnant = 0;
            } else if (++stagnant >= 3) {
                break;
            }
            if (beta <= 1e-300) break;
            Vec p = adjoint_times(g, t.left);  // G^H y, the left-side alignment data
            Mat next = aligned_delta(structure, t.right, p);
            const double diff = (next - delta).max_abs();
            delta = std::move(next);
            if (diff < opts.lower_residual_tol) {
                converged = true;
                break;
            }
        }
        if (local_best > 0.0) consider(local_best_delta, converged, it);
    };

    // rho-based seed: Delta = I is feasible for every structure
    consider(Mat::identity(dim), true, 0);
    ascend(Mat::identity(dim));

    // alignment of the top singular pair
    {
        Svd dec = svd(g);
        Vec v(dim), p(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            v[i] = std::conj(dec.vh(0, i));
            p[i] = dec.sigma.front() * v[i];
        }
        ascend(aligned_delta(structure, v, p));
    }

    // random structured restarts, seeded from the repeated-channel count
    Rng rng(Rng::mix(0x53564d55ULL, structure.repeated_count()));
    for (int r = 2; r < std::max(1, opts.lower_restarts); ++r) {
        Vec x(dim), p(dim);
        for (auto& e : x) e = cplx(rng.gaussian(), rng.gaussian());
        for (auto& e : p) e = cplx(rng.gaussian(), rng.gaussian());
        ascend(aligned_delta(structure, x, p));
    }
    return out;
}

namespace {

// ---- brute-force oracle -----------------------------------------------------
//
// Unit-norm structured directions are parameterized by phases (repeated
// scalars) and rank-one unit pairs (full blocks); the spectral radius of
// G * Delta over this compact set equals mu for complex structures.

constexpr double kTwoPi = 6.283185307179586476925287;

struct BfParam {
    double lo = 0.0;
    double hi = 0.0;
    bool periodic = false;
};

struct BfLayout {
    std::vector<BfParam> params;
    // per full block: index of first parameter; repeated blocks use one phase
    std::vector<int> first_param;  // per channel; -1 when the channel has none
    std::vector<bool> pin_phase;   // channel's leading phase pinned to zero
};

BfLayout bf_layout(const BlockStructure& structure) {
    BfLayout lay;
    bool pinned = false;
    for (const auto& b : structure.blocks) {
        lay.first_param.push_back(static_cast<int>(lay.params.size()));
        if (b.kind == BlockKind::RepeatedScalar) {
            if (!pinned) {
                lay.pin_phase.push_back(true);
                lay.first_param.back() = -1;
                pinned = true;
            } else {
                lay.pin_phase.push_back(false);
                lay.params.push_back({0.0, kTwoPi, true});
            }
        } else {
            const std::size_t m = b.rows;
            // u: m-1 polar angles, m-1 phases (leading component real)
            for (std::size_t i = 0; i + 1 < m; ++i) lay.params.push_back({0.0, 1.5707963267948966, false});
            for (std::size_t i = 0; i + 1 < m; ++i) lay.params.push_back({0.0, kTwoPi, true});
            // v: m-1 polar angles, then m phases; the global phase is pinned
            // once per structure
            for (std::size_t i = 0; i + 1 < m; ++i) lay.params.push_back({0.0, 1.5707963267948966, false});
            std::size_t vphases = m;
            if (!pinned) {
                vphases = m - 1;
                pinned = true;
                lay.pin_phase.push_back(true);
            } else {
                lay.pin_phase.push_back(false);
            }
            for (std::size_t i = 0; i < vphases; ++i) lay.params.push_back({0.0, kTwoPi, true});
        }
    }
    return lay;
}

Vec bf_unit_vector(std::size_t m, const double* polar, const double* phases, std::size_t nphases) {
    Vec u(m);
    double sines = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        double mag = sines;
        if (i + 1 < m) mag *= std::cos(polar[i]);
        if (i + 1 < m) sines *= std::sin(polar[i]);
        double phase = 0.0;
        if (m == 1) {
            phase = nphases > 0 ? phases[0] : 0.0;
        } else if (nphases == m) {  // global phase included: phases[0] on all, extra on i>=1
            phase = phases[0] + (i > 0 ? phases[i] : 0.0);
        } else {  // canonical: first component real
            phase = i > 0 ? phases[i - 1] : 0.0;
        }
        u[i] = std::polar(mag, phase);
    }
    return u;
}

Mat bf_delta(const BlockStructure& structure, const BfLayout& lay, const std::vector<double>& p) {
    std::vector<Mat> parts;
    parts.reserve(structure.blocks.size());
    for (std::size_t c = 0; c < structure.blocks.size(); ++c) {
        const auto& b = structure.blocks[c];
        int ip = lay.first_param[c];
        if (b.kind == BlockKind::RepeatedScalar) {
            double phase = lay.pin_phase[c] ? 0.0 : p[static_cast<std::size_t>(ip)];
            Mat part = Mat::identity(b.rows);
            part *= std::polar(1.0, phase);
            parts.push_back(std::move(part));
        } else {
            const std::size_t m = b.rows;
            std::size_t q = static_cast<std::size_t>(ip);
            const double* u_polar = p.data() + q;
            q += m - 1;
            const double* u_phase = p.data() + q;
            q += m - 1;
            const double* v_polar = p.data() + q;
            q += m - 1;
            const std::size_t v_nphases = lay.pin_phase[c] ? m - 1 : m;
            const double* v_phase = p.data() + q;

            Vec u = bf_unit_vector(m, u_polar, u_phase, m >= 1 ? m - 1 : 0);
            Vec v;
            if (lay.pin_phase[c]) {
                // no global phase: treat like canonical with m-1 phases
                v = bf_unit_vector(m, v_polar, v_phase, v_nphases == m ? m : m - 1);
            } else {
                v = bf_unit_vector(m, v_polar, v_phase, m);
            }
            Mat part(m, m);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j) part(i, j) = u[i] * std::conj(v[j]);
            parts.push_back(std::move(part));
        }
    }
    return block_diag(parts);
}

double bf_objective(const Mat& g, const BlockStructure& structure, const BfLayout& lay,
                    const std::vector<double>& p) {
    Mat delta = bf_delta(structure, lay, p);
    double best = 0.0;
    for (const auto& lam : eigenvalues(g * delta)) best = std::max(best, std::abs(lam));
    return best;
}

}  // namespace

double mu_brute_force(const Mat& g, const BlockStructure& structure,
                      const BruteForceOptions& opts) {
    structure.validate(g.rows());
    if (structure.total_dim() > 6)
        throw ConfigError("mu_brute_force: total dimension capped at 6");
    if (g.max_abs() == 0.0) return 0.0;

    BfLayout lay = bf_layout(structure);
    const std::size_t np = lay.params.size();
    if (np == 0) {
        std::vector<double> none;
        return bf_objective(g, structure, lay, none);
    }

    // grid density from the evaluation budget
    long per = static_cast<long>(std::floor(
        std::pow(static_cast<double>(std::max<long>(opts.max_evals, 100)), 1.0 / np)));
    per = std::clamp<long>(per, 3, 24);

    std::vector<long> counts(np, per);
    std::vector<double> steps(np);
    for (std::size_t k = 0; k < np; ++k) {
        const auto& pr = lay.params[k];
        steps[k] = pr.periodic ? (pr.hi - pr.lo) / counts[k]
                               : (pr.hi - pr.lo) / (counts[k] - 1);
    }

    std::vector<double> point(np, 0.0), best_point(np, 0.0);
    double best = -1.0;
    std::vector<long> idx(np, 0);
    for (;;) {
        for (std::size_t k = 0; k < np; ++k) point[k] = lay.params[k].lo + steps[k] * idx[k];
        double val = bf_objective(g, structure, lay, point);
        if (val > best) {
            best = val;
            best_point = point;
        }
        std::size_t k = 0;
        for (; k < np; ++k) {
            if (++idx[k] < counts[k]) break;
            idx[k] = 0;
        }
        if (k == np) break;
    }

    // coordinate refinement around the best grid point
    std::vector<double> step = steps;
    for (int round = 0; round < opts.refine_rounds; ++round) {
        bool improved = false;
        for (std::size_t k = 0; k < np; ++k) {
            for (double sgn : {+1.0, -1.0}) {
                std::vector<double> trial = best_point;
                trial[k] += sgn * step[k];
                const auto& pr = lay.params[k];
                if (pr.periodic) {
                    while (trial[k] >= pr.hi) trial[k] -= (pr.hi - pr.lo);
                    while (trial[k] < pr.lo) trial[k] += (pr.hi - pr.lo);
                } else {
                    trial[k] = std::clamp(trial[k], pr.lo, pr.hi);
                }
                double val = bf_objective(g, structure, lay, trial);
                if (val > best) {
                    best = val;
                    best_point = std::move(trial);
                    improved = true;
                }
            }
        }
        if (!improved) {
            double max_step = 0.0;
            for (std::size_t k = 0; k < np; ++k) {
                step[k] *= 0.5;
                max_step = std::max(max_step, step[k]);
            }
            if (max_step < 1e-5) break;
        }
    }
    return best;
}

MuResult compute_mu(const Mat& g, const BlockStructure& structure, const MuOptions& opts) {
    structure.validate(g.rows());
    LowerBound lb = mu_lower_bound(g, structure, opts);
    UpperBound ub = mu_upper_bound(g, structure, opts);

    MuResult r;
    r.lower = lb.beta;
    r.upper = ub.beta;
    r.witness = lb.witness;
    r.witness_norm = lb.beta > 0.0 ? 1.0 / lb.beta : 0.0;
    r.scaling = ub.scaling;
    r.converged = lb.converged;
    r.iterations = lb.iterations + ub.iterations;
    return r;
}

MuResult robust_performance_mu(const GMatrix& g, const BlockStructure& uncertainty,
                               const MuOptions& opts) {
    uncertainty.validate(g.g11.rows());
    BlockStructure augmented = uncertainty;
    augmented.blocks.push_back(UncertaintyBlock::full(g.n, g.n));
    return compute_mu(g.assembled(), augmented, opts);
}

}  // namespace spinmu
