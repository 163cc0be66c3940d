#include "synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace spinmu {

namespace {

struct Box {
    std::vector<double> lo, hi;

    std::vector<double> clamp(std::vector<double> x) const {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::min(hi[i], std::max(lo[i], x[i]));
        return x;
    }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Objective for the minimizer: -(p - w_t * t) with x = (D_1..D_N, t).
struct Objective {
    const Mat& h;
    const TransferProblem& prob;
    double time_penalty;

    double eval(const std::vector<double>& x, std::vector<double>& grad) const {
        const std::size_t n = x.size() - 1;
        BiasField d(x.begin(), x.begin() + n);
        const double t = x.back();
        FidelityEval fe = fidelity_with_gradient(h, d, prob, t);
        grad.resize(x.size());
        for (std::size_t k = 0; k < n; ++k) grad[k] = -fe.dp_dd[k];
        grad[n] = -(fe.dp_dt - time_penalty);
        return -(fe.p - time_penalty * t);
    }
};

// Projected BFGS with Armijo backtracking. The landscape is rugged and the
// box is rarely active, so a dense inverse-Hessian update with projection of
// trial points is enough; stalls simply leave a low-quality local optimum.
struct LocalResult {
    std::vector<double> x;
    double f = 0.0;
};

LocalResult minimize_projected_bfgs(const Objective& obj, std::vector<double> x, const Box& box,
                                    int max_iters, double grad_tol) {
    const std::size_t dim = x.size();
    x = box.clamp(std::move(x));

    std::vector<double> grad;
    double f = obj.eval(x, grad);

    std::vector<std::vector<double>> hinv(dim, std::vector<double>(dim, 0.0));
    auto reset_hinv = [&] {
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) hinv[i][j] = (i == j) ? 1.0 : 0.0;
    };
    reset_hinv();

    for (int iter = 0; iter < max_iters; ++iter) {
        // projected-gradient stationarity
        std::vector<double> step_pt(dim);
        for (std::size_t i = 0; i < dim; ++i) step_pt[i] = x[i] - grad[i];
        step_pt = box.clamp(std::move(step_pt));
        double pg = 0.0;
        for (std::size_t i = 0; i < dim; ++i) pg += (x[i] - step_pt[i]) * (x[i] - step_pt[i]);
        if (std::sqrt(pg) <= grad_tol) break;

        std::vector<double> dir(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) dir[i] -= hinv[i][j] * grad[j];
        if (dot(dir, grad) >= 0.0) {
            reset_hinv();
            for (std::size_t i = 0; i < dim; ++i) dir[i] = -grad[i];
        }

        double alpha = 1.0;
        bool accepted = false;
        std::vector<double> xt, gradt;
        double ft = 0.0;
        for (int ls = 0; ls < 40; ++ls) {
            std::vector<double> cand(dim);
            for (std::size_t i = 0; i < dim; ++i) cand[i] = x[i] + alpha * dir[i];
            cand = box.clamp(std::move(cand));
            std::vector<double> disp(dim);
            for (std::size_t i = 0; i < dim; ++i) disp[i] = cand[i] - x[i];
            if (norm2(disp) < 1e-15) break;
            ft = obj.eval(cand, gradt);
            if (ft <= f + 1e-4 * dot(grad, disp)) {
                xt = std::move(cand);
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;

        std::vector<double> s(dim), y(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            s[i] = xt[i] - x[i];
            y[i] = gradt[i] - grad[i];
        }
        const double sy = dot(s, y);
        if (sy > 1e-12 * norm2(s) * norm2(y)) {
            // inverse BFGS update: (I - s y^T / sy) Hinv (I - y s^T / sy) + s s^T / sy
            const double rho = 1.0 / sy;
            std::vector<double> hy(dim, 0.0);
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j < dim; ++j) hy[i] += hinv[i][j] * y[j];
            const double yhy = dot(y, hy);
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j < dim; ++j)
                    hinv[i][j] += rho * rho * yhy * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]) +
                                  rho * s[i] * s[j];
        }

        x = std::move(xt);
        grad = std::move(gradt);
        f = ft;
    }
    return {std::move(x), f};
}

}  // namespace

ControllerEnsemble synthesize(const SpinNetworkSpec& spec, const TransferProblem& prob, int count,
                              std::uint64_t seed, const SynthOptions& opts) {
    spec.validate();
    prob.validate();
    if (prob.n != spec.n) throw ConfigError("synthesize: problem size does not match network");
    if (count < 1) throw ConfigError("synthesize: count must be >= 1");
    if (!(opts.bias_bound > 0.0)) throw ConfigError("synthesize: bias bound must be positive");
    const double t_max = opts.effective_t_max(spec.n);
    if (!(opts.t_min > 0.0) || !(opts.t_min < t_max))
        throw ConfigError("synthesize: need 0 < t_min < t_max");

    const Mat h = build_hamiltonian(spec);
    const std::size_t n = static_cast<std::size_t>(spec.n);

    Box box;
    box.lo.assign(n + 1, -opts.bias_bound);
    box.hi.assign(n + 1, opts.bias_bound);
    box.lo[n] = opts.t_min;
    box.hi[n] = t_max;

    const double t_restart_hi = std::min(2.0 * spec.n, t_max);
    const Objective obj{h, prob, opts.time_penalty};

    std::vector<Controller> raw(static_cast<std::size_t>(count));
    parallel_for(static_cast<std::size_t>(count), [&](std::size_t m) {
        Rng rng(Rng::mix(seed, m));
        std::vector<double> x0(n + 1);
        for (std::size_t k = 0; k < n; ++k)
            x0[k] = rng.uniform(-opts.restart_bias_range, opts.restart_bias_range);
        x0[n] = rng.uniform(opts.t_min, t_restart_hi);

        LocalResult res = minimize_projected_bfgs(obj, std::move(x0), box, opts.max_iters,
                                                  opts.grad_tol);
        Controller c;
        c.d.assign(res.x.begin(), res.x.begin() + n);
        c.t_f = res.x.back();
        c.p_tf = transfer_probability(h, c.d, prob, c.t_f);  // penalty-free fidelity
        c.p_avg = time_averaged_probability(h, c.d, prob);
        raw[m] = std::move(c);
    });

    std::stable_sort(raw.begin(), raw.end(),
                     [](const Controller& a, const Controller& b) { return a.p_tf > b.p_tf; });
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i].m = static_cast<int>(i) + 1;

    ControllerEnsemble ens;
    ens.spec = spec;
    ens.problem = prob;
    ens.controllers = std::move(raw);
    ens.seed = seed;
    ens.opts = opts;
    ens.avg_rank = rank_by_time_average(ens.controllers);
    return ens;
}

std::vector<int> rank_by_time_average(const std::vector<Controller>& controllers) {
    const std::size_t m = controllers.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return controllers[a].p_avg > controllers[b].p_avg;
    });
    std::vector<int> rank(m, 0);
    for (std::size_t r = 0; r < m; ++r) rank[order[r]] = static_cast<int>(r) + 1;
    return rank;
}

}  // namespace spinmu
