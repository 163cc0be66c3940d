#include "dynamics.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"

namespace spinmu {

namespace {

constexpr double kHermTol = 1e-12;
constexpr double kDegenerateGap = 1e-9;  // Daleckii-Krein limit kicks in below this
constexpr double kLogSensCutoff = 1e-12;

void check_hermitian(const Mat& a, const char* who) {
    if (a.rows() != a.cols()) throw NumericalError(std::string(who) + ": matrix not square");
    if (a.hermiticity_defect() > kHermTol)
        throw NumericalError(std::string(who) + ": matrix deviates from Hermitian beyond 1e-12");
}

Mat controlled(const Mat& h, const BiasField& d) {
    return total_hamiltonian(h, d, {});
}

// Components of |IN> and |OUT> in the eigenbasis: o_i = conj(V(out,i)),
// q_i = conj(V(in,i)), so that <out|f(A)|in> = sum_i conj(o_i) f(lambda_i) q_i.
struct EigenAmplitudes {
    HermitianEig eig;
    Vec o, q;
};

EigenAmplitudes amplitudes(const Mat& a, const TransferProblem& prob) {
    prob.validate();
    if (static_cast<std::size_t>(prob.n) != a.rows())
        throw ConfigError("transfer problem size does not match Hamiltonian");
    EigenAmplitudes out{hermitian_eig(a), {}, {}};
    const std::size_t n = a.rows();
    const std::size_t in = static_cast<std::size_t>(prob.in_spin - 1);
    const std::size_t os = static_cast<std::size_t>(prob.out_spin - 1);
    out.o.resize(n);
    out.q.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.o[i] = std::conj(out.eig.vectors(os, i));
        out.q[i] = std::conj(out.eig.vectors(in, i));
    }
    return out;
}

cplx amplitude_at(const EigenAmplitudes& ea, double t) {
    cplx a{};
    for (std::size_t i = 0; i < ea.o.size(); ++i)
        a += std::conj(ea.o[i]) * std::exp(cplx(0.0, -ea.eig.values[i] * t)) * ea.q[i];
    return a;
}

}  // namespace

void TransferProblem::validate() const {
    if (n < 1) throw ConfigError("transfer problem: n must be positive");
    if (in_spin < 1 || in_spin > n || out_spin < 1 || out_spin > n)
        throw ConfigError("transfer problem: spins must lie in 1.." + std::to_string(n));
}

Vec propagate(const Mat& h_total, const Vec& psi0, double t) {
    check_hermitian(h_total, "propagate");
    if (psi0.size() != h_total.rows()) throw ConfigError("propagate: state dimension mismatch");
    if (!std::isfinite(t)) throw ConfigError("propagate: t must be finite");

    HermitianEig eig = hermitian_eig(h_total);
    const std::size_t n = psi0.size();
    Vec coeffs(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx c{};
        for (std::size_t j = 0; j < n; ++j) c += std::conj(eig.vectors(j, i)) * psi0[j];
        coeffs[i] = c * std::exp(cplx(0.0, -eig.values[i] * t));
    }
    Vec out(n);
    for (std::size_t j = 0; j < n; ++j) {
        cplx acc{};
        for (std::size_t i = 0; i < n; ++i) acc += eig.vectors(j, i) * coeffs[i];
        out[j] = acc;
    }
    return out;
}

double transfer_probability(const Mat& h, const BiasField& d, const TransferProblem& prob,
                            double t) {
    Mat a = controlled(h, d);
    check_hermitian(a, "transfer_probability");
    EigenAmplitudes ea = amplitudes(a, prob);
    return std::norm(amplitude_at(ea, t));
}

double time_averaged_probability(const Mat& h, const BiasField& d, const TransferProblem& prob) {
    Mat a = controlled(h, d);
    check_hermitian(a, "time_averaged_probability");
    EigenAmplitudes ea = amplitudes(a, prob);

    // Cross terms between distinct eigenvalues average to zero; only the
    // within-cluster mass survives.
    const double gap = kDegenerateGap * std::max(1.0, a.frobenius_norm());
    const std::size_t n = ea.o.size();
    double avg = 0.0;
    std::size_t i = 0;
    while (i < n) {
        cplx mass = std::conj(ea.o[i]) * ea.q[i];
        std::size_t j = i + 1;
        while (j < n && ea.eig.values[j] - ea.eig.values[j - 1] <= gap) {
            mass += std::conj(ea.o[j]) * ea.q[j];
            ++j;
        }
        avg += std::norm(mass);
        i = j;
    }
    return avg;
}

double windowed_average_probability(const Mat& h, const BiasField& d, const TransferProblem& prob,
                                    double big_t, int steps) {
    if (!(big_t > 0.0)) throw ConfigError("windowed_average_probability: T must be > 0");
    if (steps < 2) throw ConfigError("windowed_average_probability: steps must be >= 2");
    Mat a = controlled(h, d);
    check_hermitian(a, "windowed_average_probability");
    EigenAmplitudes ea = amplitudes(a, prob);

    const double dt = big_t / steps;
    double acc = 0.5 * (std::norm(amplitude_at(ea, 0.0)) + std::norm(amplitude_at(ea, big_t)));
    for (int k = 1; k < steps; ++k) acc += std::norm(amplitude_at(ea, dt * k));
    return acc / steps;
}

namespace {

// Divided-difference kernel of f(x) = exp(-i t x) on the spectrum.
Mat dk_kernel(const std::vector<double>& lambda, double t) {
    const std::size_t n = lambda.size();
    Mat k(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx fi = std::exp(cplx(0.0, -lambda[i] * t));
        for (std::size_t j = 0; j < n; ++j) {
            const double gap = lambda[i] - lambda[j];
            if (std::abs(gap) < kDegenerateGap) {
                k(i, j) = cplx(0.0, -t) * fi;
            } else {
                k(i, j) = (fi - std::exp(cplx(0.0, -lambda[j] * t))) / gap;
            }
        }
    }
    return k;
}

std::optional<double> log_form(double value, double p) {
    if (1.0 - p < kLogSensCutoff) return std::nullopt;
    return value / (1.0 - p);
}

}  // namespace

SensitivityRecord differential_sensitivity(const Mat& h, const BiasField& d,
                                           const PerturbationStructure& s, double scale,
                                           const TransferProblem& prob, double t) {
    Mat a = controlled(h, d);
    check_hermitian(a, "differential_sensitivity");
    if (s.s.rows() != a.rows() || s.s.cols() != a.cols())
        throw ConfigError("differential_sensitivity: structure dimension mismatch");
    if (s.s.hermiticity_defect() > kHermTol)
        throw NumericalError("differential_sensitivity: direction is not Hermitian");

    EigenAmplitudes ea = amplitudes(a, prob);
    const std::size_t n = a.rows();
    const Mat& v = ea.eig.vectors;

    // W = V^H (scale * S) V, then <out| V (K o W) V^H |in> = o^H (K o W) q.
    Mat direction = cplx(scale, 0.0) * s.s;
    Mat w(n, n);
    {
        Mat sv = direction * v;  // S V
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                cplx acc{};
                for (std::size_t r = 0; r < n; ++r) acc += std::conj(v(r, i)) * sv(r, j);
                w(i, j) = acc;
            }
    }
    Mat k = dk_kernel(ea.eig.values, t);

    cplx amp = amplitude_at(ea, t);
    cplx frechet{};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            frechet += std::conj(ea.o[i]) * k(i, j) * w(i, j) * ea.q[j];

    SensitivityRecord rec;
    rec.value = 2.0 * std::real(std::conj(amp) * frechet);
    rec.p = std::norm(amp);
    rec.log_value = log_form(rec.value, rec.p);
    rec.structure_label = s.label;
    rec.t = t;
    return rec;
}

FidelityEval fidelity_with_gradient(const Mat& h, const BiasField& d, const TransferProblem& prob,
                                    double t) {
    Mat a = controlled(h, d);
    EigenAmplitudes ea = amplitudes(a, prob);
    const std::size_t n = a.rows();
    const Mat& v = ea.eig.vectors;

    cplx amp{};
    cplx damp_dt{};
    for (std::size_t i = 0; i < n; ++i) {
        const cplx term = std::conj(ea.o[i]) * std::exp(cplx(0.0, -ea.eig.values[i] * t)) * ea.q[i];
        amp += term;
        damp_dt += cplx(0.0, -ea.eig.values[i]) * term;
    }

    FidelityEval out;
    out.p = std::norm(amp);
    out.dp_dt = 2.0 * std::real(std::conj(amp) * damp_dt);
    out.dp_dd.assign(n, 0.0);

    // Direction e_k e_k^T gives W_k(i,j) = conj(V(k,i)) V(k,j); fold the
    // kernel once into B(i,j) = conj(o_i) K(i,j) q_j so each dp/dD_k is a
    // quadratic form in row k of V.
    Mat kmat = dk_kernel(ea.eig.values, t);
    Mat b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            b(i, j) = std::conj(ea.o[i]) * kmat(i, j) * ea.q[j];

    for (std::size_t k = 0; k < n; ++k) {
        Vec tmp(n, cplx{});
        for (std::size_t i = 0; i < n; ++i) {
            const cplx vi = std::conj(v(k, i));
            for (std::size_t j = 0; j < n; ++j) tmp[j] += vi * b(i, j);
        }
        cplx frechet{};
        for (std::size_t j = 0; j < n; ++j) frechet += tmp[j] * v(k, j);
        out.dp_dd[k] = 2.0 * std::real(std::conj(amp) * frechet);
    }
    return out;
}

}  // namespace spinmu
