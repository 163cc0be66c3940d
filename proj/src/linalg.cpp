#include "linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
extern "C" {
#include <lapacke.h>
}

namespace spinmu {

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::adjoint() const {
    Mat r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

Mat Mat::transpose() const {
    Mat r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

Mat& Mat::operator+=(const Mat& rhs) {
    assert(rows_ == rhs.rows_ && cols_ == rhs.cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
    return *this;
}

Mat& Mat::operator-=(const Mat& rhs) {
    assert(rows_ == rhs.rows_ && cols_ == rhs.cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= rhs.data_[k];
    return *this;
}

Mat& Mat::operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
}

Mat operator*(const Mat& a, const Mat& b) {
    assert(a.cols_ == b.rows_);
    Mat r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            const cplx* brow = b.data() + k * b.cols_;
            cplx* rrow = r.data() + i * r.cols_;
            for (std::size_t j = 0; j < b.cols_; ++j) rrow[j] += aik * brow[j];
        }
    }
    return r;
}

Vec operator*(const Mat& a, const Vec& x) {
    assert(a.cols_ == x.size());
    Vec y(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        cplx acc{};
        const cplx* row = a.data() + i * a.cols_;
        for (std::size_t j = 0; j < a.cols_; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

void Mat::set_block(std::size_t i0, std::size_t j0, const Mat& src) {
    assert(i0 + src.rows_ <= rows_ && j0 + src.cols_ <= cols_);
    for (std::size_t i = 0; i < src.rows_; ++i)
        for (std::size_t j = 0; j < src.cols_; ++j) (*this)(i0 + i, j0 + j) = src(i, j);
}

Mat Mat::block(std::size_t i0, std::size_t j0, std::size_t rows, std::size_t cols) const {
    assert(i0 + rows <= rows_ && j0 + cols <= cols_);
    Mat r(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) r(i, j) = (*this)(i0 + i, j0 + j);
    return r;
}

double Mat::frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
}

double Mat::max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
}

double Mat::one_norm() const {
    double m = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
        m = std::max(m, s);
    }
    return m;
}

double Mat::hermiticity_defect() const {
    assert(rows_ == cols_);
    double m = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return m;
}

double vec_norm(const Vec& x) {
    double s = 0.0;
    for (const auto& v : x) s += std::norm(v);
    return std::sqrt(s);
}

cplx vec_dot(const Vec& x, const Vec& y) {
    assert(x.size() == y.size());
    cplx acc{};
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
    return acc;
}

void vec_normalize(Vec& x) {
    double n = vec_norm(x);
    if (n == 0.0) return;
    for (auto& v : x) v /= n;
}

HermitianEig hermitian_eig(const Mat& a) {
    assert(a.rows() == a.cols());
    const lapack_int n = static_cast<lapack_int>(a.rows());
    HermitianEig out;
    out.values.resize(a.rows());
    out.vectors = a;
    lapack_int info = LAPACKE_zheev(LAPACK_ROW_MAJOR, 'V', 'L', n, out.vectors.data(), n,
                                    out.values.data());
    if (info != 0)
        throw NumericalError("hermitian_eig: zheev failed with info=" + std::to_string(info));
    return out;
}

Svd svd(const Mat& a) {
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    const lapack_int k = std::min(m, n);
    Svd out;
    out.sigma.resize(static_cast<std::size_t>(k));
    out.u = Mat(a.rows(), static_cast<std::size_t>(k));
    out.vh = Mat(static_cast<std::size_t>(k), a.cols());
    Mat work = a;
    std::vector<double> superb(static_cast<std::size_t>(std::max<lapack_int>(1, k - 1)));
    lapack_int info = LAPACKE_zgesvd(LAPACK_ROW_MAJOR, 'S', 'S', m, n, work.data(), n,
                                     out.sigma.data(), out.u.data(), k, out.vh.data(), n,
                                     superb.data());
    if (info != 0)
        throw NumericalError("svd: zgesvd failed with info=" + std::to_string(info));
    return out;
}

double max_singular_value(const Mat& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    return svd(a).sigma.front();
}

std::vector<cplx> eigenvalues(const Mat& a) {
    assert(a.rows() == a.cols());
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Mat work = a;
    std::vector<cplx> w(a.rows());
    lapack_int info = LAPACKE_zgeev(LAPACK_ROW_MAJOR, 'N', 'N', n, work.data(), n, w.data(),
                                    nullptr, n, nullptr, n);
    if (info != 0)
        throw NumericalError("eigenvalues: zgeev failed with info=" + std::to_string(info));
    return w;
}

EigPair dominant_eigenpair(const Mat& a) {
    assert(a.rows() == a.cols());
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Mat work = a;
    std::vector<cplx> w(a.rows());
    Mat vr(a.rows(), a.cols());
    lapack_int info = LAPACKE_zgeev(LAPACK_ROW_MAJOR, 'N', 'V', n, work.data(), n, w.data(),
                                    nullptr, n, vr.data(), n);
    if (info != 0)
        throw NumericalError("dominant_eigenpair: zgeev failed with info=" + std::to_string(info));
    std::size_t best = 0;
    for (std::size_t i = 1; i < w.size(); ++i)
        if (std::abs(w[i]) > std::abs(w[best])) best = i;
    EigPair out;
    out.lambda = w[best];
    out.vector.resize(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) out.vector[i] = vr(i, best);
    vec_normalize(out.vector);
    return out;
}

EigTriple dominant_eigentriple(const Mat& a) {
    assert(a.rows() == a.cols());
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Mat work = a;
    std::vector<cplx> w(a.rows());
    Mat vr(a.rows(), a.cols());
    Mat vl(a.rows(), a.cols());
    lapack_int info = LAPACKE_zgeev(LAPACK_ROW_MAJOR, 'V', 'V', n, work.data(), n, w.data(),
                                    vl.data(), n, vr.data(), n);
    if (info != 0)
        throw NumericalError("dominant_eigentriple: zgeev failed with info=" + std::to_string(info));
    std::size_t best = 0;
    for (std::size_t i = 1; i < w.size(); ++i)
        if (std::abs(w[i]) > std::abs(w[best])) best = i;
    EigTriple out;
    out.lambda = w[best];
    out.right.resize(a.rows());
    out.left.resize(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        out.right[i] = vr(i, best);
        out.left[i] = vl(i, best);
    }
    vec_normalize(out.right);
    vec_normalize(out.left);
    return out;
}

namespace {

struct LuFactors {
    Mat lu;
    std::vector<lapack_int> ipiv;
    bool singular = false;
};

LuFactors lu_factor(const Mat& a) {
    assert(a.rows() == a.cols());
    const lapack_int n = static_cast<lapack_int>(a.rows());
    LuFactors f;
    f.lu = a;
    f.ipiv.resize(a.rows());
    lapack_int info = LAPACKE_zgetrf(LAPACK_ROW_MAJOR, n, n, f.lu.data(), n, f.ipiv.data());
    if (info < 0)
        throw NumericalError("lu_factor: zgetrf failed with info=" + std::to_string(info));
    f.singular = info > 0;
    return f;
}

}  // namespace

Mat inverse(const Mat& a) {
    LuFactors f = lu_factor(a);
    if (f.singular) throw NumericalError("inverse: matrix is singular");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    lapack_int info = LAPACKE_zgetri(LAPACK_ROW_MAJOR, n, f.lu.data(), n, f.ipiv.data());
    if (info != 0) throw NumericalError("inverse: zgetri failed with info=" + std::to_string(info));
    return f.lu;
}

cplx determinant(const Mat& a) {
    if (a.rows() == 0) return 1.0;
    LuFactors f = lu_factor(a);
    if (f.singular) return 0.0;
    cplx det = 1.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        det *= f.lu(i, i);
        if (f.ipiv[i] != static_cast<lapack_int>(i) + 1) det = -det;
    }
    return det;
}

double cond_1(const Mat& a) {
    LuFactors f = lu_factor(a);
    if (f.singular) return std::numeric_limits<double>::infinity();
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Mat inv = f.lu;
    lapack_int info = LAPACKE_zgetri(LAPACK_ROW_MAJOR, n, inv.data(), n, f.ipiv.data());
    if (info != 0) return std::numeric_limits<double>::infinity();
    return a.one_norm() * inv.one_norm();
}

}  // namespace spinmu
