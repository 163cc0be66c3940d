#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace spinmu {

using cplx = std::complex<double>;
using Vec = std::vector<cplx>;

inline constexpr cplx kImag{0.0, 1.0};

// Dense complex matrix, row-major. Sizes in this project stay tiny (<= a few
// times the network size), so everything is plain O(n^3) dense algebra.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static Mat identity(std::size_t n);
    static Mat zero(std::size_t rows, std::size_t cols) { return Mat(rows, cols); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }

    Mat adjoint() const;
    Mat transpose() const;

    Mat& operator+=(const Mat& rhs);
    Mat& operator-=(const Mat& rhs);
    Mat& operator*=(cplx s);

    friend Mat operator+(Mat lhs, const Mat& rhs) { return lhs += rhs; }
    friend Mat operator-(Mat lhs, const Mat& rhs) { return lhs -= rhs; }
    friend Mat operator*(Mat lhs, cplx s) { return lhs *= s; }
    friend Mat operator*(cplx s, Mat rhs) { return rhs *= s; }
    friend Mat operator*(const Mat& a, const Mat& b);
    friend Vec operator*(const Mat& a, const Vec& x);

    // Copies src into this matrix with its (0,0) entry landing at (i0, j0).
    void set_block(std::size_t i0, std::size_t j0, const Mat& src);
    Mat block(std::size_t i0, std::size_t j0, std::size_t rows, std::size_t cols) const;

    double frobenius_norm() const;
    double max_abs() const;
    double one_norm() const;  // max column sum of |a_ij|
    double hermiticity_defect() const;  // max |a_ij - conj(a_ji)|, requires square

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

double vec_norm(const Vec& x);
cplx vec_dot(const Vec& x, const Vec& y);  // conjugates x
void vec_normalize(Vec& x);

// Eigendecomposition of a Hermitian matrix: ascending eigenvalues, eigenvector
// k in column k of `vectors`. Input symmetry is the caller's contract; only
// the lower triangle is referenced.
struct HermitianEig {
    std::vector<double> values;
    Mat vectors;
};
HermitianEig hermitian_eig(const Mat& a);

struct Svd {
    std::vector<double> sigma;  // descending
    Mat u;                      // left singular vectors in columns
    Mat vh;                     // V^H
};
Svd svd(const Mat& a);
double max_singular_value(const Mat& a);

// All eigenvalues of a general complex square matrix.
std::vector<cplx> eigenvalues(const Mat& a);

// Eigenvalue of largest modulus together with a unit right eigenvector.
struct EigPair {
    cplx lambda;
    Vec vector;
};
EigPair dominant_eigenpair(const Mat& a);

// Dominant eigenvalue with unit right and left eigenvectors
// (left: y^H A = lambda y^H).
struct EigTriple {
    cplx lambda;
    Vec right;
    Vec left;
};
EigTriple dominant_eigentriple(const Mat& a);

Mat inverse(const Mat& a);       // throws NumericalError when singular
cplx determinant(const Mat& a);
double cond_1(const Mat& a);     // ||A||_1 ||A^-1||_1; +inf when singular

}  // namespace spinmu
