#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "linalg.hpp"
#include "rng.hpp"

using namespace spinmu;

namespace {

Mat random_hermitian(std::size_t n, Rng& rng) {
    Mat a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = rng.gaussian();
        for (std::size_t j = i + 1; j < n; ++j) {
            a(i, j) = cplx(rng.gaussian(), rng.gaussian());
            a(j, i) = std::conj(a(i, j));
        }
    }
    return a;
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("hermitian_eig reconstructs and meets the residual contract") {
    Rng rng(11);
    for (std::size_t n : {2u, 5u, 11u}) {
        Mat a = random_hermitian(n, rng);
        HermitianEig e = hermitian_eig(a);
        const double scale = a.frobenius_norm();
        for (std::size_t k = 0; k < n; ++k) {
            Vec v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = e.vectors(i, k);
            Vec av = a * v;
            double res = 0.0;
            for (std::size_t i = 0; i < n; ++i) res += std::norm(av[i] - e.values[k] * v[i]);
            CHECK(std::sqrt(res) <= 1e-12 * std::max(1.0, scale));
        }
        for (std::size_t k = 1; k < n; ++k) CHECK(e.values[k - 1] <= e.values[k]);
    }
}

TEST_CASE("diagonal matrix eigenvalues are exact") {
    Mat a(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = 0.5;
    HermitianEig e = hermitian_eig(a);
    CHECK(e.values[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(e.values[1] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("inverse and determinant on a known 2x2") {
    Mat a(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = 2.0;
    a(1, 0) = 3.0;
    a(1, 1) = 4.0;
    CHECK(std::abs(determinant(a) - cplx(-2.0)) < 1e-12);
    Mat inv = inverse(a);
    Mat prod = a * inv;
    CHECK((prod - Mat::identity(2)).max_abs() < 1e-12);
}

TEST_CASE("singular matrix reports as singular") {
    Mat a(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = 2.0;
    a(1, 0) = 2.0;
    a(1, 1) = 4.0;
    CHECK(std::abs(determinant(a)) < 1e-12);
    CHECK_THROWS_AS((void)inverse(a), NumericalError);
    CHECK(!(cond_1(a) < 1e12));
}

TEST_CASE("svd of a diagonal matrix") {
    Mat a(2, 2);
    a(0, 0) = cplx(0.0, 3.0);  // |.| = 3
    a(1, 1) = 1.0;
    Svd s = svd(a);
    CHECK(s.sigma[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(s.sigma[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(max_singular_value(a) == doctest::Approx(3.0));
}

TEST_CASE("svd factors reproduce the matrix") {
    Rng rng(7);
    Mat a(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) a(i, j) = cplx(rng.gaussian(), rng.gaussian());
    Svd s = svd(a);
    Mat sig(4, 4);
    for (std::size_t i = 0; i < 4; ++i) sig(i, i) = s.sigma[i];
    CHECK((s.u * sig * s.vh - a).max_abs() < 1e-12);
}

TEST_CASE("general eigenvalues of a companion-style matrix") {
    // eigenvalues 1, 2, 3
    Mat a(3, 3);
    a(0, 0) = 1.0;
    a(1, 1) = 2.0;
    a(2, 2) = 3.0;
    a(0, 1) = 5.0;  // upper triangle does not change the spectrum
    a(1, 2) = -1.0;
    auto w = eigenvalues(a);
    std::vector<double> re;
    for (auto& l : w) {
        re.push_back(l.real());
        CHECK(std::abs(l.imag()) < 1e-12);
    }
    std::sort(re.begin(), re.end());
    CHECK(re[0] == doctest::Approx(1.0));
    CHECK(re[1] == doctest::Approx(2.0));
    CHECK(re[2] == doctest::Approx(3.0));
}

TEST_CASE("dominant eigenpair of a rotation-free matrix") {
    Mat a(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = -0.5;
    EigPair p = dominant_eigenpair(a);
    CHECK(std::abs(p.lambda - cplx(2.0)) < 1e-12);
    CHECK(std::abs(std::abs(p.vector[0]) - 1.0) < 1e-12);
}

}  // TEST_SUITE
