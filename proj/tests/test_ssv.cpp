#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "lft.hpp"
#include "network.hpp"
#include "rng.hpp"
#include "ssv.hpp"

using namespace spinmu;

namespace {

Mat random_complex(std::size_t n, Rng& rng, double scale = 1.0) {
    Mat a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a(i, j) = cplx(rng.gaussian(), rng.gaussian()) * (scale / std::sqrt(2.0 * n));
    return a;
}

BlockStructure structure_of(std::initializer_list<UncertaintyBlock> blocks) {
    BlockStructure s;
    s.blocks = blocks;
    return s;
}

double witness_det_residual(const Mat& g, const Mat& witness) {
    return std::abs(determinant(Mat::identity(g.rows()) - g * witness));
}

}  // namespace

TEST_SUITE("ssv") {

TEST_CASE("single full block: both bounds equal the largest singular value") {
    Rng rng(1);
    for (int trial = 0; trial < 5; ++trial) {
        Mat g = random_complex(4, rng);
        auto s = structure_of({UncertaintyBlock::full(4, 4)});
        auto ub = mu_upper_bound(g, s);
        auto lb = mu_lower_bound(g, s);
        const double sv = max_singular_value(g);
        CHECK(ub.beta == doctest::Approx(sv).epsilon(1e-6));
        CHECK(lb.beta == doctest::Approx(sv).epsilon(1e-6));
        CHECK(lb.beta <= ub.beta + 1e-9);
    }
}

TEST_CASE("repeated scalar on diag(2, 0.5): mu = 2 with witness delta = 1/2") {
    Mat g(2, 2);
    g(0, 0) = 2.0;
    g(1, 1) = 0.5;
    auto s = structure_of({UncertaintyBlock::repeated_scalar(2)});
    MuResult r = compute_mu(g, s);
    CHECK(r.lower == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(r.upper == doctest::Approx(2.0).epsilon(1e-6));
    REQUIRE(!r.witness.empty());
    CHECK(max_singular_value(r.witness) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::abs(r.witness(0, 0) - cplx(0.5)) < 1e-9);
    CHECK(std::abs(r.witness(0, 1)) < 1e-12);
    CHECK(witness_det_residual(g, r.witness) < 1e-10);
}

TEST_CASE("nilpotent matrix has mu = 0 and no witness") {
    Mat g(2, 2);
    g(0, 1) = 1.0;
    auto s = structure_of({UncertaintyBlock::repeated_scalar(2)});
    MuResult r = compute_mu(g, s);
    CHECK(r.lower == 0.0);
    CHECK(r.witness.empty());
    CHECK(r.witness_norm == 0.0);
    CHECK(r.upper <= 1e-6);
}

TEST_CASE("zero matrix has mu = 0") {
    Mat g = Mat::zero(3, 3);
    auto s = structure_of({UncertaintyBlock::repeated_scalar(3)});
    MuResult r = compute_mu(g, s);
    CHECK(r.lower == 0.0);
    CHECK(r.upper == 0.0);
}

TEST_CASE("identity with repeated scalar: mu = 1") {
    Mat g = Mat::identity(2);
    auto s = structure_of({UncertaintyBlock::repeated_scalar(2)});
    MuResult r = compute_mu(g, s);
    CHECK(r.lower == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.upper == doctest::Approx(1.0).epsilon(1e-9));
    BruteForceOptions bf;
    bf.max_evals = 5000;
    CHECK(mu_brute_force(g, s, bf) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("brute force agrees with the bounds on single-block cases") {
    BruteForceOptions bf;
    bf.max_evals = 20000;

    Rng rng(4);
    Mat g = random_complex(2, rng);
    auto full = structure_of({UncertaintyBlock::full(2, 2)});
    CHECK(mu_brute_force(g, full, bf) == doctest::Approx(max_singular_value(g)).epsilon(1e-4));

    Mat d(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 0.5;
    auto rep = structure_of({UncertaintyBlock::repeated_scalar(2)});
    CHECK(mu_brute_force(d, rep, bf) == doctest::Approx(2.0).epsilon(1e-6));

    Mat nil(2, 2);
    nil(0, 1) = 1.0;
    CHECK(mu_brute_force(nil, rep, bf) == 0.0);

    CHECK(mu_brute_force(Mat::zero(2, 2), rep, bf) == 0.0);
}

TEST_CASE("sandwich and witness validity on random mixed structures") {
    Rng rng(10);
    for (int trial = 0; trial < 8; ++trial) {
        const bool four = trial % 2 == 0;
        Mat g = random_complex(four ? 4 : 3, rng);
        BlockStructure s =
            four ? structure_of({UncertaintyBlock::repeated_scalar(2), UncertaintyBlock::full(2, 2)})
                 : structure_of({UncertaintyBlock::repeated_scalar(1), UncertaintyBlock::full(2, 2)});
        MuResult r = compute_mu(g, s);
        CHECK(r.lower <= r.upper + 1e-9);
        if (r.lower > 0.0) {
            REQUIRE(!r.witness.empty());
            CHECK(max_singular_value(r.witness) ==
                  doctest::Approx(1.0 / r.lower).epsilon(1e-8));
            const double tol =
                1e-6 * std::pow(1.0 + max_singular_value(g), static_cast<double>(g.rows()));
            CHECK(witness_det_residual(g, r.witness) <= tol);
        }
    }
}

TEST_CASE("brute-force oracle agreement on random mixed structures") {
    Rng rng(20);
    BruteForceOptions bf;
    bf.max_evals = 60000;
    for (int trial = 0; trial < 4; ++trial) {
        const bool four = trial % 2 == 0;
        Mat g = random_complex(four ? 4 : 3, rng);
        BlockStructure s =
            four ? structure_of({UncertaintyBlock::repeated_scalar(2), UncertaintyBlock::full(2, 2)})
                 : structure_of({UncertaintyBlock::repeated_scalar(2), UncertaintyBlock::full(1, 1)});
        MuResult r = compute_mu(g, s);
        const double oracle = mu_brute_force(g, s, bf);
        CHECK(std::abs(r.lower - oracle) <= 1e-2 * std::max(1.0, oracle));
        CHECK(oracle <= r.upper + 1e-2);
    }
}

TEST_CASE("scaling invariance: mu(alpha G) = |alpha| mu(G)") {
    Rng rng(30);
    Mat g = random_complex(4, rng);
    auto s = structure_of({UncertaintyBlock::repeated_scalar(2), UncertaintyBlock::full(2, 2)});
    MuResult base = compute_mu(g, s);
    const double alpha = 3.7;
    Mat ga = g;
    ga *= cplx(alpha);
    MuResult scaled = compute_mu(ga, s);
    CHECK(scaled.lower == doctest::Approx(alpha * base.lower).epsilon(1e-6));
    CHECK(scaled.upper == doctest::Approx(alpha * base.upper).epsilon(1e-6));
}

TEST_CASE("coarsening repeated scalar to a full block never shrinks the upper bound") {
    Rng rng(40);
    for (int trial = 0; trial < 4; ++trial) {
        Mat g = random_complex(3, rng);
        auto rep = structure_of({UncertaintyBlock::repeated_scalar(3)});
        auto full = structure_of({UncertaintyBlock::full(3, 3)});
        auto ub_rep = mu_upper_bound(g, rep);
        auto ub_full = mu_upper_bound(g, full);
        CHECK(ub_rep.beta <= ub_full.beta + 1e-9);
    }
}

TEST_CASE("structure validation") {
    Mat g = Mat::identity(4);
    auto wrong_dim = structure_of({UncertaintyBlock::repeated_scalar(3)});
    CHECK_THROWS_AS((void)compute_mu(g, wrong_dim), ConfigError);
    auto rect = structure_of({UncertaintyBlock::full(2, 3)});
    CHECK_THROWS_AS((void)compute_mu(Mat::identity(2), rect), ConfigError);
    BlockStructure empty;
    CHECK_THROWS_AS((void)compute_mu(g, empty), ConfigError);
    Mat big = Mat::identity(7);
    auto s7 = structure_of({UncertaintyBlock::repeated_scalar(7)});
    CHECK_THROWS_AS((void)mu_brute_force(big, s7), ConfigError);
}

TEST_CASE("robust performance mu on a small network, checked against brute force") {
    auto spec = SpinNetworkSpec{2, Topology::Chain, CouplingModel::XX};
    Mat h = build_hamiltonian(spec);
    auto s = coupling_structure(spec, 1);
    TransferProblem prob;
    prob.in_spin = 1;
    prob.out_spin = 2;
    prob.n = 2;
    OutputMatrix c = output_matrix(prob);
    PlantMatrix p = build_plant(h, c, {s}, cplx{});

    Rng rng(3);
    for (int trial = 0; trial < 3; ++trial) {
        BiasField d{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        GMatrix g = absorb_controller(p, d);
        auto uncertainty = structure_of({UncertaintyBlock::repeated_scalar(2)});
        MuResult r = robust_performance_mu(g, uncertainty);
        CHECK(r.lower <= r.upper + 1e-9);
        CHECK(std::isfinite(r.upper));

        // same computation against the oracle on the assembled 4x4 matrix
        auto augmented = structure_of(
            {UncertaintyBlock::repeated_scalar(2), UncertaintyBlock::full(2, 2)});
        BruteForceOptions bf;
        bf.max_evals = 60000;
        const double oracle = mu_brute_force(g.assembled(), augmented, bf);
        CHECK(std::abs(r.lower - oracle) <= 1e-2 * std::max(1.0, oracle));
    }
}

TEST_CASE("zero G has mu = 0 over the augmented structure") {
    GMatrix g;
    g.n = 2;
    g.channels = 1;
    g.g11 = Mat::zero(2, 2);
    g.g12 = Mat::zero(2, 2);
    g.g21 = Mat::zero(2, 2);
    g.g22 = Mat::zero(2, 2);
    auto uncertainty = structure_of({UncertaintyBlock::repeated_scalar(2)});
    MuResult r = robust_performance_mu(g, uncertainty);
    CHECK(r.lower == 0.0);
    CHECK(r.upper == 0.0);
}

TEST_CASE("the mu witness closes the loop onto the singularity") {
    auto spec = SpinNetworkSpec{5, Topology::Ring, CouplingModel::XX};
    Mat h = build_hamiltonian(spec);
    auto s = coupling_structure(spec, 2);
    TransferProblem prob;
    prob.in_spin = 1;
    prob.out_spin = 3;
    prob.n = 5;
    OutputMatrix c = output_matrix(prob);
    PlantMatrix p = build_plant(h, c, {s}, cplx{});
    Rng rng(9);
    BiasField d(5);
    for (auto& v : d) v = rng.uniform(-2.0, 2.0);
    GMatrix g = absorb_controller(p, d);

    // destabilize I - G11 Delta: mu of G11 over the channel structure
    auto channel = structure_of({UncertaintyBlock::repeated_scalar(5)});
    auto lb = mu_lower_bound(g.g11, channel);
    REQUIRE(lb.beta > 0.0);
    CHECK_THROWS_AS((void)closed_loop_tzw(g, lb.witness), NumericalError);
}

}  // TEST_SUITE
