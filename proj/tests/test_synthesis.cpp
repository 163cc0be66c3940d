#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "json_io.hpp"
#include "synthesis.hpp"

using namespace spinmu;

namespace {

SpinNetworkSpec make(int n, Topology t, CouplingModel c = CouplingModel::XX) {
    SpinNetworkSpec s;
    s.n = n;
    s.topology = t;
    s.coupling = c;
    return s;
}

TransferProblem transfer(int in, int out, int n) {
    TransferProblem p;
    p.in_spin = in;
    p.out_spin = out;
    p.n = n;
    return p;
}

}  // namespace

TEST_SUITE("synthesis") {

TEST_CASE("2-spin chain reaches the analytic optimum") {
    auto ens = synthesize(make(2, Topology::Chain), transfer(1, 2, 2), 1, 7);
    REQUIRE(ens.controllers.size() == 1);
    CHECK(ens.controllers[0].p_tf >= 1.0 - 1e-6);
}

TEST_CASE("stay-put transfer is easy") {
    auto ens = synthesize(make(3, Topology::Chain), transfer(2, 2, 3), 2, 5);
    CHECK(ens.controllers[0].p_tf >= 1.0 - 1e-3);
}

TEST_CASE("stored fidelities are recomputable, list sorted, ranks valid") {
    auto spec = make(4, Topology::Ring);
    auto prob = transfer(1, 3, 4);
    auto ens = synthesize(spec, prob, 8, 123);
    REQUIRE(ens.controllers.size() == 8);

    Mat h = build_hamiltonian(spec);
    for (std::size_t i = 0; i < ens.controllers.size(); ++i) {
        const auto& c = ens.controllers[i];
        CHECK(c.m == static_cast<int>(i) + 1);
        CHECK(c.p_tf >= 0.0);
        CHECK(c.p_tf <= 1.0 + 1e-12);
        CHECK(std::abs(c.p_tf - transfer_probability(h, c.d, prob, c.t_f)) < 1e-10);
        CHECK(std::abs(c.p_avg - time_averaged_probability(h, c.d, prob)) < 1e-10);
        if (i > 0) CHECK(ens.controllers[i - 1].p_tf >= c.p_tf);
    }

    // avg_rank is a permutation of 1..M and sorts p_avg nonincreasingly
    std::vector<int> sorted_ranks = ens.avg_rank;
    std::sort(sorted_ranks.begin(), sorted_ranks.end());
    for (std::size_t i = 0; i < sorted_ranks.size(); ++i)
        CHECK(sorted_ranks[i] == static_cast<int>(i) + 1);
    std::vector<double> by_rank(ens.controllers.size());
    for (std::size_t i = 0; i < ens.controllers.size(); ++i)
        by_rank[static_cast<std::size_t>(ens.avg_rank[i] - 1)] = ens.controllers[i].p_avg;
    for (std::size_t r = 1; r < by_rank.size(); ++r) CHECK(by_rank[r - 1] >= by_rank[r]);
}

TEST_CASE("determinism: identical seeds give bit-identical ensembles") {
    auto spec = make(5, Topology::Ring);
    auto prob = transfer(1, 2, 5);
    auto a = synthesize(spec, prob, 6, 42);
    auto b = synthesize(spec, prob, 6, 42);
    REQUIRE(a.controllers.size() == b.controllers.size());
    for (std::size_t i = 0; i < a.controllers.size(); ++i) {
        CHECK(a.controllers[i].t_f == b.controllers[i].t_f);
        CHECK(a.controllers[i].p_tf == b.controllers[i].p_tf);
        CHECK(a.controllers[i].p_avg == b.controllers[i].p_avg);
        for (std::size_t k = 0; k < a.controllers[i].d.size(); ++k)
            CHECK(a.controllers[i].d[k] == b.controllers[i].d[k]);
    }
    CHECK(ensemble_to_json(a).dump() == ensemble_to_json(b).dump());

    auto c = synthesize(spec, prob, 6, 43);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.controllers.size() && !any_diff; ++i)
        any_diff = a.controllers[i].t_f != c.controllers[i].t_f;
    CHECK(any_diff);
}

TEST_CASE("rank_by_time_average basics") {
    std::vector<Controller> single(1);
    single[0].p_avg = 0.4;
    auto r1 = rank_by_time_average(single);
    REQUIRE(r1.size() == 1);
    CHECK(r1[0] == 1);

    std::vector<Controller> two(2);
    two[0].p_avg = 0.3;
    two[1].p_avg = 0.7;
    auto r2 = rank_by_time_average(two);
    CHECK(r2[0] == 2);
    CHECK(r2[1] == 1);

    // ties break by list position
    std::vector<Controller> tied(3);
    tied[0].p_avg = 0.5;
    tied[1].p_avg = 0.5;
    tied[2].p_avg = 0.9;
    auto r3 = rank_by_time_average(tied);
    CHECK(r3[0] == 2);
    CHECK(r3[1] == 3);
    CHECK(r3[2] == 1);
}

TEST_CASE("ensemble json round trip") {
    auto spec = make(3, Topology::Ring);
    auto prob = transfer(1, 2, 3);
    auto ens = synthesize(spec, prob, 3, 9);
    json j = ensemble_to_json(ens);
    auto back = ensemble_from_json(j);
    CHECK(back.spec.n == 3);
    CHECK(back.problem.in_spin == 1);
    CHECK(back.problem.out_spin == 2);
    REQUIRE(back.controllers.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.controllers[i].t_f == ens.controllers[i].t_f);
        CHECK(back.controllers[i].p_tf == ens.controllers[i].p_tf);
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(back.controllers[i].d[k] == ens.controllers[i].d[k]);
    }
    CHECK(back.avg_rank == ens.avg_rank);
}

TEST_CASE("invalid synthesis inputs are rejected") {
    auto spec = make(3, Topology::Chain);
    auto prob = transfer(1, 3, 3);
    CHECK_THROWS_AS((void)synthesize(spec, prob, 0, 1), ConfigError);
    SynthOptions bad;
    bad.t_min = 10.0;
    bad.t_max = 1.0;
    CHECK_THROWS_AS((void)synthesize(spec, prob, 1, 1, bad), ConfigError);
    CHECK_THROWS_AS((void)synthesize(spec, transfer(1, 2, 7), 1, 1), ConfigError);
}

}  // TEST_SUITE
