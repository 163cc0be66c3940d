// Exercises the shared-library surface exactly as an external client would:
// only spinmu/spinmu.h, opaque handles, and status codes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "spinmu/spinmu.h"

namespace {

std::filesystem::path temp_dir(const std::string& leaf) {
    auto dir = std::filesystem::temp_directory_path() / "spinmu_capi" / leaf;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    REQUIRE(out.good());
    out << text;
}

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("version and error text are always available") {
    CHECK(spinmu_version() != nullptr);
    CHECK(spinmu_last_error() != nullptr);
}

TEST_CASE("network lifecycle and Hamiltonian entries") {
    spinmu_network* net = nullptr;
    REQUIRE(spinmu_network_create(2, "chain", "xx", &net) == SPINMU_OK);
    CHECK(spinmu_network_size(net) == 2);
    double re[4], im[4];
    REQUIRE(spinmu_network_hamiltonian(net, re, im) == SPINMU_OK);
    CHECK(re[0] == 0.0);
    CHECK(re[1] == 1.0);
    CHECK(re[2] == 1.0);
    CHECK(re[3] == 0.0);
    CHECK(im[1] == 0.0);
    spinmu_network_free(net);

    spinmu_network* from_json = nullptr;
    REQUIRE(spinmu_network_from_json(R"({"n": 11, "topology": "ring", "coupling": "xx"})",
                                     &from_json) == SPINMU_OK);
    CHECK(spinmu_network_size(from_json) == 11);
    spinmu_network_free(from_json);
}

TEST_CASE("config errors carry code 2 and a message") {
    spinmu_network* net = nullptr;
    CHECK(spinmu_network_create(2, "ring", "xx", &net) == SPINMU_ERR_CONFIG);
    CHECK(std::strlen(spinmu_last_error()) > 0);
    CHECK(spinmu_network_create(5, "moebius", "xx", &net) == SPINMU_ERR_CONFIG);
    CHECK(spinmu_network_from_json("{not json", &net) == SPINMU_ERR_CONFIG);
}

TEST_CASE("transfer probability and the 2-chain closed form") {
    spinmu_network* net = nullptr;
    REQUIRE(spinmu_network_create(2, "chain", "xx", &net) == SPINMU_OK);
    double p = 0.0;
    REQUIRE(spinmu_transfer_probability(net, nullptr, 1, 2, 1.5707963267948966, &p) == SPINMU_OK);
    CHECK(p == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(spinmu_time_averaged_probability(net, nullptr, 1, 2, &p) == SPINMU_OK);
    CHECK(p == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(spinmu_transfer_probability(net, nullptr, 1, 7, 1.0, &p) == SPINMU_ERR_CONFIG);
    spinmu_network_free(net);
}

TEST_CASE("differential sensitivity: value, log form, NaN sentinel") {
    spinmu_network* net = nullptr;
    REQUIRE(spinmu_network_create(3, "ring", "xx", &net) == SPINMU_OK);
    double value = 0.0, log_value = 0.0;
    REQUIRE(spinmu_differential_sensitivity(net, nullptr, "coupling", 1, 1, 2, 1.3, &value,
                                            &log_value) == SPINMU_OK);
    CHECK(std::isfinite(value));
    CHECK(std::isfinite(log_value));
    spinmu_network_free(net);

    // perfect transfer: log sensitivity undefined -> NaN
    REQUIRE(spinmu_network_create(2, "chain", "xx", &net) == SPINMU_OK);
    REQUIRE(spinmu_differential_sensitivity(net, nullptr, "coupling", 1, 1, 2,
                                            1.5707963267948966, &value, &log_value) == SPINMU_OK);
    CHECK(std::isnan(log_value));
    CHECK(spinmu_differential_sensitivity(net, nullptr, "torsion", 1, 1, 2, 1.0, &value,
                                          &log_value) == SPINMU_ERR_CONFIG);
    spinmu_network_free(net);
}

TEST_CASE("synthesis round trip through files") {
    auto dir = temp_dir("synth");
    spinmu_network* net = nullptr;
    REQUIRE(spinmu_network_create(4, "ring", "xx", &net) == SPINMU_OK);
    spinmu_ensemble* ens = nullptr;
    REQUIRE(spinmu_synthesize(net, 1, 3, 4, 77, nullptr, &ens) == SPINMU_OK);
    REQUIRE(spinmu_ensemble_size(ens) == 4);

    double d[4], t_f = 0.0, p_tf = 0.0, p_avg = 0.0;
    REQUIRE(spinmu_ensemble_controller(ens, 0, d, &t_f, &p_tf, &p_avg) == SPINMU_OK);
    CHECK(t_f > 0.0);
    CHECK(p_tf >= 0.0);
    CHECK(p_tf <= 1.0 + 1e-12);
    CHECK(spinmu_ensemble_controller(ens, 9, d, &t_f, &p_tf, &p_avg) == SPINMU_ERR_CONFIG);

    const auto path = dir / "ens.json";
    REQUIRE(spinmu_ensemble_save(ens, path.string().c_str()) == SPINMU_OK);
    spinmu_ensemble* back = nullptr;
    REQUIRE(spinmu_ensemble_load(path.string().c_str(), &back) == SPINMU_OK);
    CHECK(spinmu_ensemble_size(back) == 4);
    double d2[4], t_f2 = 0.0;
    REQUIRE(spinmu_ensemble_controller(back, 0, d2, &t_f2, nullptr, nullptr) == SPINMU_OK);
    CHECK(t_f2 == t_f);
    for (int i = 0; i < 4; ++i) CHECK(d2[i] == d[i]);

    spinmu_ensemble_free(ens);
    spinmu_ensemble_free(back);
    spinmu_network_free(net);
}

TEST_CASE("mu bounds through the flat-buffer entry point") {
    const double re[4] = {2.0, 0.0, 0.0, 0.5};
    char* result = nullptr;
    REQUIRE(spinmu_mu(re, nullptr, 2, R"({"blocks":[{"kind":"repeated_scalar","dim":2}]})",
                      &result) == SPINMU_OK);
    std::string text(result);
    spinmu_string_free(result);
    CHECK(text.find("\"lower\":2.0") != std::string::npos);
    CHECK(text.find("\"upper\":2.0") != std::string::npos);
    CHECK(text.find("\"witness_norm\":0.5") != std::string::npos);

    CHECK(spinmu_mu(re, nullptr, 2, R"({"blocks":[{"kind":"repeated_scalar","dim":5}]})",
                    &result) == SPINMU_ERR_CONFIG);
}

TEST_CASE("mu from files, including an exported G-matrix form") {
    auto dir = temp_dir("mu");
    write_file(dir / "g.json", R"({"data": [[[2.0,0],[0,0]],[[0,0],[0.5,0]]]})");
    write_file(dir / "s.json", R"({"blocks":[{"kind":"repeated_scalar","dim":2}]})");
    char* result = nullptr;
    REQUIRE(spinmu_mu_files((dir / "g.json").string().c_str(),
                            (dir / "s.json").string().c_str(), &result) == SPINMU_OK);
    std::string text(result);
    spinmu_string_free(result);
    CHECK(text.find("\"lower\":2.0") != std::string::npos);

    // block form assembles [[g11,g12],[g21,g22]]
    write_file(dir / "gblocks.json",
               R"({"g11": [[0]], "g12": [[1.0]], "g21": [[1.0]], "g22": [[0]], "n": 1})");
    write_file(dir / "s2.json",
               R"({"blocks":[{"kind":"repeated_scalar","dim":1},{"kind":"full","rows":1,"cols":1}]})");
    REQUIRE(spinmu_mu_files((dir / "gblocks.json").string().c_str(),
                            (dir / "s2.json").string().c_str(), &result) == SPINMU_OK);
    text = result;
    spinmu_string_free(result);
    // [[0,1],[1,0]] against diag(delta, full): mu = 1
    CHECK(text.find("\"lower\":1.0") != std::string::npos);

    CHECK(spinmu_mu_files("/nonexistent.json", (dir / "s.json").string().c_str(), &result) ==
          SPINMU_ERR_CONFIG);
}

TEST_CASE("kendall tau and csv tau") {
    const double x[4] = {1, 2, 3, 4};
    const double y[4] = {1, 3, 2, 4};
    double tau = 0.0;
    REQUIRE(spinmu_kendall_tau(x, y, 4, &tau) == SPINMU_OK);
    CHECK(tau == doctest::Approx(2.0 / 3.0));

    const double flat[3] = {5, 5, 5};
    CHECK(spinmu_kendall_tau(x, flat, 3, &tau) == SPINMU_ERR_NUMERICAL);

    auto dir = temp_dir("tau");
    write_file(dir / "t.csv", "u,v\n1,10\n2,20\n3,15\n");
    REQUIRE(spinmu_csv_tau((dir / "t.csv").string().c_str(), "u", "v", &tau) == SPINMU_OK);
    CHECK(tau == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("full pipeline: synth run then all three studies") {
    auto dir = temp_dir("pipeline");
    const auto ens_path = dir / "ens.json";
    const auto out_dir = dir / "out";
    std::string cfg = R"({
        "network": {"n": 5, "topology": "ring", "coupling": "xx"},
        "transfer": {"in": 1, "out": 3},
        "synthesis": {"count": 5, "seed": 21, "ensemble_out": ")" + ens_path.string() + R"("},
        "structures": [{"kind": "coupling", "k": 2}],
        "s0": 0.0,
        "output_dir": ")" + out_dir.string() + R"("
    })";
    write_file(dir / "cfg.json", cfg);

    REQUIRE(spinmu_synth_run((dir / "cfg.json").string().c_str(), nullptr) == SPINMU_OK);
    CHECK(std::filesystem::exists(ens_path));

    for (const char* study : {"sensitivity", "average", "mu"}) {
        char* summary = nullptr;
        REQUIRE(spinmu_study_run(study, (dir / "cfg.json").string().c_str(),
                                 ens_path.string().c_str(), out_dir.string().c_str(),
                                 &summary) == SPINMU_OK);
        CHECK(summary != nullptr);
        spinmu_string_free(summary);
    }
    CHECK(std::filesystem::exists(out_dir / "sensitivity.csv"));
    CHECK(std::filesystem::exists(out_dir / "average.csv"));
    CHECK(std::filesystem::exists(out_dir / "mu.csv"));
    CHECK(std::filesystem::exists(out_dir / "mu.svg"));

    char* summary = nullptr;
    CHECK(spinmu_study_run("voodoo", (dir / "cfg.json").string().c_str(), nullptr, nullptr,
                           &summary) == SPINMU_ERR_CONFIG);
}

TEST_CASE("frequency singularity surfaces as a numerical error") {
    auto dir = temp_dir("singular");
    // 3-chain has a zero eigenvalue: the resolvent at s0 = 0 must fail with code 3
    std::string cfg = R"({
        "network": {"n": 3, "topology": "chain", "coupling": "xx"},
        "transfer": {"in": 1, "out": 3},
        "synthesis": {"count": 2, "seed": 4},
        "structures": [{"kind": "coupling", "k": 1}],
        "s0": 0.0,
        "output_dir": ")" + (dir / "out").string() + R"("
    })";
    write_file(dir / "cfg.json", cfg);
    char* summary = nullptr;
    CHECK(spinmu_study_run("mu", (dir / "cfg.json").string().c_str(), nullptr, nullptr,
                           &summary) == SPINMU_ERR_NUMERICAL);
    CHECK(std::string(spinmu_last_error()).find("s0-offset") != std::string::npos);

    // the documented offset makes it computable
    std::string cfg_offset = R"({
        "network": {"n": 3, "topology": "chain", "coupling": "xx"},
        "transfer": {"in": 1, "out": 3},
        "synthesis": {"count": 2, "seed": 4},
        "structures": [{"kind": "coupling", "k": 1}],
        "s0": 0.0,
        "s0_offset": 1e-6,
        "output_dir": ")" + (dir / "out2").string() + R"("
    })";
    write_file(dir / "cfg2.json", cfg_offset);
    REQUIRE(spinmu_study_run("mu", (dir / "cfg2.json").string().c_str(), nullptr, nullptr,
                             &summary) == SPINMU_OK);
    spinmu_string_free(summary);
}

}  // TEST_SUITE
