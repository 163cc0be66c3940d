#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "network.hpp"
#include "ssv.hpp"
#include "synthesis.hpp"

namespace spinmu {

// Tie-corrected Kendall tau-b in [-1, 1]. Throws ConfigError on length
// mismatch or length < 2, NumericalError when either list is all ties.
double kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

struct StructureSelector {
    PerturbationKind kind = PerturbationKind::Coupling;
    int k = 1;
};

struct ExperimentConfig {
    SpinNetworkSpec network;
    TransferProblem transfer;
    std::string ensemble_path;  // optional; otherwise synthesis parameters apply
    int count = 100;
    std::uint64_t seed = 0;
    SynthOptions synth_opts;
    std::string ensemble_out;  // where `synth` writes its ensemble
    std::vector<StructureSelector> structures;
    cplx s0{0.0, 0.0};
    double s0_offset = 0.0;
    std::string output_dir = ".";
};

ExperimentConfig config_from_file(const std::string& path);

// Load (validating against network/transfer) or synthesize the ensemble.
ControllerEnsemble resolve_ensemble(const ExperimentConfig& cfg,
                                    const std::string& ensemble_override = {});

// One sweep row: a controller paired with one structure (or the mean over
// the structure family).
struct SweepEntry {
    int m = 0;
    int rank_avg = 0;
    double p_tf = 0.0;
    double p_avg = 0.0;
    std::string structure;
    double sensitivity = 0.0;
    std::optional<double> log_sensitivity;
};

// Differential sensitivities at t_f(m) for every controller and structure,
// ordered by controller rank; per-structure rows followed by a "mean" row
// with the arithmetic mean of absolute values.
std::vector<SweepEntry> sensitivity_sweep(const ControllerEnsemble& ens,
                                          const std::vector<PerturbationStructure>& structures);

// Crossover region of a ranked study: the contiguous window that maximizes
// the joint robust rise of sensitivity and mu (ratio of half-window medians)
// while the fidelity has dropped below 0.9 of its maximum inside the window.
// Isolated mu spikes from near-singular H+D do not move medians, so the
// detector locks onto the trend, not the noise. Returns the best window with
// score = min(mu ratio, sens ratio) when that score exceeds 1.25; indices are
// 0-based into the ranked series.
struct CrossoverWindow {
    std::size_t lo = 0;
    std::size_t hi = 0;
    double score = 0.0;
};
std::optional<CrossoverWindow> detect_crossover(const std::vector<double>& p_ranked,
                                                const std::vector<double>& sens_ranked,
                                                const std::vector<double>& mu_ranked);

struct StudyResult {
    std::vector<std::string> artifacts;  // files written
    std::string summary_json;            // study statistics as a JSON string
};

StudyResult run_sensitivity_study(const ExperimentConfig& cfg, const ControllerEnsemble& ens);
StudyResult run_average_vs_instant_study(const ExperimentConfig& cfg,
                                         const ControllerEnsemble& ens);
StudyResult run_mu_study(const ExperimentConfig& cfg, const ControllerEnsemble& ens);

// per-controller tuple behind the mu study, exposed for tests
struct MuStudyRow {
    int m = 0;
    int rank_avg = 0;
    double p_tf = 0.0;
    double p_avg = 0.0;
    double sensitivity = 0.0;
    double mu_lower = 0.0;
    double mu_upper = 0.0;
};
std::vector<MuStudyRow> mu_study_rows(const ExperimentConfig& cfg, const ControllerEnsemble& ens);

}  // namespace spinmu
