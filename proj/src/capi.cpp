#include "spinmu/spinmu.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "csvfmt.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "json_io.hpp"
#include "network.hpp"
#include "ssv.hpp"
#include "synthesis.hpp"

struct spinmu_network {
    spinmu::SpinNetworkSpec spec;
    spinmu::Mat h;
};

struct spinmu_ensemble {
    spinmu::ControllerEnsemble ens;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
spinmu_status guarded(Fn&& fn) {
    try {
        fn();
        return SPINMU_OK;
    } catch (const spinmu::ConfigError& e) {
        g_last_error = e.what();
        return SPINMU_ERR_CONFIG;
    } catch (const spinmu::NumericalError& e) {
        g_last_error = e.what();
        return SPINMU_ERR_NUMERICAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SPINMU_ERR_INTERNAL;
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw spinmu::ConfigError(what);
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

spinmu::BiasField bias_or_zero(const spinmu_network* net, const double* bias) {
    const std::size_t n = static_cast<std::size_t>(net->spec.n);
    if (!bias) return spinmu::BiasField(n, 0.0);
    return spinmu::BiasField(bias, bias + n);
}

spinmu::TransferProblem problem_for(const spinmu_network* net, int in_spin, int out_spin) {
    spinmu::TransferProblem p;
    p.in_spin = in_spin;
    p.out_spin = out_spin;
    p.n = net->spec.n;
    p.validate();
    return p;
}

}  // namespace

extern "C" {

const char* spinmu_version(void) { return "0.1.0"; }

const char* spinmu_last_error(void) { return g_last_error.c_str(); }

void spinmu_string_free(char* s) { delete[] s; }

spinmu_status spinmu_network_create(int n, const char* topology, const char* coupling,
                                    spinmu_network** out) {
    return guarded([&] {
        require(out && topology && coupling, "spinmu_network_create: null argument");
        spinmu::SpinNetworkSpec spec;
        spec.n = n;
        spec.topology = spinmu::topology_from_name(topology);
        spec.coupling = spinmu::coupling_from_name(coupling);
        spec.validate();
        *out = new spinmu_network{spec, spinmu::build_hamiltonian(spec)};
    });
}

spinmu_status spinmu_network_from_json(const char* json_text, spinmu_network** out) {
    return guarded([&] {
        require(out && json_text, "spinmu_network_from_json: null argument");
        spinmu::json j;
        try {
            j = spinmu::json::parse(json_text);
        } catch (const spinmu::json::exception& e) {
            throw spinmu::ConfigError(std::string("network json: ") + e.what());
        }
        spinmu::SpinNetworkSpec spec = spinmu::spec_from_json(j);
        *out = new spinmu_network{spec, spinmu::build_hamiltonian(spec)};
    });
}

void spinmu_network_free(spinmu_network* net) { delete net; }

int spinmu_network_size(const spinmu_network* net) { return net ? net->spec.n : 0; }

spinmu_status spinmu_network_hamiltonian(const spinmu_network* net, double* re, double* im) {
    return guarded([&] {
        require(net && re, "spinmu_network_hamiltonian: null argument");
        const std::size_t n = net->h.rows();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                re[i * n + j] = net->h(i, j).real();
                if (im) im[i * n + j] = net->h(i, j).imag();
            }
    });
}

spinmu_status spinmu_transfer_probability(const spinmu_network* net, const double* bias,
                                          int in_spin, int out_spin, double t, double* p) {
    return guarded([&] {
        require(net && p, "spinmu_transfer_probability: null argument");
        *p = spinmu::transfer_probability(net->h, bias_or_zero(net, bias),
                                          problem_for(net, in_spin, out_spin), t);
    });
}

spinmu_status spinmu_time_averaged_probability(const spinmu_network* net, const double* bias,
                                               int in_spin, int out_spin, double* p) {
    return guarded([&] {
        require(net && p, "spinmu_time_averaged_probability: null argument");
        *p = spinmu::time_averaged_probability(net->h, bias_or_zero(net, bias),
                                               problem_for(net, in_spin, out_spin));
    });
}

spinmu_status spinmu_differential_sensitivity(const spinmu_network* net, const double* bias,
                                              const char* structure_kind, int k, int in_spin,
                                              int out_spin, double t, double* value,
                                              double* log_value) {
    return guarded([&] {
        require(net && structure_kind && value, "spinmu_differential_sensitivity: null argument");
        const std::string kind = structure_kind;
        spinmu::PerturbationStructure s;
        spinmu::BiasField d = bias_or_zero(net, bias);
        double scale = 1.0;
        if (kind == "coupling") {
            s = spinmu::coupling_structure(net->spec, k);
        } else if (kind == "leakage") {
            s = spinmu::leakage_structure(net->spec, k);
            scale = d[static_cast<std::size_t>(k - 1)];
        } else {
            throw spinmu::ConfigError("structure kind must be coupling|leakage");
        }
        auto rec = spinmu::differential_sensitivity(net->h, d, s, scale,
                                                    problem_for(net, in_spin, out_spin), t);
        *value = rec.value;
        if (log_value)
            *log_value = rec.log_value ? *rec.log_value : std::numeric_limits<double>::quiet_NaN();
    });
}

spinmu_status spinmu_synthesize(const spinmu_network* net, int in_spin, int out_spin, int count,
                                uint64_t seed, const char* opts_json, spinmu_ensemble** out) {
    return guarded([&] {
        require(net && out, "spinmu_synthesize: null argument");
        spinmu::SynthOptions opts;
        if (opts_json) {
            try {
                opts = spinmu::synth_options_from_json(spinmu::json::parse(opts_json));
            } catch (const spinmu::json::exception& e) {
                throw spinmu::ConfigError(std::string("synthesis options json: ") + e.what());
            }
        }
        auto ens = spinmu::synthesize(net->spec, problem_for(net, in_spin, out_spin), count, seed,
                                      opts);
        *out = new spinmu_ensemble{std::move(ens)};
    });
}

spinmu_status spinmu_ensemble_load(const char* path, spinmu_ensemble** out) {
    return guarded([&] {
        require(path && out, "spinmu_ensemble_load: null argument");
        *out = new spinmu_ensemble{spinmu::ensemble_from_json(spinmu::load_json_file(path))};
    });
}

spinmu_status spinmu_ensemble_save(const spinmu_ensemble* ens, const char* path) {
    return guarded([&] {
        require(ens && path, "spinmu_ensemble_save: null argument");
        spinmu::save_json_file(path, spinmu::ensemble_to_json(ens->ens));
    });
}

void spinmu_ensemble_free(spinmu_ensemble* ens) { delete ens; }

int spinmu_ensemble_size(const spinmu_ensemble* ens) {
    return ens ? static_cast<int>(ens->ens.controllers.size()) : 0;
}

spinmu_status spinmu_ensemble_controller(const spinmu_ensemble* ens, int index, double* d,
                                         double* t_f, double* p_tf, double* p_avg) {
    return guarded([&] {
        require(ens, "spinmu_ensemble_controller: null ensemble");
        require(index >= 0 && index < static_cast<int>(ens->ens.controllers.size()),
                "spinmu_ensemble_controller: index out of range");
        const auto& c = ens->ens.controllers[static_cast<std::size_t>(index)];
        if (d)
            for (std::size_t i = 0; i < c.d.size(); ++i) d[i] = c.d[i];
        if (t_f) *t_f = c.t_f;
        if (p_tf) *p_tf = c.p_tf;
        if (p_avg) *p_avg = c.p_avg;
    });
}

namespace {

spinmu::Mat matrix_from_any_json(const spinmu::json& j) {
    if (j.is_array()) return spinmu::mat_from_json(j);
    if (j.is_object()) {
        if (j.contains("data")) return spinmu::mat_from_json(j.at("data"));
        if (j.contains("g11")) return spinmu::gmatrix_from_json(j).assembled();
    }
    throw spinmu::ConfigError("G json: expected a matrix, {\"data\": ...}, or g11..g22 blocks");
}

char* mu_result_string(const spinmu::Mat& g, const spinmu::BlockStructure& structure) {
    spinmu::MuResult r = spinmu::compute_mu(g, structure);
    return dup_string(spinmu::mu_result_to_json(r).dump());
}

}  // namespace

spinmu_status spinmu_mu(const double* g_re, const double* g_im, int dim,
                        const char* structure_json, char** result_json) {
    return guarded([&] {
        require(g_re && structure_json && result_json && dim > 0, "spinmu_mu: null argument");
        const std::size_t n = static_cast<std::size_t>(dim);
        spinmu::Mat g(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                g(i, j) = spinmu::cplx(g_re[i * n + j], g_im ? g_im[i * n + j] : 0.0);
        spinmu::BlockStructure structure;
        try {
            structure = spinmu::block_structure_from_json(spinmu::json::parse(structure_json));
        } catch (const spinmu::json::exception& e) {
            throw spinmu::ConfigError(std::string("structure json: ") + e.what());
        }
        *result_json = mu_result_string(g, structure);
    });
}

spinmu_status spinmu_mu_files(const char* g_json_path, const char* structure_json_path,
                              char** result_json) {
    return guarded([&] {
        require(g_json_path && structure_json_path && result_json,
                "spinmu_mu_files: null argument");
        spinmu::Mat g = matrix_from_any_json(spinmu::load_json_file(g_json_path));
        spinmu::BlockStructure structure =
            spinmu::block_structure_from_json(spinmu::load_json_file(structure_json_path));
        *result_json = mu_result_string(g, structure);
    });
}

spinmu_status spinmu_synth_run(const char* config_path, const char* ensemble_out) {
    return guarded([&] {
        require(config_path, "spinmu_synth_run: null config path");
        spinmu::ExperimentConfig cfg = spinmu::config_from_file(config_path);
        std::string out_path = ensemble_out ? ensemble_out : cfg.ensemble_out;
        if (out_path.empty())
            throw spinmu::ConfigError(
                "synth: no output path (set synthesis.ensemble_out or pass --out)");
        auto ens = spinmu::synthesize(cfg.network, cfg.transfer, cfg.count, cfg.seed,
                                      cfg.synth_opts);
        spinmu::save_json_file(out_path, spinmu::ensemble_to_json(ens));
    });
}

spinmu_status spinmu_study_run(const char* study, const char* config_path,
                               const char* ensemble_path, const char* out_dir,
                               char** summary_json) {
    return guarded([&] {
        require(study && config_path, "spinmu_study_run: null argument");
        spinmu::ExperimentConfig cfg = spinmu::config_from_file(config_path);
        if (out_dir) cfg.output_dir = out_dir;
        spinmu::ControllerEnsemble ens =
            spinmu::resolve_ensemble(cfg, ensemble_path ? ensemble_path : "");

        const std::string name = study;
        spinmu::StudyResult res;
        if (name == "sensitivity") {
            res = spinmu::run_sensitivity_study(cfg, ens);
        } else if (name == "average") {
            res = spinmu::run_average_vs_instant_study(cfg, ens);
        } else if (name == "mu") {
            res = spinmu::run_mu_study(cfg, ens);
        } else {
            throw spinmu::ConfigError("unknown study '" + name +
                                      "' (expected sensitivity|average|mu)");
        }
        if (summary_json) *summary_json = dup_string(res.summary_json);
    });
}

spinmu_status spinmu_kendall_tau(const double* x, const double* y, int len, double* tau) {
    return guarded([&] {
        require(x && y && tau && len >= 0, "spinmu_kendall_tau: null argument");
        std::vector<double> xv(x, x + len), yv(y, y + len);
        *tau = spinmu::kendall_tau(xv, yv);
    });
}

spinmu_status spinmu_csv_tau(const char* csv_path, const char* x_col, const char* y_col,
                             double* tau) {
    return guarded([&] {
        require(csv_path && x_col && y_col && tau, "spinmu_csv_tau: null argument");
        auto cols = spinmu::read_csv_columns(csv_path, {x_col, y_col});
        *tau = spinmu::kendall_tau(cols.columns[0], cols.columns[1]);
    });
}

}  // extern "C"
