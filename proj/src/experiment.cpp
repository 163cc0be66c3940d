#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "csvfmt.hpp"
#include "errors.hpp"
#include "json_io.hpp"
#include "lft.hpp"
#include "parallel.hpp"
#include "svgplot.hpp"

namespace spinmu {

double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ConfigError("kendall_tau: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw ConfigError("kendall_tau: need at least two points");

    long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx == 0.0 && dy == 0.0) {
                ++ties_x;
                ++ties_y;
            } else if (dx == 0.0) {
                ++ties_x;
            } else if (dy == 0.0) {
                ++ties_y;
            } else if ((dx > 0.0) == (dy > 0.0)) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    const double n0 = 0.5 * static_cast<double>(n) * (n - 1);
    const double denom_x = n0 - static_cast<double>(ties_x);
    const double denom_y = n0 - static_cast<double>(ties_y);
    if (denom_x <= 0.0 || denom_y <= 0.0)
        throw NumericalError("kendall_tau: undefined, a list is entirely tied");
    return static_cast<double>(concordant - discordant) / std::sqrt(denom_x * denom_y);
}

ExperimentConfig config_from_file(const std::string& path) {
    json j = load_json_file(path);
    ExperimentConfig cfg;
    try {
        cfg.network = spec_from_json(j.at("network"));
        cfg.transfer.in_spin = j.at("transfer").at("in").get<int>();
        cfg.transfer.out_spin = j.at("transfer").at("out").get<int>();
        cfg.transfer.n = cfg.network.n;
        cfg.transfer.validate();

        cfg.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("ensemble")) cfg.ensemble_path = j.at("ensemble").get<std::string>();
        if (j.contains("synthesis")) {
            const auto& s = j.at("synthesis");
            cfg.count = s.value("count", cfg.count);
            cfg.seed = s.value("seed", cfg.seed);
            cfg.ensemble_out = s.value("ensemble_out", std::string{});
            cfg.synth_opts = synth_options_from_json(s);
        }
        if (j.contains("structures")) {
            for (const auto& sj : j.at("structures")) {
                StructureSelector sel;
                const std::string kind = sj.at("kind").get<std::string>();
                if (kind == "coupling") {
                    sel.kind = PerturbationKind::Coupling;
                } else if (kind == "leakage") {
                    sel.kind = PerturbationKind::Leakage;
                } else {
                    throw ConfigError("config: unknown structure kind '" + kind + "'");
                }
                sel.k = sj.at("k").get<int>();
                cfg.structures.push_back(sel);
            }
        }
        if (j.contains("s0")) {
            const auto& s0 = j.at("s0");
            if (s0.is_number()) {
                cfg.s0 = cplx(s0.get<double>(), 0.0);
            } else {
                cfg.s0 = cplx(s0.at(0).get<double>(), s0.at(1).get<double>());
            }
        }
        cfg.s0_offset = j.value("s0_offset", 0.0);
        cfg.output_dir = j.value("output_dir", std::string{"."});
    } catch (const json::exception& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    return cfg;
}

ControllerEnsemble resolve_ensemble(const ExperimentConfig& cfg, const std::string& override_path) {
    const std::string path = !override_path.empty() ? override_path : cfg.ensemble_path;
    if (!path.empty()) {
        ControllerEnsemble ens = ensemble_from_json(load_json_file(path));
        if (ens.spec.n != cfg.network.n || ens.spec.topology != cfg.network.topology ||
            ens.spec.coupling != cfg.network.coupling)
            throw ConfigError("ensemble " + path + " was built for a different network");
        if (ens.problem.in_spin != cfg.transfer.in_spin ||
            ens.problem.out_spin != cfg.transfer.out_spin)
            throw ConfigError("ensemble " + path + " was built for a different transfer");
        return ens;
    }
    return synthesize(cfg.network, cfg.transfer, cfg.count, cfg.seed, cfg.synth_opts);
}

namespace {

std::vector<PerturbationStructure> build_structures(const ExperimentConfig& cfg) {
    if (cfg.structures.empty())
        throw ConfigError("config: at least one perturbation structure is required");
    std::vector<PerturbationStructure> out;
    for (const auto& sel : cfg.structures) {
        out.push_back(sel.kind == PerturbationKind::Coupling
                          ? coupling_structure(cfg.network, sel.k)
                          : leakage_structure(cfg.network, sel.k));
    }
    return out;
}

std::filesystem::path ensure_output_dir(const ExperimentConfig& cfg) {
    std::filesystem::path dir(cfg.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string());
    return dir;
}

double mean_abs(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double e : v) s += std::abs(e);
    return s / static_cast<double>(v.size());
}

}  // namespace

std::vector<SweepEntry> sensitivity_sweep(const ControllerEnsemble& ens,
                                          const std::vector<PerturbationStructure>& structures) {
    if (ens.controllers.empty()) throw ConfigError("sensitivity_sweep: empty ensemble");
    if (structures.empty()) throw ConfigError("sensitivity_sweep: no structures");

    const Mat h = build_hamiltonian(ens.spec);
    const std::size_t m_count = ens.controllers.size();
    const std::size_t s_count = structures.size();

    std::vector<std::vector<SensitivityRecord>> records(m_count);
    parallel_for(m_count, [&](std::size_t i) {
        const Controller& c = ens.controllers[i];
        std::vector<SensitivityRecord> row;
        row.reserve(s_count);
        for (const auto& s : structures) {
            const double scale = s.kind == PerturbationKind::Leakage
                                     ? c.d[static_cast<std::size_t>(s.site - 1)]
                                     : 1.0;
            row.push_back(differential_sensitivity(h, c.d, s, scale, ens.problem, c.t_f));
        }
        records[i] = std::move(row);
    });

    std::vector<SweepEntry> out;
    out.reserve(m_count * (s_count + 1));
    for (std::size_t i = 0; i < m_count; ++i) {
        const Controller& c = ens.controllers[i];
        std::vector<double> vals, logs;
        for (const auto& rec : records[i]) {
            SweepEntry e;
            e.m = c.m;
            e.rank_avg = ens.avg_rank[i];
            e.p_tf = c.p_tf;
            e.p_avg = c.p_avg;
            e.structure = rec.structure_label;
            e.sensitivity = rec.value;
            e.log_sensitivity = rec.log_value;
            out.push_back(std::move(e));
            vals.push_back(rec.value);
            if (rec.log_value) logs.push_back(*rec.log_value);
        }
        SweepEntry mean;
        mean.m = c.m;
        mean.rank_avg = ens.avg_rank[i];
        mean.p_tf = c.p_tf;
        mean.p_avg = c.p_avg;
        mean.structure = "mean";
        mean.sensitivity = mean_abs(vals);
        if (logs.size() == records[i].size()) mean.log_sensitivity = mean_abs(logs);
        out.push_back(std::move(mean));
    }
    return out;
}

namespace {

double median_of_range(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    std::vector<double> w(v.begin() + lo, v.begin() + hi + 1);
    std::sort(w.begin(), w.end());
    const std::size_t n = w.size();
    return n % 2 == 1 ? w[n / 2] : 0.5 * (w[n / 2 - 1] + w[n / 2]);
}

}  // namespace

std::optional<CrossoverWindow> detect_crossover(const std::vector<double>& p_ranked,
                                                const std::vector<double>& sens_ranked,
                                                const std::vector<double>& mu_ranked) {
    const std::size_t n = p_ranked.size();
    if (sens_ranked.size() != n || mu_ranked.size() != n || n < 10) return std::nullopt;

    const double p_max = *std::max_element(p_ranked.begin(), p_ranked.end());
    const std::size_t min_width = std::max<std::size_t>(10, n / 5);
    const std::size_t step = std::max<std::size_t>(1, n / 100);

    CrossoverWindow best;
    for (std::size_t i = 0; i + min_width <= n; i += step) {
        for (std::size_t j = i + min_width - 1; j < n; j += step) {
            if (!(p_ranked[j] < 0.9 * p_max)) continue;
            const std::size_t mid = (i + j) / 2;
            const double mu_lo = median_of_range(mu_ranked, i, mid);
            const double mu_hi = median_of_range(mu_ranked, mid, j);
            const double s_lo = median_of_range(sens_ranked, i, mid);
            const double s_hi = median_of_range(sens_ranked, mid, j);
            const double mu_ratio = mu_hi / std::max(1e-300, mu_lo);
            const double sens_ratio = s_hi / std::max(1e-300, s_lo);
            const double score = std::min(mu_ratio, sens_ratio);
            if (score > best.score) {
                best.score = score;
                best.lo = i;
                best.hi = j;
            }
        }
    }
    if (best.score <= 1.25) return std::nullopt;
    return best;
}

namespace {

const char* kSweepHeader = "m,rank,p_tf,p_avg,structure,sensitivity,log_sensitivity\n";

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepEntry>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << kSweepHeader;
    for (const auto& e : rows) {
        out << e.m << ',' << e.rank_avg << ',' << csv_number(e.p_tf) << ',' << csv_number(e.p_avg)
            << ',' << e.structure << ',' << csv_number(e.sensitivity) << ','
            << csv_number(e.log_sensitivity) << '\n';
    }
}

}  // namespace

StudyResult run_sensitivity_study(const ExperimentConfig& cfg, const ControllerEnsemble& ens) {
    auto structures = build_structures(cfg);
    auto rows = sensitivity_sweep(ens, structures);
    auto dir = ensure_output_dir(cfg);

    StudyResult res;
    const auto csv_path = dir / "sensitivity.csv";
    write_sweep_csv(csv_path, rows);
    res.artifacts.push_back(csv_path.string());

    // mean-row profile for the plots
    std::vector<double> ms, p_tf, sens, log_sens;
    for (const auto& e : rows) {
        if (e.structure != "mean") continue;
        ms.push_back(e.m);
        p_tf.push_back(e.p_tf);
        sens.push_back(std::abs(e.sensitivity));
        log_sens.push_back(e.log_sensitivity ? std::abs(*e.log_sensitivity) : 0.0);
    }
    Panel top{"squared fidelity and differential sensitivity", "controller rank m", "value",
              {{"p_tf", ms, p_tf, "#1f77b4"}, {"|sensitivity|", ms, sens, "#d62728"}},
              false};
    Panel bottom{"squared fidelity and logarithmic sensitivity", "controller rank m", "value",
                 {{"p_tf", ms, p_tf, "#1f77b4"}, {"|log sensitivity|", ms, log_sens, "#d62728"}},
                 false};
    const auto svg_path = dir / "sensitivity.svg";
    write_svg_panels(svg_path.string(), {top, bottom});
    res.artifacts.push_back(svg_path.string());

    json summary{{"controllers", ens.controllers.size()},
                 {"structures", structures.size()},
                 {"rows", rows.size()}};
    res.summary_json = summary.dump();
    return res;
}

StudyResult run_average_vs_instant_study(const ExperimentConfig& cfg,
                                         const ControllerEnsemble& ens) {
    if (ens.controllers.empty()) throw ConfigError("study: empty ensemble");
    auto dir = ensure_output_dir(cfg);

    std::vector<double> ms, p_tf, p_avg;
    for (std::size_t i = 0; i < ens.controllers.size(); ++i) {
        ms.push_back(ens.controllers[i].m);
        p_tf.push_back(ens.controllers[i].p_tf);
        p_avg.push_back(ens.controllers[i].p_avg);
    }
    const double tau = kendall_tau(p_tf, p_avg);

    StudyResult res;
    const auto csv_path = dir / "average.csv";
    {
        std::ofstream out(csv_path);
        if (!out) throw ConfigError("cannot write " + csv_path.string());
        out << "m,rank,p_tf,p_avg\n";
        for (std::size_t i = 0; i < ens.controllers.size(); ++i) {
            out << ens.controllers[i].m << ',' << ens.avg_rank[i] << ','
                << csv_number(ens.controllers[i].p_tf) << ','
                << csv_number(ens.controllers[i].p_avg) << '\n';
        }
    }
    res.artifacts.push_back(csv_path.string());

    Panel panel{"instantaneous vs time-averaged fidelity", "controller rank m", "probability",
                {{"p_tf", ms, p_tf, "#1f77b4"}, {"p_avg", ms, p_avg, "#2ca02c"}},
                false};
    const auto svg_path = dir / "average.svg";
    write_svg_panels(svg_path.string(), {panel});
    res.artifacts.push_back(svg_path.string());

    json summary{{"tau", tau}};
    const auto sum_path = dir / "average_summary.json";
    save_json_file(sum_path.string(), summary);
    res.artifacts.push_back(sum_path.string());
    res.summary_json = summary.dump();
    return res;
}

std::vector<MuStudyRow> mu_study_rows(const ExperimentConfig& cfg, const ControllerEnsemble& ens) {
    if (ens.controllers.empty()) throw ConfigError("mu study: empty ensemble");
    auto structures = build_structures(cfg);

    const Mat h = build_hamiltonian(ens.spec);
    const OutputMatrix c = output_matrix(ens.problem);
    const cplx s0 = cfg.s0 + cplx(cfg.s0_offset, 0.0);
    const PlantMatrix plant = build_plant(h, c, structures, s0);

    BlockStructure uncertainty;
    for (std::size_t j = 0; j < structures.size(); ++j)
        uncertainty.blocks.push_back(
            UncertaintyBlock::repeated_scalar(static_cast<std::size_t>(ens.spec.n)));

    // mean row closes each controller's group in the sweep output
    const auto sweep = sensitivity_sweep(ens, structures);
    const std::size_t group = structures.size() + 1;

    const std::size_t m_count = ens.controllers.size();
    std::vector<MuStudyRow> rows(m_count);
    parallel_for(m_count, [&](std::size_t i) {
        const Controller& ctrl = ens.controllers[i];
        MuStudyRow row;
        row.m = ctrl.m;
        row.rank_avg = ens.avg_rank[i];
        row.p_tf = ctrl.p_tf;
        row.p_avg = ctrl.p_avg;
        row.sensitivity = std::abs(sweep[i * group + group - 1].sensitivity);
        GMatrix g = absorb_controller(plant, ctrl.d);
        MuResult mu = robust_performance_mu(g, uncertainty);
        row.mu_lower = mu.lower;
        row.mu_upper = mu.upper;
        rows[i] = row;
    });

    // order by the time-averaged rank I(m)
    std::sort(rows.begin(), rows.end(),
              [](const MuStudyRow& a, const MuStudyRow& b) { return a.rank_avg < b.rank_avg; });
    return rows;
}

StudyResult run_mu_study(const ExperimentConfig& cfg, const ControllerEnsemble& ens) {
    auto rows = mu_study_rows(cfg, ens);
    auto dir = ensure_output_dir(cfg);

    StudyResult res;
    const auto csv_path = dir / "mu.csv";
    {
        std::ofstream out(csv_path);
        if (!out) throw ConfigError("cannot write " + csv_path.string());
        out << "m,rank,p_tf,p_avg,sensitivity,mu_lower,mu_upper\n";
        for (const auto& r : rows) {
            out << r.m << ',' << r.rank_avg << ',' << csv_number(r.p_tf) << ','
                << csv_number(r.p_avg) << ',' << csv_number(r.sensitivity) << ','
                << csv_number(r.mu_lower) << ',' << csv_number(r.mu_upper) << '\n';
        }
    }
    res.artifacts.push_back(csv_path.string());

    std::vector<double> rank, p_avg, mu_lower, mu_upper, sens;
    for (const auto& r : rows) {
        rank.push_back(r.rank_avg);
        p_avg.push_back(r.p_avg);
        mu_lower.push_back(r.mu_lower);
        mu_upper.push_back(r.mu_upper);
        sens.push_back(r.sensitivity);
    }

    const double tau_sens_mu = kendall_tau(sens, mu_lower);
    const double tau_mu_p = kendall_tau(mu_lower, p_avg);

    auto window = detect_crossover(p_avg, sens, mu_lower);
    std::size_t lo = 0, hi = rows.size() - 1;
    if (window) {
        lo = window->lo;
        hi = window->hi;
    }
    std::vector<double> dmu, dp;
    for (std::size_t i = lo; i < hi; ++i) {
        dmu.push_back(mu_lower[i + 1] - mu_lower[i]);
        dp.push_back(p_avg[i + 1] - p_avg[i]);
    }
    double tau_incr = 0.0;
    bool incr_defined = dmu.size() >= 2;
    if (incr_defined) {
        try {
            tau_incr = kendall_tau(dmu, dp);
        } catch (const NumericalError&) {
            incr_defined = false;
        }
    }

    // interchange artifacts: the open-loop plant and the top-ranked
    // controller's absorbed G, consumable by `spinmu mu --g`
    {
        auto structures = build_structures(cfg);
        const Mat h = build_hamiltonian(ens.spec);
        const OutputMatrix c = output_matrix(ens.problem);
        const PlantMatrix plant =
            build_plant(h, c, structures, cfg.s0 + cplx(cfg.s0_offset, 0.0));
        const auto plant_path = dir / "plant.json";
        save_json_file(plant_path.string(), plant_to_json(plant));
        res.artifacts.push_back(plant_path.string());
        for (std::size_t i = 0; i < ens.controllers.size(); ++i) {
            if (ens.avg_rank[i] != 1) continue;
            GMatrix g = absorb_controller(plant, ens.controllers[i].d);
            const auto g_path = dir / "g_rank1.json";
            save_json_file(g_path.string(), gmatrix_to_json(g));
            res.artifacts.push_back(g_path.string());
            break;
        }
    }

    Panel top{"mu bounds vs time-averaged fidelity", "rank by p_avg", "value",
              {{"p_avg", rank, p_avg, "#2ca02c"},
               {"mu_lower", rank, mu_lower, "#d62728"},
               {"mu_upper", rank, mu_upper, "#ff9896"}},
              false};
    Panel bottom{"differential sensitivity", "rank by p_avg", "|sensitivity|",
                 {{"|sensitivity|", rank, sens, "#9467bd"}},
                 false};
    const auto svg_path = dir / "mu.svg";
    write_svg_panels(svg_path.string(), {top, bottom});
    res.artifacts.push_back(svg_path.string());

    json summary{{"tau_sens_mu", tau_sens_mu},
                 {"tau_mu_p", tau_mu_p},
                 {"tau_mu_p_incremental", incr_defined ? json(tau_incr) : json()},
                 {"window_found", static_cast<bool>(window)},
                 {"window_lo_rank", window ? json(lo + 1) : json()},
                 {"window_hi_rank", window ? json(hi + 1) : json()},
                 {"window_score", window ? json(window->score) : json()}};
    const auto sum_path = dir / "mu_summary.json";
    save_json_file(sum_path.string(), summary);
    res.artifacts.push_back(sum_path.string());
    res.summary_json = summary.dump();
    return res;
}

}  // namespace spinmu
