#include "json_io.hpp"

#include <fstream>

#include "errors.hpp"

namespace spinmu {

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j)
            row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat mat_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("matrix json: expected nonempty array");
    const std::size_t rows = j.size();
    const std::size_t cols = j.at(0).size();
    Mat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& row = j.at(i);
        if (row.size() != cols) throw ConfigError("matrix json: ragged rows");
        for (std::size_t c = 0; c < cols; ++c) {
            const auto& e = row.at(c);
            if (e.is_number()) {
                m(i, c) = cplx(e.get<double>(), 0.0);
            } else if (e.is_array() && e.size() == 2) {
                m(i, c) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
            } else {
                throw ConfigError("matrix json: entries must be numbers or [re, im] pairs");
            }
        }
    }
    return m;
}

json spec_to_json(const SpinNetworkSpec& spec) {
    return json{{"n", spec.n},
                {"topology", topology_name(spec.topology)},
                {"coupling", coupling_name(spec.coupling)}};
}

SpinNetworkSpec spec_from_json(const json& j) {
    SpinNetworkSpec spec;
    try {
        spec.n = j.at("n").get<int>();
        spec.topology = topology_from_name(j.at("topology").get<std::string>());
        spec.coupling = coupling_from_name(j.at("coupling").get<std::string>());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("network spec json: ") + e.what());
    }
    spec.validate();
    return spec;
}

json synth_options_to_json(const SynthOptions& opts) {
    return json{{"bias_bound", opts.bias_bound},
                {"t_min", opts.t_min},
                {"t_max", opts.t_max},
                {"max_iters", opts.max_iters},
                {"grad_tol", opts.grad_tol},
                {"time_penalty", opts.time_penalty},
                {"restart_bias_range", opts.restart_bias_range}};
}

SynthOptions synth_options_from_json(const json& j) {
    SynthOptions opts;
    try {
        opts.bias_bound = j.value("bias_bound", opts.bias_bound);
        opts.t_min = j.value("t_min", opts.t_min);
        opts.t_max = j.value("t_max", opts.t_max);
        opts.max_iters = j.value("max_iters", opts.max_iters);
        opts.grad_tol = j.value("grad_tol", opts.grad_tol);
        opts.time_penalty = j.value("time_penalty", opts.time_penalty);
        opts.restart_bias_range = j.value("restart_bias_range", opts.restart_bias_range);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("synthesis options json: ") + e.what());
    }
    return opts;
}

json ensemble_to_json(const ControllerEnsemble& ens) {
    json controllers = json::array();
    for (const auto& c : ens.controllers) {
        controllers.push_back(json{{"m", c.m},
                                   {"d", c.d},
                                   {"t_f", c.t_f},
                                   {"p_tf", c.p_tf},
                                   {"p_avg", c.p_avg}});
    }
    return json{{"spec", spec_to_json(ens.spec)},
                {"problem", json{{"in", ens.problem.in_spin}, {"out", ens.problem.out_spin}}},
                {"controllers", std::move(controllers)},
                {"avg_rank", ens.avg_rank},
                {"seed", ens.seed},
                {"opts", synth_options_to_json(ens.opts)}};
}

ControllerEnsemble ensemble_from_json(const json& j) {
    ControllerEnsemble ens;
    try {
        ens.spec = spec_from_json(j.at("spec"));
        ens.problem.in_spin = j.at("problem").at("in").get<int>();
        ens.problem.out_spin = j.at("problem").at("out").get<int>();
        ens.problem.n = ens.spec.n;
        for (const auto& cj : j.at("controllers")) {
            Controller c;
            c.m = cj.at("m").get<int>();
            c.d = cj.at("d").get<std::vector<double>>();
            c.t_f = cj.at("t_f").get<double>();
            c.p_tf = cj.at("p_tf").get<double>();
            c.p_avg = cj.value("p_avg", 0.0);
            ens.controllers.push_back(std::move(c));
        }
        ens.avg_rank = j.value("avg_rank", std::vector<int>{});
        ens.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("opts")) ens.opts = synth_options_from_json(j.at("opts"));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("ensemble json: ") + e.what());
    }
    ens.problem.validate();
    for (const auto& c : ens.controllers)
        if (c.d.size() != static_cast<std::size_t>(ens.spec.n))
            throw ConfigError("ensemble json: controller bias length does not match network");
    if (ens.avg_rank.empty()) ens.avg_rank = rank_by_time_average(ens.controllers);
    return ens;
}

json gmatrix_to_json(const GMatrix& g) {
    return json{{"g11", mat_to_json(g.g11)}, {"g12", mat_to_json(g.g12)},
                {"g21", mat_to_json(g.g21)}, {"g22", mat_to_json(g.g22)},
                {"s0", json::array({g.s0.real(), g.s0.imag()})},
                {"n", g.n},
                {"channels", g.channels},
                {"labels", g.structure_labels}};
}

GMatrix gmatrix_from_json(const json& j) {
    GMatrix g;
    try {
        g.g11 = mat_from_json(j.at("g11"));
        g.g12 = mat_from_json(j.at("g12"));
        g.g21 = mat_from_json(j.at("g21"));
        g.g22 = mat_from_json(j.at("g22"));
        if (j.contains("s0")) g.s0 = cplx(j.at("s0").at(0).get<double>(), j.at("s0").at(1).get<double>());
        g.n = j.value("n", g.g22.rows());
        g.channels = j.value("channels", std::size_t{0});
        g.structure_labels = j.value("labels", std::vector<std::string>{});
    } catch (const json::exception& e) {
        throw ConfigError(std::string("G matrix json: ") + e.what());
    }
    if (g.channels == 0 && g.n != 0) g.channels = g.g11.rows() / g.n;
    return g;
}

json plant_to_json(const PlantMatrix& p) {
    json kinds = json::array();
    for (auto k : p.channel_kinds)
        kinds.push_back(k == PerturbationKind::Coupling ? "coupling" : "leakage");
    return json{{"p", mat_to_json(p.p)},
                {"n", p.n},
                {"channels", p.channels},
                {"s0", json::array({p.s0.real(), p.s0.imag()})},
                {"labels", p.structure_labels},
                {"kinds", std::move(kinds)},
                {"sites", p.channel_sites}};
}

json block_structure_to_json(const BlockStructure& s) {
    json blocks = json::array();
    for (const auto& b : s.blocks) {
        if (b.kind == BlockKind::RepeatedScalar)
            blocks.push_back(json{{"kind", "repeated_scalar"}, {"dim", b.rows}});
        else
            blocks.push_back(json{{"kind", "full"}, {"rows", b.rows}, {"cols", b.cols}});
    }
    return json{{"blocks", std::move(blocks)}};
}

BlockStructure block_structure_from_json(const json& j) {
    BlockStructure s;
    try {
        for (const auto& bj : j.at("blocks")) {
            const std::string kind = bj.at("kind").get<std::string>();
            if (kind == "repeated_scalar") {
                s.blocks.push_back(UncertaintyBlock::repeated_scalar(bj.at("dim").get<std::size_t>()));
            } else if (kind == "full") {
                s.blocks.push_back(UncertaintyBlock::full(bj.at("rows").get<std::size_t>(),
                                                          bj.at("cols").get<std::size_t>()));
            } else {
                throw ConfigError("block structure json: unknown kind '" + kind + "'");
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("block structure json: ") + e.what());
    }
    if (s.blocks.empty()) throw ConfigError("block structure json: no blocks");
    return s;
}

json mu_result_to_json(const MuResult& r) {
    return json{{"lower", r.lower},
                {"upper", r.upper},
                {"witness_norm", r.witness_norm},
                {"converged", r.converged},
                {"iterations", r.iterations}};
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
    return j;
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace spinmu
