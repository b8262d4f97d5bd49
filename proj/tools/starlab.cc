// Copyright 2026 The starlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// starlab: batch front-end for the protocol simulations and cost models.
//
// Every subcommand reads a flat set of fields from an optional JSON config
// (--config) and lets any field be overridden by a flag of the same name
// with '_' written as '-'. Unknown config keys are rejected.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "star/control_error.h"
#include "star/io.h"
#include "star/prep_protocol.h"
#include "star/resource_estimator.h"
#include "star/rotation_channel.h"

#ifndef STARLAB_VERSION
#define STARLAB_VERSION "dev"
#endif

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Kind { Int, Double, Bool, String, IntList, DoubleList, StringList };

struct Field {
    std::string name;
    Kind kind;
    json value;
    std::string help;
    /// Optional config-file section the field may also appear under.
    std::string section;
};

struct RunOptions {
    uint64_t seed = 1;
    int threads = 1;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<json> rows;
    /// Per-row structured data emitted only in JSON output.
    std::vector<json> details;
};

struct Command {
    std::string name;
    std::string help;
    std::vector<Field> fields;
    std::function<Table(const json &, const RunOptions &)> run;
};

bool is_list(Kind k) {
    return k == Kind::IntList || k == Kind::DoubleList || k == Kind::StringList;
}

std::string flag_name(std::string name) {
    for (auto &c : name) {
        if (c == '_') {
            c = '-';
        }
    }
    return "--" + name;
}

json check_scalar(const std::string &name, Kind k, const json &v) {
    bool ok = false;
    switch (k) {
        case Kind::Int:
        case Kind::IntList:
            ok = v.is_number_integer();
            break;
        case Kind::Double:
        case Kind::DoubleList:
            ok = v.is_number();
            break;
        case Kind::Bool:
            ok = v.is_boolean();
            break;
        case Kind::String:
        case Kind::StringList:
            ok = v.is_string();
            break;
    }
    if (!ok) {
        throw ConfigError("field '" + name + "' has the wrong type: " + v.dump());
    }
    return v;
}

json check_value(const Field &f, const json &v) {
    if (!is_list(f.kind)) {
        return check_scalar(f.name, f.kind, v);
    }
    json out = json::array();
    if (v.is_array()) {
        if (v.empty()) {
            throw ConfigError("field '" + f.name + "' must not be empty");
        }
        for (const auto &e : v) {
            out.push_back(check_scalar(f.name, f.kind, e));
        }
    } else {
        out.push_back(check_scalar(f.name, f.kind, v));
    }
    return out;
}

json parse_token(const Field &f, const std::string &s) {
    try {
        size_t used = 0;
        switch (f.kind) {
            case Kind::Int:
            case Kind::IntList: {
                long long v = std::stoll(s, &used);
                if (used != s.size()) {
                    break;
                }
                return v;
            }
            case Kind::Double:
            case Kind::DoubleList: {
                double v = std::stod(s, &used);
                if (used != s.size()) {
                    break;
                }
                return v;
            }
            case Kind::Bool:
                if (s == "true" || s == "1") {
                    return true;
                }
                if (s == "false" || s == "0") {
                    return false;
                }
                break;
            case Kind::String:
            case Kind::StringList:
                return s;
        }
    } catch (const std::logic_error &) {
    }
    throw ConfigError("cannot parse '" + s + "' for " + flag_name(f.name));
}

/// Applies a config document on top of the defaults in `cfg`.
void merge_config(const Command &cmd, const json &doc, json &cfg) {
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    auto find = [&](const std::string &key, const std::string &section) -> const Field * {
        for (const auto &f : cmd.fields) {
            if (f.name == key && (section.empty() || f.section == section)) {
                return &f;
            }
        }
        return nullptr;
    };
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        bool is_section = it.value().is_object() && std::any_of(cmd.fields.begin(), cmd.fields.end(), [&](const Field &f) {
                              return f.section == it.key();
                          });
        if (is_section) {
            for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) {
                const Field *f = find(jt.key(), it.key());
                if (!f) {
                    throw ConfigError("unknown config field '" + it.key() + "." + jt.key() + "'");
                }
                cfg[f->name] = check_value(*f, jt.value());
            }
            continue;
        }
        const Field *f = find(it.key(), "");
        if (!f) {
            throw ConfigError("unknown config field '" + it.key() + "'");
        }
        cfg[f->name] = check_value(*f, it.value());
    }
}

std::string csv_cell(const json &v) {
    if (v.is_string()) {
        auto s = v.get<std::string>();
        if (s.find_first_of(",\"\n") != std::string::npos) {
            std::string q = "\"";
            for (char c : s) {
                q += c == '"' ? std::string("\"\"") : std::string(1, c);
            }
            return q + "\"";
        }
        return s;
    }
    if (v.is_number_float()) {
        char buf[40];
        // Adding 0.0 prints -0 as 0.
        std::snprintf(buf, sizeof buf, "%.10g", v.get<double>() + 0.0);
        return buf;
    }
    return v.dump();
}

void write_table(std::ostream &out, const std::string &format, const std::string &command, const json &echo, const Table &t) {
    if (format == "json") {
        json doc;
        doc["version"] = STARLAB_VERSION;
        doc["command"] = command;
        doc["config"] = echo;
        doc["rows"] = json::array();
        for (size_t r = 0; r < t.rows.size(); r++) {
            json row = t.rows[r];
            if (r < t.details.size() && !t.details[r].is_null()) {
                row["details"] = t.details[r];
            }
            doc["rows"].push_back(row);
        }
        out << doc.dump(2) << '\n';
        return;
    }
    out << "# starlab " << STARLAB_VERSION << ' ' << command << ' ' << echo.dump() << '\n';
    for (size_t c = 0; c < t.columns.size(); c++) {
        out << (c ? "," : "") << t.columns[c];
    }
    out << '\n';
    for (const auto &row : t.rows) {
        for (size_t c = 0; c < t.columns.size(); c++) {
            out << (c ? "," : "") << csv_cell(row.at(t.columns[c]));
        }
        out << '\n';
    }
}

json row_of(const std::vector<std::string> &cols, const std::vector<json> &vals) {
    json r = json::object();
    for (size_t i = 0; i < cols.size(); i++) {
        r[cols[i]] = vals[i];
    }
    return r;
}

// Default theta* grid for the sweeps.
const json kThetaGrid = json::array({1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3});

Command prep_sim_command() {
    Command c;
    c.name = "prep-sim";
    c.help = "Monte Carlo of the transversal multi-rotation preparation";
    c.fields = {
        {"m", Kind::IntList, json::array({2}), "rotation blocks per row (1..3)", ""},
        {"d", Kind::IntList, json::array({6}), "code distance; k = d / m", ""},
        {"theta", Kind::DoubleList, json::array({1e-3}), "target logical angle theta*", ""},
        {"p", Kind::DoubleList, json::array({1e-3}), "physical error rate", ""},
        {"mode", Kind::StringList, json::array({"EC"}), "EC or PS", ""},
        {"shots", Kind::Int, 1000000, "trials per stratum (stratified) or in total (plain)", ""},
        {"plan", Kind::String, "stratified", "stratified or plain", ""},
        {"native", Kind::Bool, false, "noisy native R_zz instead of CNOT + virtual Rz", ""},
        {"idle_p", Kind::Double, 0.0, "idle depolarizing rate", ""},
        {"extra_rounds", Kind::Int, 0, "non-rejecting rounds after the two checked ones", ""},
    };
    c.run = [](const json &cfg, const RunOptions &opt) {
        star::SamplingPlan plan;
        if (cfg["plan"] == "stratified") {
            plan = star::SamplingPlan::Stratified;
        } else if (cfg["plan"] == "plain") {
            plan = star::SamplingPlan::Plain;
        } else {
            throw ConfigError("plan must be 'stratified' or 'plain'");
        }
        if (cfg["shots"].get<long long>() < 1) {
            throw ConfigError("shots must be positive");
        }
        std::vector<star::ProtocolConfig> grid;
        for (int m : cfg["m"]) {
            for (int d : cfg["d"]) {
                for (double th : cfg["theta"]) {
                    for (double p : cfg["p"]) {
                        for (const std::string mode : cfg["mode"]) {
                            star::ProtocolConfig pc;
                            pc.m = m;
                            pc.d = d;
                            if (m < 1 || d % m != 0) {
                                throw ConfigError("d = " + std::to_string(d) + " is not a multiple of m = " + std::to_string(m));
                            }
                            pc.k = d / m;
                            pc.theta_star = th;
                            if (mode == "EC") {
                                pc.mode = star::PrepMode::EC;
                            } else if (mode == "PS") {
                                pc.mode = star::PrepMode::PS;
                            } else {
                                throw ConfigError("mode must be 'EC' or 'PS'");
                            }
                            pc.noise.p = p;
                            pc.noise.idle_p = cfg["idle_p"];
                            pc.noise.native_2q_rotation = cfg["native"];
                            pc.extra_rounds = cfg["extra_rounds"];
                            pc.validate();
                            grid.push_back(pc);
                        }
                    }
                }
            }
        }
        Table t;
        t.columns = {"m", "k", "d", "theta", "p", "mode", "plan", "shots", "accepted", "p_suc", "p_suc_sigma",
                     "infidelity", "infidelity_sigma", "infidelity_theory", "trace_distance", "trace_distance_sigma",
                     "trace_distance_theory", "p_ud", "p_ud_sigma", "p_ud_theory", "hazard", "hazard_sigma",
                     "supply_rate", "supply_rate_sigma"};
        for (const auto &pc : grid) {
            star::Protocol P(pc);
            auto st = star::estimate_stats(P, plan, cfg["shots"].get<uint64_t>(), opt.seed, opt.threads);
            uint64_t accepted = 0;
            for (const auto &s : st.strata) {
                accepted += s.passed;
            }
            double pud = (pc.noise.native_2q_rotation ? 1.0 : 2.0) / 15.0 * pc.k * pc.noise.p;
            t.rows.push_back(row_of(t.columns, {pc.m, pc.k, pc.d, pc.theta_star, pc.noise.p, star::mode_name(pc.mode), cfg["plan"],
                                                cfg["shots"], accepted, st.p_suc, st.p_suc_sigma, st.infidelity,
                                                st.infidelity_sigma, star::infidelity_theory(pc.theta_star, pc.k, pud),
                                                st.trace_distance, st.trace_distance_sigma,
                                                star::trace_distance_theory(pc.theta_star, pc.k, pud), st.p_ud, st.p_ud_sigma, pud,
                                                st.hazard, st.hazard_sigma, st.supply_rate, st.supply_rate_sigma}));
        }
        return t;
    };
    return c;
}

Command rus_factor_command() {
    Command c;
    c.name = "rus-factor";
    c.help = "Repeat-until-success averaged channel and its prefactor alpha_RUS";
    c.fields = {
        {"k", Kind::IntList, json::array({2, 3, 4}), "rotations per block row", ""},
        {"theta", Kind::DoubleList, kThetaGrid, "target angles", ""},
        {"p", Kind::Double, 1e-4, "physical error rate", ""},
        {"pud_coefficient", Kind::Double, 1.0 / 15.0, "P_ud / (k p)", ""},
        {"canceled", Kind::Bool, false, "coherent cancellation of the over-rotation", ""},
        {"switching", Kind::Bool, false, "fall back to the two-qubit encoding when cheaper", ""},
        {"switch_rate", Kind::Double, 1.0 / 15.0, "fallback Z-error rate over p", ""},
    };
    c.run = [](const json &cfg, const RunOptions &) {
        Table t;
        t.columns = {"k", "theta", "x", "y", "diamond", "alpha", "alpha_over_k", "terms"};
        star::RusOptions ro;
        ro.canceled = cfg["canceled"];
        ro.switching = cfg["switching"];
        ro.switch_rate = cfg["switch_rate"];
        double p = cfg["p"];
        if (!(p > 0 && p < 1)) {
            throw ConfigError("p must lie in (0, 1)");
        }
        for (int k : cfg["k"]) {
            if (k < 1) {
                throw ConfigError("k must be positive");
            }
            star::RotationChannelModel m;
            m.k = k;
            m.p = p;
            m.pud_coefficient = cfg["pud_coefficient"];
            for (double th : cfg["theta"]) {
                if (!(th > 0 && th <= std::numbers::pi / 8)) {
                    throw ConfigError("theta must lie in (0, pi/8]");
                }
                auto r = star::rus_average(m, th, ro);
                t.rows.push_back(row_of(t.columns, {k, th, r.x, r.y, r.diamond, r.alpha, r.alpha / k, r.terms}));
            }
        }
        return t;
    };
    return c;
}

Command control_error_command() {
    Command c;
    c.name = "control-error";
    c.help = "Relative angle error from per-block over-rotations, bare and randomized";
    c.fields = {
        {"k", Kind::IntList, json::array({3}), "rotations per block row", ""},
        {"theta", Kind::DoubleList, kThetaGrid, "target angles", ""},
        {"phi_max", Kind::Double, 1e-3, "over-rotations drawn from U[0, phi_max]", ""},
        {"samples", Kind::Int, 100, "over-rotation draws", ""},
        {"variant", Kind::StringList, json::array({"bare", "randomized"}), "bare and/or randomized", ""},
    };
    c.run = [](const json &cfg, const RunOptions &opt) {
        Table t;
        t.columns = {"k", "theta", "variant", "relative_error", "sem", "mean_sum_phi2", "ratio_to_sum_phi2"};
        star::OverRotationSpec spec;
        spec.phi_max = cfg["phi_max"];
        spec.samples = cfg["samples"];
        spec.seed = opt.seed;
        std::vector<double> grid = cfg["theta"];
        for (int k : cfg["k"]) {
            for (const std::string v : cfg["variant"]) {
                if (v != "bare" && v != "randomized") {
                    throw ConfigError("variant must be 'bare' or 'randomized'");
                }
                for (const auto &pt : star::relative_error_curves(grid, k, spec, v == "randomized")) {
                    double ratio = pt.mean_sum_phi2 > 0 ? pt.relative_error / pt.mean_sum_phi2 : 0.0;
                    t.rows.push_back(row_of(t.columns, {k, pt.theta_star, v, pt.relative_error, pt.sem, pt.mean_sum_phi2, ratio}));
                }
            }
        }
        return t;
    };
    return c;
}

star::PauliHamiltonian load_model(const json &cfg, const RunOptions &opt) {
    std::string model = cfg["model"];
    if (model == "hubbard") {
        return star::hubbard_2d(cfg["lx"], cfg["ly"], cfg["t"], cfg["U"], cfg["periodic"]);
    }
    if (model == "heisenberg") {
        star::Rng rng = star::make_stream(opt.seed, 0);
        return star::heisenberg_disordered(cfg["n"], cfg["disorder"], rng);
    }
    if (model == "file") {
        std::string path = cfg["hamiltonian"];
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open Hamiltonian file '" + path + "'");
        }
        return star::read_hamiltonian_jsonl(in);
    }
    throw ConfigError("model must be 'hubbard', 'heisenberg' or 'file'");
}

std::vector<Field> model_fields(const std::string &section) {
    return {
        {"model", Kind::String, "hubbard", "hubbard, heisenberg or file", section},
        {"lx", Kind::Int, 8, "Hubbard lattice width", section},
        {"ly", Kind::Int, 8, "Hubbard lattice height", section},
        {"t", Kind::Double, 1.0, "Hubbard hopping", section},
        {"U", Kind::Double, 4.0, "Hubbard on-site interaction", section},
        {"periodic", Kind::Bool, true, "periodic Hubbard boundaries", section},
        {"n", Kind::Int, 100, "Heisenberg chain length", section},
        {"disorder", Kind::Double, 1.0, "Heisenberg disorder strength h", section},
        {"hamiltonian", Kind::String, "", "JSONL Hamiltonian for model=file", section},
    };
}

Command estimate_command() {
    Command c;
    c.name = "estimate";
    c.help = "Space-time cost of a QCELS ground-state energy estimate";
    c.fields = model_fields("model");
    std::vector<Field> rest = {
        {"p", Kind::DoubleList, json::array({1e-4}), "physical error rate", "device"},
        {"cycle_us", Kind::Double, 1.0, "code cycle in microseconds", "device"},
        {"alpha", Kind::Double, 1.5, "alpha_RUS", "device"},
        {"safety", Kind::Double, 100.0, "safety factor on the Clifford budget", "device"},
        {"gamma2_cap", Kind::Double, std::exp(8.0), "per-circuit sampling overhead cap", "device"},
        {"delta", Kind::Double, 0.06, "QCELS spectral gap parameter", "qcels"},
        {"K", Kind::Int, 5, "time points per level", "qcels"},
        {"N_s", Kind::Int, 100, "shots per time point", "qcels"},
        {"eps_target", Kind::Double, 1e-2, "target precision", "qcels"},
        {"eps_trotter", Kind::Double, 5e-3, "Trotter share when not optimized", "qcels"},
        {"eps_qpe", Kind::Double, 5e-3, "QPE share when not optimized", "qcels"},
        {"optimize", Kind::Bool, false, "optimize the error split", "qcels"},
        {"W", Kind::Double, 0.0, "Trotter error norm", ""},
        {"target_d", Kind::Int, 0, "pick W at the center of the window giving this d", ""},
        {"target_parallel_s", Kind::Double, 0.0, "calibrate W to this fully parallel time", ""},
    };
    c.fields.insert(c.fields.end(), rest.begin(), rest.end());
    c.run = [](const json &cfg, const RunOptions &opt) {
        auto ham = load_model(cfg, opt);
        auto hs = star::HamiltonianSummary::of(ham);
        star::QcelsParams q;
        q.delta = cfg["delta"];
        q.K = cfg["K"];
        q.N_s = cfg["N_s"];
        q.eps_target = cfg["eps_target"];
        q.eps_trotter = cfg["eps_trotter"];
        q.eps_qpe = cfg["eps_qpe"];
        int sources = (cfg["W"].get<double>() > 0) + (cfg["target_d"].get<int>() > 0) + (cfg["target_parallel_s"].get<double>() > 0);
        if (sources != 1) {
            throw ConfigError("give exactly one of W, target_d, target_parallel_s");
        }
        Table t;
        t.columns = {"model", "n_sys", "L", "lambda", "c_av", "p", "W", "eps_trotter", "eps_qpe", "J", "T_max", "T_max_levels",
                     "T_total", "N_max", "N_total", "d", "n_patch", "physical_qubits", "data_qubits", "total_s", "total_h",
                     "parallel_s", "gamma2_max", "mitigation_dominated"};
        for (double p : cfg["p"]) {
            star::DeviceParams dev;
            dev.p = p;
            dev.cycle_us = cfg["cycle_us"];
            dev.alpha = cfg["alpha"];
            dev.safety = cfg["safety"];
            dev.gamma2_cap = cfg["gamma2_cap"];
            dev.validate();
            q.validate();
            double W = cfg["W"];
            if (cfg["target_d"].get<int>() > 0) {
                auto win = star::trotter_norm_window(cfg["target_d"], dev, q, hs);
                if (win.empty()) {
                    throw std::runtime_error("no W gives d = " + std::to_string(cfg["target_d"].get<int>()));
                }
                W = win.center();
            } else if (cfg["target_parallel_s"].get<double>() > 0) {
                W = star::calibrate_trotter_norm(cfg["target_parallel_s"], dev, q, hs).W;
            }
            star::QcelsParams qq = cfg["optimize"].get<bool>() ? star::optimize_error_split(q.eps_target, dev, q, hs, W) : q;
            auto r = star::estimate(dev, qq, hs, W);
            t.rows.push_back(row_of(t.columns, {cfg["model"], hs.n_sys, hs.L, hs.lambda, hs.c_av, p, W, r.eps_trotter, r.eps_qpe, r.J,
                                                r.T_max, r.T_max_levels, r.T_total, r.N_max, r.N_total, r.d, r.n_patch,
                                                r.physical_qubits, r.data_qubits, r.time.total_s, r.time.total_s / 3600,
                                                r.time.parallel_s, r.time.gamma2_max, r.time.mitigation_dominated}));
            json ledger = json::array();
            for (const auto &lc : r.time.ledger) {
                ledger.push_back({{"j", lc.j}, {"tau", lc.tau}, {"gamma2_max", lc.gamma2_max}, {"time_s", lc.time_us * 1e-6}});
            }
            t.details.push_back({{"ledger", ledger}});
        }
        return t;
    };
    return c;
}

Command angle_budget_command() {
    Command c;
    c.name = "angle-budget";
    c.help = "Rotation-angle budget, evolution-time and 1-norm limits under mitigation";
    c.fields = {
        {"p", Kind::DoubleList, json::array({1e-4}), "physical error rate", ""},
        {"alpha", Kind::Double, 1.5, "alpha_RUS", ""},
        {"cap", Kind::Double, 1.0, "allowed total logical error P_total", ""},
        {"lambda", Kind::Double, 0.0, "Hamiltonian 1-norm; 0 uses the disordered Heisenberg mean", ""},
        {"n", Kind::Int, 100, "Heisenberg chain length", ""},
        {"disorder", Kind::Double, 1.0, "Heisenberg disorder strength h", ""},
        {"eps", Kind::Double, 1e-3, "QPE precision", ""},
        {"delta", Kind::Double, 0.06, "QCELS spectral gap parameter", ""},
    };
    c.run = [](const json &cfg, const RunOptions &) {
        double lambda = cfg["lambda"];
        if (lambda <= 0) {
            lambda = star::heisenberg_expected_one_norm(cfg["n"], cfg["disorder"]);
        }
        double alpha = cfg["alpha"], cap = cfg["cap"];
        Table t;
        t.columns = {"p", "alpha", "cap", "theta_budget", "gamma2_at_cap", "lambda", "max_evolution_time", "eps", "delta",
                     "lambda_bound"};
        for (double p : cfg["p"]) {
            t.rows.push_back(row_of(t.columns, {p, alpha, cap, star::angle_budget(p, alpha, cap), std::exp(4 * cap), lambda,
                                                star::max_evolution_time(lambda, p, alpha), cfg["eps"], cfg["delta"],
                                                star::qpe_one_norm_bound(cfg["eps"], cfg["delta"], alpha, p)}));
        }
        return t;
    };
    return c;
}

Command hubbard_info_command() {
    Command c;
    c.name = "hubbard-info";
    c.help = "Term count, 1-norm and average clock cost of a Hamiltonian";
    c.fields = model_fields("");
    c.fields.push_back({"dump", Kind::String, "", "also write the Pauli terms as JSONL to this path", ""});
    c.run = [](const json &cfg, const RunOptions &opt) {
        auto h = load_model(cfg, opt);
        if (h.num_terms() == 0) {
            throw ConfigError("the Hamiltonian has no terms");
        }
        std::string dump = cfg["dump"];
        if (!dump.empty()) {
            std::ofstream out(dump);
            if (!out) {
                throw ConfigError("cannot write '" + dump + "'");
            }
            star::write_hamiltonian_jsonl(out, h);
        }
        Table t;
        t.columns = {"model", "n_qubits", "L", "lambda", "c_av", "L_per_site", "lambda_per_site"};
        double sites = h.num_qubits() / 2.0;
        t.rows.push_back(row_of(t.columns, {cfg["model"], h.num_qubits(), h.num_terms(), h.one_norm(), star::avg_clock(h),
                                            h.num_terms() / sites, h.one_norm() / sites}));
        return t;
    };
    return c;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"starlab: magic-state rotation protocols and cost models"};
    app.set_version_flag("--version", STARLAB_VERSION);
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, output_path, format = "csv";
    RunOptions opt;
    app.add_option("-c,--config", config_path, "JSON config file");
    app.add_option("-o,--output", output_path, "output file (default stdout)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", opt.seed, "RNG seed");
    app.add_option("--threads", opt.threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

    std::vector<Command> commands = {prep_sim_command(),     rus_factor_command(),   control_error_command(),
                                     estimate_command(),     angle_budget_command(), hubbard_info_command()};
    std::map<std::string, std::map<std::string, std::vector<std::string>>> raw;
    std::map<std::string, std::map<std::string, CLI::Option *>> flags;
    std::map<std::string, CLI::App *> subs;
    for (const auto &cmd : commands) {
        auto *sub = app.add_subcommand(cmd.name, cmd.help);
        subs[cmd.name] = sub;
        for (const auto &f : cmd.fields) {
            auto &store = raw[cmd.name][f.name];
            auto *o = sub->add_option(flag_name(f.name), store, f.help + " [" + f.value.dump() + "]");
            if (is_list(f.kind)) {
                o->delimiter(',');
            } else {
                o->expected(1);
            }
            flags[cmd.name][f.name] = o;
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    const Command *cmd = nullptr;
    for (const auto &c : commands) {
        if (subs[c.name]->parsed()) {
            cmd = &c;
        }
    }
    if (opt.threads == 0) {
        opt.threads = std::max(1u, std::thread::hardware_concurrency());
    }

    json cfg = json::object();
    Table table;
    try {
        for (const auto &f : cmd->fields) {
            cfg[f.name] = f.value;
        }
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                throw ConfigError("cannot open config '" + config_path + "'");
            }
            json doc;
            try {
                doc = json::parse(in);
            } catch (const json::parse_error &e) {
                throw ConfigError(std::string("config is not valid JSON: ") + e.what());
            }
            merge_config(*cmd, doc, cfg);
        }
        for (const auto &f : cmd->fields) {
            const auto &tokens = raw[cmd->name][f.name];
            if (flags[cmd->name][f.name]->count() == 0) {
                continue;
            }
            if (is_list(f.kind)) {
                json list = json::array();
                for (const auto &s : tokens) {
                    list.push_back(parse_token(f, s));
                }
                cfg[f.name] = list;
            } else {
                cfg[f.name] = parse_token(f, tokens.back());
            }
        }
        table = cmd->run(cfg, opt);
    } catch (const ConfigError &e) {
        std::cerr << "starlab: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument &e) {
        std::cerr << "starlab: invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const json::type_error &e) {
        std::cerr << "starlab: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception &e) {
        std::cerr << "starlab: numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    }

    json echo = {{"seed", opt.seed}, {"config", cfg}};
    if (output_path.empty()) {
        write_table(std::cout, format, cmd->name, echo, table);
        return 0;
    }
    std::ofstream out(output_path);
    if (!out) {
        std::cerr << "starlab: cannot write '" << output_path << "'\n";
        return kExitConfig;
    }
    write_table(out, format, cmd->name, echo, table);
    return 0;
}
