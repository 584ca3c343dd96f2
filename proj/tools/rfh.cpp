// rfh: command-line front end for the Rabinowitz-Floer toolkit.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rfh/config.hpp"
#include "rfh/critical.hpp"
#include "rfh/homology.hpp"

using nlohmann::ordered_json;
using namespace rfh;

namespace {

constexpr int kSchemaVersion = 1;

int log_level() {
    const char* env = std::getenv("RFH_LOG");
    return env ? std::atoi(env) : 0;
}

void log_line(const std::string& msg) {
    if (log_level() > 0) std::cerr << "[rfh] " << msg << "\n";
}

void emit(const ordered_json& j, const std::string& out_path) {
    std::string text = j.dump(2);
    if (out_path.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream f(out_path);
        if (!f) throw ConfigError("cannot write output file '" + out_path + "'");
        f << text << "\n";
    }
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write file '" + path + "'");
    f << text;
}

std::vector<int> parse_truncation(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ConfigError("--truncation expects comma-separated integers, got '" +
                              item + "'");
        }
        if (out.back() < 1) throw ConfigError("--truncation entries must be >= 1");
    }
    if (out.empty()) throw ConfigError("--truncation must be nonempty");
    return out;
}

/// Seeded random point of E with O(1) norm; deterministic per seed.
ExtendedPoint random_point(const FunctionalContext& ctx, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    EBasis basis(ctx);
    VectorXd x(basis.dim());
    for (int i = 0; i < x.size(); ++i) x[i] = gauss(rng);
    x *= 1.0 / std::sqrt(static_cast<double>(basis.dim()));
    return basis.from_coords(x);
}

/// Single-mode starting guess on the smallest positive D-eigenvalue.
ExtendedPoint single_mode_guess(const FunctionalContext& ctx) {
    const Spectrum& spec = ctx.spectrum;
    int best = -1;
    for (int i = 0; i < spec.mode_count(); ++i)
        if (spec.modes[i] > 0 && (best < 0 || spec.modes[i] < spec.modes[best])) best = i;
    if (best < 0) throw DomainError("spectrum has no positive eigenvalue");
    ExtendedPoint w{PairField::zero(spec, ctx.s), spec.modes[best]};
    w.z.u[best] = 1.0;
    w.z.v[best] = 1.0;
    return w;
}

ordered_json header(const std::string& command) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = command;
    return j;
}

int dispatch(const std::string& cmd, const RunConfig& cfg, const std::string& out_path,
             const std::string& csv_path, unsigned seed, int k,
             const std::vector<int>& window, const std::vector<int>& truncation) {
    ordered_json j = header(cmd);

    if (cmd == "spectrum") {
        j["spectrum"] = ordered_json::parse(spectrum_to_json(cfg.spectrum));
        auto& levels = j["l_spectrum"] = ordered_json::array();
        for (const auto& lv : l_spectrum(cfg.spectrum).levels)
            levels.push_back({{"k", lv.k}, {"lambda", lv.lambda},
                              {"multiplicity", lv.multiplicity}});
        emit(j, out_path);
        return 0;
    }

    if (cmd == "select-s") {
        if (cfg.nonlin.kind != NonlinKind::PowerType)
            throw ConfigError("select-s requires a power nonlinearity in the config");
        ExponentWitness w = select_s(1, cfg.nonlin.p, cfg.nonlin.q);
        j["n"] = w.n;
        j["p"] = w.p;
        j["q"] = w.q;
        j["s_lo"] = w.s_lo;
        j["s_hi"] = w.s_hi;
        j["s"] = w.s;
        emit(j, out_path);
        return 0;
    }

    if (cmd == "check-h") {
        FunctionalContext ctx = make_context(cfg);
        HypothesisReport rep = check_hypotheses(cfg.nonlin, 2000, 3.0, seed,
                                                &ctx.spectrum, ctx.s, ctx.effective_grid());
        auto& items = j["hypotheses"] = ordered_json::array();
        for (const auto& item : rep.items)
            items.push_back({{"name", item.name},
                             {"passed", item.passed},
                             {"heuristic", item.heuristic},
                             {"worst_margin", item.worst_margin},
                             {"witness", item.witness}});
        j["all_passed"] = rep.all_passed();
        emit(j, out_path);
        return rep.all_passed() ? 0 : 2;
    }

    FunctionalContext ctx = make_context(cfg);
    EBasis basis(ctx);

    if (cmd == "action") {
        ExtendedPoint w = random_point(ctx, seed);
        j["s"] = ctx.s;
        j["lambda"] = w.lambda;
        j["z_norm_Es"] = std::sqrt(es_norm_sq(ctx.spectrum, w.z));
        j["action"] = action(ctx, w);
        j["grad_norm"] = e_norm(ctx.spectrum, gradient(ctx, w));
        emit(j, out_path);
        return 0;
    }

    if (cmd == "grad-check") {
        ExtendedPoint w = random_point(ctx, seed);
        ExtendedPoint g = gradient(ctx, w);
        VectorXd x = basis.to_coords(w);
        VectorXd gx = basis.to_coords(g);
        double h = 1e-6;
        double worst = 0.0;
        std::mt19937_64 rng(seed + 1);
        std::uniform_int_distribution<int> pick(0, basis.dim() - 1);
        for (int trial = 0; trial < std::min(basis.dim(), 24); ++trial) {
            int i = pick(rng);
            VectorXd xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            double fd = (action(ctx, basis.from_coords(xp)) -
                         action(ctx, basis.from_coords(xm))) / (2 * h);
            worst = std::max(worst, std::abs(fd - gx[i]) / (1.0 + std::abs(gx[i])));
        }
        j["max_relative_error"] = worst;
        j["passed"] = worst < 1e-5;
        emit(j, out_path);
        return worst < 1e-5 ? 0 : 3;
    }

    if (cmd == "flow") {
        ExtendedPoint w0 = random_point(ctx, seed);
        FlowTrajectory traj = integrate_flow(ctx, nullptr, w0, cfg.flow);
        EnergyReport energy = energy_identity_check(traj);
        j["steps_accepted"] = traj.stats.accepted;
        j["steps_rejected"] = traj.stats.rejected;
        j["converged"] = traj.stats.converged;
        j["diverged"] = traj.stats.diverged;
        j["final_grad_norm"] = traj.stats.final_grad_norm;
        j["action_initial"] = traj.action_values.front();
        j["action_final"] = traj.action_values.back();
        j["energy_action_drop"] = energy.action_drop;
        j["energy_integral"] = energy.energy_integral;
        j["energy_relative_defect"] = energy.relative_defect;
        if (!csv_path.empty()) {
            write_file(csv_path, trajectory_to_csv(traj));
            j["csv"] = csv_path;
        }
        emit(j, out_path);
        return 0;
    }

    if (cmd == "homotopy") {
        if (cfg.nonlin.kind == NonlinKind::Quadratic)
            throw ConfigError("homotopy requires a non-quadratic target nonlinearity");
        FunctionalContext ctx0(cfg.spectrum, ctx.s, NonlinearitySpec::quadratic(),
                               cfg.grid_points);
        HomotopySchedule sched;
        sched.ctx0 = &ctx0;
        sched.ctx1 = &ctx;
        std::vector<CriticalComponent> comps = h0_critical_manifolds(ctx0);
        if (comps.empty()) throw DomainError("no critical component in the truncation");
        const CriticalComponent* start = nullptr;
        for (const auto& c : comps)
            if (c.lambda > 0 && (!start || c.lambda < start->lambda)) start = &c;
        if (!start) throw DomainError("no positive critical component");
        HomotopyReport rep = integrate_homotopy(sched, start->rep_minus.w, cfg.flow);
        j["sup_z_norm"] = rep.sup_z_norm;
        j["sup_lambda"] = rep.sup_lambda;
        j["measured_budget"] = rep.measured_budget;
        j["budget_ok"] = rep.budget_ok;
        j["action_initial"] = rep.trajectory.action_values.front();
        j["action_final"] = rep.trajectory.action_values.back();
        j["final_grad_norm"] = rep.trajectory.stats.final_grad_norm;
        if (!csv_path.empty()) {
            write_file(csv_path, trajectory_to_csv(rep.trajectory));
            j["csv"] = csv_path;
        }
        emit(j, out_path);
        return 0;
    }

    if (cmd == "critical") {
        if (cfg.nonlin.kind == NonlinKind::Quadratic) {
            auto& comps = j["components"] = ordered_json::array();
            for (const auto& c : h0_critical_manifolds(ctx))
                comps.push_back({{"k", c.k},
                                 {"lambda", c.lambda},
                                 {"multiplicity", c.multiplicity},
                                 {"sphere_dim", c.sphere_dim},
                                 {"action", action(ctx, c.rep_minus.w)},
                                 {"kernel_dim", c.rep_minus.kernel_dim}});
        } else {
            CriticalPoint cp = newton_solve(ctx, single_mode_guess(ctx));
            j["critical_point"] = ordered_json::parse(critical_point_to_json(ctx, cp));
        }
        emit(j, out_path);
        return 0;
    }

    if (cmd == "index") {
        std::vector<CriticalComponent> comps = h0_critical_manifolds(ctx);
        const CriticalComponent* comp = nullptr;
        for (const auto& c : comps)
            if (c.k == k) comp = &c;
        if (!comp) throw ConfigError("--k " + std::to_string(k) +
                                     " is not an L-level of the truncated spectrum");
        IndexReport minus = relative_index(ctx, comp->rep_minus, truncation);
        j["k"] = k;
        j["i_rel"] = minus.i_rel;
        j["stabilized"] = minus.stabilized;
        j["nu_minus"] = minus.nu_minus;
        j["nu_plus"] = minus.nu_plus;
        j["kernel_dim"] = minus.kernel_dim;
        j["report"] = ordered_json::parse(index_report_to_json(minus));
        AnalyticIndex oracle = analytic_index_oracle(l_spectrum(ctx.spectrum), k, -1);
        j["analytic_i_rel"] = oracle.i_rel;
        j["matches_analytic"] = oracle.i_rel == minus.i_rel;
        emit(j, out_path);
        return minus.stabilized ? 0 : 3;
    }

    if (cmd == "complex" || cmd == "homology") {
        int lo = window.size() == 2 ? window[0] : -13;
        int hi = window.size() == 2 ? window[1] : 13;
        if (lo > hi) throw ConfigError("--window LO HI requires LO <= HI");
        ChainComplexZ2 cx = assemble_h0_complex(l_spectrum(ctx.spectrum), lo, hi);
        j["window"] = {lo, hi};
        j["complex"] = ordered_json::parse(complex_to_json(cx));
        if (cmd == "homology")
            j["homology"] = ordered_json::parse(homology_to_json(homology(cx)))["homology"];
        emit(j, out_path);
        return 0;
    }

    if (cmd == "solve-dirac") {
        if (cfg.nonlin.kind != NonlinKind::PowerType)
            throw ConfigError("solve-dirac requires a power nonlinearity");
        CriticalPoint cp = newton_solve(ctx, single_mode_guess(ctx));
        DiracSolution sol = rescale_to_dirac_solution(ctx, cp);
        j["lambda"] = cp.w.lambda;
        j["residual_newton"] = cp.residual;
        j["exponent_a"] = sol.exponent_a;
        j["exponent_b"] = sol.exponent_b;
        j["sup_residual"] = sol.sup_residual;
        double coeff = 0.0;
        for (int i = 0; i < sol.z0.u.size(); ++i)
            coeff = std::max(coeff, std::abs(sol.z0.u[i]));
        j["max_u_coefficient"] = coeff;
        emit(j, out_path);
        return 0;
    }

    if (cmd == "report") {
        j["s"] = ctx.s;
        j["spectrum"] = ordered_json::parse(spectrum_to_json(cfg.spectrum));
        HypothesisReport hyp = check_hypotheses(cfg.nonlin, 500, 3.0, seed,
                                                &ctx.spectrum, ctx.s, ctx.effective_grid());
        j["hypotheses_passed"] = hyp.all_passed();
        if (cfg.nonlin.kind == NonlinKind::Quadratic) {
            ChainComplexZ2 cx = assemble_h0_complex(l_spectrum(ctx.spectrum), -13, 13);
            j["homology"] = ordered_json::parse(homology_to_json(homology(cx)))["homology"];
        } else {
            CriticalPoint cp = newton_solve(ctx, single_mode_guess(ctx));
            j["critical_lambda"] = cp.w.lambda;
            j["critical_residual"] = cp.residual;
            IndexReport rep = relative_index(ctx, cp, truncation);
            j["i_rel"] = rep.i_rel;
            j["stabilized"] = rep.stabilized;
        }
        emit(j, out_path);
        return 0;
    }

    throw ConfigError("unknown command '" + cmd + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical toolkit for Rabinowitz-Floer data of coupled Dirac systems"};
    app.require_subcommand(1);

    std::string config_path, out_path, csv_path, truncation_text;
    long seed_flag = -1;
    int threads = 0;
    int k = 1;
    std::vector<int> window;

    const std::vector<std::string> commands = {
        "spectrum", "check-h", "select-s", "action",  "grad-check",  "flow",
        "homotopy", "critical", "index",   "complex", "homology",    "solve-dirac",
        "report"};
    for (const auto& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "TOML config file")->required();
        sub->add_option("--out", out_path, "write JSON here instead of stdout");
        sub->add_option("--csv", csv_path, "trajectory CSV path (flow commands)");
        sub->add_option("--seed", seed_flag, "override the config seed");
        sub->add_option("--threads", threads, "override the config thread count");
        sub->add_option("--k", k, "L-level index (index command)");
        sub->add_option("--window", window, "degree window LO HI (complex/homology)")
            ->expected(2);
        sub->add_option("--truncation", truncation_text,
                        "comma-separated D-mode counts, e.g. \"8,12,16\"");
    }

    CLI11_PARSE(app, argc, argv);
    std::string cmd = app.get_subcommands().front()->get_name();

    try {
        RunConfig cfg = load_run_config(config_path);
        unsigned seed = seed_flag >= 0 ? static_cast<unsigned>(seed_flag) : cfg.seed;
        std::vector<int> truncation =
            truncation_text.empty() ? cfg.truncation : parse_truncation(truncation_text);
        if (threads > 0) cfg.threads = threads;
        Eigen::setNbThreads(cfg.threads);
        log_line("command " + cmd + ", seed " + std::to_string(seed));
        return dispatch(cmd, cfg, out_path.empty() ? cfg.out_path : out_path, csv_path,
                        seed, k, window, truncation);
    } catch (const ConfigError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const NonconvergenceError& e) {
        std::cerr << "nonconvergence: " << e.what() << " (residual " << e.residual
                  << " after " << e.iterations << " iterations)\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
