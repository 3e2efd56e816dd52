// dualact command line: periodic Hamiltonian orbits by dual-action
// minimization, C_G estimation, conjugates, hypothesis checks and the
// autonomous flow. Machine-readable JSON/CSV outputs only.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dualact/cg_constant.hpp"
#include "dualact/dual_action.hpp"
#include "dualact/orlicz.hpp"
#include "dualact/registry.hpp"
#include "dualact/second_order.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dualact;

namespace {

constexpr int kSchemaVersion = 1;

constexpr int kExitOk = 0;
constexpr int kExitSpecError = 1;
constexpr int kExitHypothesisFailure = 2;
constexpr int kExitNoConvergence = 3;

void write_json(const fs::path& path, json doc) {
    doc["schema_version"] = kSchemaVersion;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os << doc.dump(2) << "\n";
}

void write_trajectory_csv(const fs::path& path, const Trajectory& u) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    u.write_csv(os);
}

/// Ready-to-render companion for the emitted CSVs; plotting stays out of
/// process.
void write_plot_stub(const fs::path& dir) {
    std::ofstream os(dir / "plot.py");
    os << "#!/usr/bin/env python3\n"
          "\"\"\"Render the CSV artifacts written next to this script.\"\"\"\n"
          "import csv, glob, os, sys\n"
          "\n"
          "import matplotlib.pyplot as plt\n"
          "\n"
          "here = os.path.dirname(os.path.abspath(__file__))\n"
          "for path in sorted(glob.glob(os.path.join(here, '*.csv'))):\n"
          "    with open(path) as f:\n"
          "        rows = list(csv.reader(f))\n"
          "    header, data = rows[0], [[float(x) for x in r] for r in rows[1:]]\n"
          "    cols = list(zip(*data))\n"
          "    plt.figure()\n"
          "    for name, col in zip(header[1:], cols[1:]):\n"
          "        plt.plot(cols[0], col, label=name)\n"
          "    plt.xlabel(header[0])\n"
          "    plt.legend()\n"
          "    plt.title(os.path.basename(path))\n"
          "    plt.savefig(path.replace('.csv', '.png'), dpi=150)\n"
          "    print('wrote', path.replace('.csv', '.png'))\n"
          "if not glob.glob(os.path.join(here, '*.csv')):\n"
          "    sys.exit('no CSV artifacts found')\n";
}

json load_spec(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read spec file " + path);
    json spec;
    is >> spec;
    return spec;
}

GFunction gfunction_from_flags(const std::string& name, double p, int n) {
    if (name == "power-sum") return GFunction::symplectic_power_pair(p, n);
    if (name == "quadratic") return GFunction::power(2.0, 0.5, 2 * n);
    throw std::runtime_error("unknown --g '" + name + "' (power-sum | quadratic)");
}

json orbit_summary(const OrbitResult& r) {
    return {{"chi_value", r.chi_value},
            {"grad_norm", r.grad_norm},
            {"hamiltonian_residual", r.hamiltonian_residual},
            {"perturbed_hamiltonian_residual", r.perturbed_residual},
            {"duality_gap", r.duality_gap},
            {"iterations", r.iterations},
            {"epsilon", r.epsilon_used}};
}

struct CommonOut {
    std::string out_dir = ".";
    fs::path resolve(const std::string& name) const {
        fs::create_directories(out_dir);
        return fs::path(out_dir) / name;
    }
};

int run_solve(const std::string& spec_path, const CommonOut& out, bool epsilon_set,
              double epsilon_override, bool n_set, int n_override) {
    ParsedProblem parsed = problem_from_json(load_spec(spec_path));
    if (epsilon_set) parsed.problem.epsilon = epsilon_override;
    if (n_set) parsed.problem.n_samples = n_override;

    OrbitResult result;
    try {
        if (parsed.problem.epsilon < 0.0) {
            // epsilon left unset: continuation from 1e-3 * Lambda toward 0
            parsed.problem.epsilon = 0.0;
            result = solve_with_continuation(parsed.problem);
        } else {
            result = minimize_dual_action(parsed.problem);
        }
    } catch (const HypothesisError& e) {
        std::cerr << "hypothesis check failed:\n" << e.what() << "\n";
        return kExitHypothesisFailure;
    } catch (const SolverError& e) {
        std::cerr << "solver failed: " << e.what() << "\n";
        return kExitNoConvergence;
    }

    write_trajectory_csv(out.resolve("orbit.csv"), result.u);
    write_trajectory_csv(out.resolve("dual.csv"), result.v);
    write_plot_stub(out.resolve("orbit.csv").parent_path());
    json summary = orbit_summary(result);
    summary["hamiltonian"] = parsed.hamiltonian_id;
    summary["T"] = parsed.problem.period;
    summary["N"] = parsed.problem.n_samples;
    write_json(out.resolve("summary.json"), summary);
    return kExitOk;
}

int run_solve_el(const std::string& spec_path, const CommonOut& out, int n_samples) {
    PhiLaplacianProblem p = phi_problem_from_json(load_spec(spec_path));
    PhiSolveOptions opts;
    opts.waive_hypothesis_check = true;
    PhiSolution sol;
    try {
        sol = solve_phi_laplacian(p, n_samples, opts);
    } catch (const SolverError& e) {
        std::cerr << "solver failed: " << e.what() << "\n";
        return kExitNoConvergence;
    }
    write_trajectory_csv(out.resolve("q.csv"), sol.q);
    write_plot_stub(out.resolve("q.csv").parent_path());
    json summary = orbit_summary(sol.orbit);
    summary["el_residual"] = sol.residual;
    summary["Lambda"] = sol.lambda;
    summary["T"] = p.period;
    summary["N"] = n_samples;
    write_json(out.resolve("summary.json"), summary);
    return kExitOk;
}

int run_cg(const std::string& gname, double p, int n, double period, int n_samples, int restarts,
           uint64_t seed, const std::string& method, const CommonOut& out) {
    if (method != "ratio-minimization" && method != "gamma-sweep" && method != "closed-form")
        throw std::runtime_error("unknown --method '" + method +
                                 "' (ratio-minimization | gamma-sweep | closed-form)");
    const GFunction g = gfunction_from_flags(gname, p, n);
    json doc;
    doc["T"] = period;
    doc["method"] = method;

    if (method == "closed-form") {
        if (gname != "power-sum" || n != 1)
            throw std::runtime_error("closed form requires --g power-sum with n=1");
        doc["value"] = cg_closed_form(p);
        doc["period_T_p"] = period_formula(p);
        write_json(out.resolve("cg.json"), doc);
        return kExitOk;
    }

    if (method == "gamma-sweep") {
        write_plot_stub(out.resolve("cg.json").parent_path());
        std::ofstream sweep(out.resolve("gamma_sweep.csv"));
        sweep << "gamma,A_over_gamma\n";
        sweep.precision(17);
        double best = 0.0;
        json record = json::array();
        for (double gamma : {0.5, 1.0, 2.0}) {
            const ConstrainedSolution cs =
                solve_constrained_p(g, gamma, period, n_samples, restarts, seed);
            const double ratio = cs.a_gamma / gamma;
            sweep << gamma << "," << ratio << "\n";
            record.push_back({{"gamma", gamma}, {"ratio", ratio}, {"lambda", cs.lambda}});
            best = std::min(best, ratio);
        }
        doc["value"] = -best;
        doc["gamma_record"] = record;
        write_json(out.resolve("cg.json"), doc);
        return kExitOk;
    }

    CgOptions opts;
    opts.restarts = restarts;
    opts.seed = seed;
    opts.cross_check_scaling = true;
    const CgEstimate est = estimate_cg_ratio(g, period, n_samples, opts);
    doc["value"] = est.value;
    doc["scaling_check"] = est.scaling_check;
    json record = json::array();
    for (const auto& [gamma, ratio] : est.gamma_record)
        record.push_back({{"gamma", gamma}, {"ratio", ratio}});
    doc["gamma_record"] = record;
    if (gname == "power-sum" && n == 1) {
        doc["closed_form"] = cg_closed_form(p) / period;
        const auto idx = growth_indices(g);
        const double tp = period_formula(p);
        doc["sandwich"] = {{"lower", idx.simonenko_p / tp / period},
                           {"upper", idx.simonenko_q / tp / period}};
    }
    write_trajectory_csv(out.resolve("certificate_orbit.csv"), est.certificate_orbit);
    write_plot_stub(out.resolve("cg.json").parent_path());
    write_json(out.resolve("cg.json"), doc);
    return kExitOk;
}

int run_conj(const std::string& gname, double p, int n, const Vec& at, const CommonOut& out) {
    const GFunction g = gfunction_from_flags(gname, p, n);
    Vec v = at;
    if (v.empty()) v.assign(g.dim(), 1.0);
    if (static_cast<int>(v.size()) == 1 && g.dim() > 1) v.assign(g.dim(), at[0]);
    require_dim(g.dim(), v.size(), "--at");

    const GFunction star = g.conjugate();
    const double closed = star.value(v);
    const ConjugatePoint numeric = numerical_conjugate_point(g, v);
    json doc;
    doc["at"] = v;
    doc["closed_form"] = closed;
    doc["numerical"] = numeric.value;
    doc["abs_diff"] = std::abs(closed - numeric.value);
    doc["argmax"] = numeric.argmax;
    write_json(out.resolve("conj.json"), doc);
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
}

int run_check(const std::string& spec_path, const CommonOut& out) {
    const json spec = load_spec(spec_path);
    ParsedProblem parsed = problem_from_json(spec);
    if (!parsed.problem.cg_star)
        throw std::runtime_error("check: spec must define cg_star or use a registry id");
    const HypothesisReport rep =
        check_existence_hypotheses(parsed.problem.h, parsed.problem.period,
                                   *parsed.problem.cg_star);
    json doc;
    doc["H1"] = rep.h1;
    doc["H2"] = rep.h2;
    doc["H2_sharp"] = rep.h2_sharp;
    doc["H3"] = rep.h3;
    doc["passed"] = rep.passed();
    doc["detail"] = rep.detail;
    write_json(out.resolve("check.json"), doc);
    std::cout << rep.detail;
    if (!rep.passed()) {
        std::cerr << "hypothesis check failed:"
                  << (!rep.h1 ? " (H1)" : "")
                  << (!(rep.h2 || rep.h2_sharp) ? " (H2)" : "")
                  << (!rep.h3 ? " (H3)" : "") << "\n";
        return kExitHypothesisFailure;
    }
    return kExitOk;
}

int run_flow(const std::string& gname, double p, int n, const Vec& u0_arg,
             const std::string& p_sweep, const CommonOut& out) {
    if (!p_sweep.empty()) {
        write_plot_stub(out.resolve("flow_sweep.csv").parent_path());
        std::ofstream sweep(out.resolve("flow_sweep.csv"));
        sweep << "p,C_G,T_p\n";
        sweep.precision(17);
        std::stringstream ss(p_sweep);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const double pv = std::stod(tok);
            sweep << pv << "," << cg_closed_form(pv) << "," << period_formula(pv) << "\n";
        }
        return kExitOk;
    }
    const GFunction g = gfunction_from_flags(gname, p, n);
    Vec u0 = u0_arg;
    if (u0.empty()) {
        u0.assign(g.dim(), 0.0);
        u0[0] = std::pow(p, 1.0 / p);  // on the G = 1 level set for power pairs
    }
    FlowOptions fopts;
    fopts.reference_period = gname == "power-sum" && n == 1 ? period_formula(p)
                                                            : fopts.reference_period;
    const FlowResult fr = flow_characterization(g, u0, fopts);
    json doc;
    doc["period"] = fr.orbit.period;
    doc["ratio"] = fr.ratio;
    doc["energy"] = fr.orbit.energy;
    doc["energy_drift"] = fr.orbit.energy_drift;
    doc["steps"] = fr.steps;
    write_trajectory_csv(out.resolve("flow_orbit.csv"), fr.orbit.u);
    write_plot_stub(out.resolve("flow.json").parent_path());
    write_json(out.resolve("flow.json"), doc);
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Clarke dual-action toolkit for periodic Hamiltonian systems"};
    app.require_subcommand(1);

    CommonOut out;
    std::string spec_path;
    std::string gname = "power-sum";
    double p = 2.0;
    int n = 1;
    double period = 1.0;
    int n_samples = 128;
    int restarts = 8;
    uint64_t seed = 2024;
    double epsilon = -1.0;
    std::string method = "ratio-minimization";
    std::string p_sweep;
    Vec at_point;
    Vec u0;

    auto* solve = app.add_subcommand("solve", "minimize the dual action for a Hamiltonian spec");
    solve->add_option("--spec", spec_path, "problem spec JSON")->required();
    solve->add_option("--out", out.out_dir, "output directory");
    solve->add_option("--epsilon", epsilon, "perturbation override");
    solve->add_option("--N", n_samples, "grid override");

    auto* solve_el = app.add_subcommand("solve-el", "solve a Phi-Laplacian periodic problem");
    solve_el->add_option("--spec", spec_path, "problem spec JSON")->required();
    solve_el->add_option("--out", out.out_dir, "output directory");
    solve_el->add_option("--N", n_samples, "grid size");

    auto* cg = app.add_subcommand("cg", "estimate the optimal constant C_G(T)");
    cg->add_option("--g", gname, "G-function family (power-sum | quadratic)");
    cg->add_option("--p", p, "power exponent");
    cg->add_option("--n", n, "block dimension");
    cg->add_option("--T", period, "period");
    cg->add_option("--N", n_samples, "grid size");
    cg->add_option("--restarts", restarts, "multi-start count");
    cg->add_option("--seed", seed, "rng seed");
    cg->add_option("--method", method,
                   "ratio-minimization | gamma-sweep | closed-form");
    cg->add_option("--out", out.out_dir, "output directory");

    auto* conj = app.add_subcommand("conj", "closed-form vs numerical Fenchel conjugate");
    conj->add_option("--g", gname, "G-function family");
    conj->add_option("--p", p, "power exponent");
    conj->add_option("--n", n, "block dimension");
    conj->add_option("--at", at_point, "evaluation point (scalar broadcasts)");
    conj->add_option("--out", out.out_dir, "output directory");

    auto* check = app.add_subcommand("check", "existence-hypothesis checks for a spec");
    check->add_option("--spec", spec_path, "problem spec JSON")->required();
    check->add_option("--out", out.out_dir, "output directory");

    auto* flow = app.add_subcommand("flow", "integrate u' = J grad G(u) and detect the period");
    flow->add_option("--g", gname, "G-function family");
    flow->add_option("--p", p, "power exponent");
    flow->add_option("--n", n, "block dimension");
    flow->add_option("--u0", u0, "initial point");
    flow->add_option("--p-sweep", p_sweep, "comma list of p values for a closed-form sweep");
    flow->add_option("--out", out.out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed())
            return run_solve(spec_path, out, solve->count("--epsilon") > 0, epsilon,
                             solve->count("--N") > 0, n_samples);
        if (solve_el->parsed()) return run_solve_el(spec_path, out, n_samples);
        if (cg->parsed()) return run_cg(gname, p, n, period, n_samples, restarts, seed, method, out);
        if (conj->parsed()) return run_conj(gname, p, n, at_point, out);
        if (check->parsed()) return run_check(spec_path, out);
        if (flow->parsed()) return run_flow(gname, p, n, u0, p_sweep, out);
    } catch (const HypothesisError& e) {
        std::cerr << e.what() << "\n";
        return kExitHypothesisFailure;
    } catch (const SolverError& e) {
        std::cerr << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSpecError;
    }
    return kExitSpecError;
}
