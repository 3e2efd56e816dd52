// Python bindings for the dual-action toolkit. Thin wrappers over the C++
// surface; trajectories cross the boundary as nested lists, problem specs as
// JSON strings matching the CLI formats.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"

#include "dualact/cg_constant.hpp"
#include "dualact/dual_action.hpp"
#include "dualact/orlicz.hpp"
#include "dualact/registry.hpp"
#include "dualact/second_order.hpp"

namespace py = pybind11;
using namespace dualact;
using nlohmann::json;

namespace {

Trajectory trajectory_from_rows(double period, const std::vector<Vec>& rows) {
    if (rows.empty()) throw std::invalid_argument("empty trajectory");
    Trajectory u(period, static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (size_t k = 0; k < rows.size(); ++k) {
        if (rows[k].size() != rows[0].size())
            throw std::invalid_argument("ragged trajectory rows");
        for (size_t j = 0; j < rows[k].size(); ++j)
            u.at(static_cast<int>(k), static_cast<int>(j)) = rows[k][j];
    }
    return u;
}

std::vector<Vec> trajectory_rows(const Trajectory& u) {
    std::vector<Vec> rows(u.samples(), Vec(u.dim()));
    for (int k = 0; k < u.samples(); ++k)
        for (int j = 0; j < u.dim(); ++j) rows[k][j] = u.at(k, j);
    return rows;
}

py::dict orbit_dict(const OrbitResult& r) {
    py::dict d;
    d["chi_value"] = r.chi_value;
    d["grad_norm"] = r.grad_norm;
    d["hamiltonian_residual"] = r.hamiltonian_residual;
    d["perturbed_hamiltonian_residual"] = r.perturbed_residual;
    d["duality_gap"] = r.duality_gap;
    d["iterations"] = r.iterations;
    d["epsilon"] = r.epsilon_used;
    d["u"] = trajectory_rows(r.u);
    d["v"] = trajectory_rows(r.v);
    return d;
}

}  // namespace

PYBIND11_MODULE(_dualact, m) {
    m.doc() = "Clarke dual-action toolkit: periodic Hamiltonian orbits, "
              "Fenchel conjugation and C_G estimation";

    py::register_exception<ConjugateSolveError>(m, "ConjugateSolveError");
    py::register_exception<HypothesisError>(m, "HypothesisError");
    py::register_exception<PeriodNotDetected>(m, "PeriodNotDetected");

    py::class_<GFunction>(m, "GFunction")
        .def_property_readonly("dim", &GFunction::dim)
        .def_property_readonly("kind", &GFunction::kind)
        .def("value", [](const GFunction& g, const Vec& u) { return g.value(u); })
        .def("gradient", [](const GFunction& g, const Vec& u) { return g.gradient(u); })
        .def("conjugate", &GFunction::conjugate)
        .def("conjugate_is_closed_form", &GFunction::conjugate_is_closed_form)
        .def("young_identity_residual",
             [](const GFunction& g, const Vec& u) { return g.young_identity_residual(u); })
        .def("to_json", [](const GFunction& g) { return g.to_json().dump(); })
        .def_static("from_json",
                    [](const std::string& s) { return GFunction::from_json(json::parse(s)); })
        .def_static("power", &GFunction::power, py::arg("p"), py::arg("a"), py::arg("size"))
        .def_static("power_sum",
                    [](const std::vector<std::tuple<double, double, int>>& blocks) {
                        std::vector<PowerBlock> bs;
                        for (const auto& [p, a, size] : blocks) bs.push_back({p, a, size});
                        return GFunction::power_sum(std::move(bs));
                    })
        .def_static("symplectic_power_pair", &GFunction::symplectic_power_pair, py::arg("p"),
                    py::arg("n") = 1);

    m.def("symplectic_test",
          [](const GFunction& g, int samples, double tol) {
              const auto rep = symplectic_test(g, samples, tol);
              py::dict d;
              d["symplectic"] = rep.symplectic;
              d["worst_residual"] = rep.worst_residual;
              return d;
          },
          py::arg("g"), py::arg("samples") = 200, py::arg("tol") = 1e-8);

    m.def("delta2_certificate",
          [](const GFunction& g, double radius, int samples) {
              const auto c = delta2_certificate(g, radius, samples);
              py::dict d;
              d["C"] = c.c;
              d["global"] = c.global;
              d["unbounded"] = c.unbounded;
              return d;
          },
          py::arg("g"), py::arg("radius") = 1e3, py::arg("samples") = 200);

    m.def("growth_indices", [](const GFunction& g) {
        const auto idx = growth_indices(g);
        py::dict d;
        d["simonenko_p"] = idx.simonenko_p;
        d["simonenko_q"] = idx.simonenko_q;
        d["mo_alpha"] = idx.mo_alpha;
        d["mo_beta"] = idx.mo_beta;
        d["K"] = idx.k_eps;
        return d;
    });

    m.def("numerical_conjugate",
          [](const GFunction& g, const Vec& v) {
              const ConjugatePoint pt = numerical_conjugate_point(g, v);
              py::dict d;
              d["value"] = pt.value;
              d["argmax"] = pt.argmax;
              return d;
          },
          py::arg("g"), py::arg("v"));

    m.def("modular",
          [](const GFunction& g, double period, const std::vector<Vec>& rows) {
              return modular(g, trajectory_from_rows(period, rows));
          },
          py::arg("g"), py::arg("T"), py::arg("values"));

    m.def("luxemburg_norm",
          [](const GFunction& g, double period, const std::vector<Vec>& rows, double tol) {
              return luxemburg_norm(g, trajectory_from_rows(period, rows), tol);
          },
          py::arg("g"), py::arg("T"), py::arg("values"), py::arg("tol") = 1e-10);

    m.def("period_formula", &period_formula, py::arg("p"));
    m.def("period_formula_beta", &period_formula_beta, py::arg("p"));
    m.def("cg_closed_form", &cg_closed_form, py::arg("p"));

    m.def("estimate_cg",
          [](const GFunction& g, double period, int n, int restarts, uint64_t seed) {
              const CgEstimate est = estimate_cg_ratio(g, period, n, restarts, seed);
              py::dict d;
              d["value"] = est.value;
              d["T"] = est.period;
              d["method"] = est.method;
              d["gamma_record"] = est.gamma_record;
              d["certificate_orbit"] = trajectory_rows(est.certificate_orbit);
              return d;
          },
          py::arg("g"), py::arg("T") = 1.0, py::arg("N") = 128, py::arg("restarts") = 8,
          py::arg("seed") = 2024);

    m.def("flow_characterization",
          [](const GFunction& g, const Vec& u0, double reference_period) {
              FlowOptions opts;
              if (reference_period > 0.0) opts.reference_period = reference_period;
              const FlowResult fr = flow_characterization(g, u0, opts);
              py::dict d;
              d["period"] = fr.orbit.period;
              d["ratio"] = fr.ratio;
              d["energy"] = fr.orbit.energy;
              d["energy_drift"] = fr.orbit.energy_drift;
              d["orbit"] = trajectory_rows(fr.orbit.u);
              return d;
          },
          py::arg("g"), py::arg("u0"), py::arg("reference_period") = -1.0);

    m.def("solve",
          [](const std::string& spec) {
              ParsedProblem parsed = problem_from_json(json::parse(spec));
              OrbitResult res;
              if (parsed.problem.epsilon < 0.0) {
                  parsed.problem.epsilon = 0.0;
                  res = solve_with_continuation(parsed.problem);
              } else {
                  res = minimize_dual_action(parsed.problem);
              }
              return orbit_dict(res);
          },
          py::arg("spec_json"));

    m.def("check_hypotheses",
          [](const std::string& spec) {
              const ParsedProblem parsed = problem_from_json(json::parse(spec));
              if (!parsed.problem.cg_star)
                  throw std::invalid_argument("spec must define cg_star or use a registry id");
              const auto rep = check_existence_hypotheses(parsed.problem.h, parsed.problem.period,
                                                          *parsed.problem.cg_star);
              py::dict d;
              d["H1"] = rep.h1;
              d["H2"] = rep.h2;
              d["H2_sharp"] = rep.h2_sharp;
              d["H3"] = rep.h3;
              d["passed"] = rep.passed();
              d["detail"] = rep.detail;
              return d;
          },
          py::arg("spec_json"));

    m.def("solve_phi_laplacian",
          [](const std::string& spec, int n_samples) {
              const PhiLaplacianProblem p = phi_problem_from_json(json::parse(spec));
              PhiSolveOptions opts;
              opts.waive_hypothesis_check = true;
              const PhiSolution sol = solve_phi_laplacian(p, n_samples, opts);
              py::dict d;
              d["q"] = trajectory_rows(sol.q);
              d["el_residual"] = sol.residual;
              d["Lambda"] = sol.lambda;
              d["orbit"] = orbit_dict(sol.orbit);
              return d;
          },
          py::arg("spec_json"), py::arg("N") = 128);
}
