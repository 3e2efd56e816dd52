// Closed-form problem registry backing the JSON problem specs and the CLI:
// named Hamiltonians, potentials and G-functions with their certificates.

#pragma once

#include "json.hpp"

#include "dualact/dual_action.hpp"
#include "dualact/second_order.hpp"

namespace dualact {

/// Known ids: "quadratic_forced" {amplitude}, "power_sum_iso" {p, Lambda, n},
/// "tian_ge" {p, a, n}, "linear" {c}.
Hamiltonian make_registry_hamiltonian(const std::string& id, const nlohmann::json& params,
                                      double period);

/// Known ids: "power_pair" {p, n} (the symplectic pair |u1|^p/p + |u2|^q/q),
/// "quadratic" {n, scale}, or any serialized GFunction document.
GFunction make_registry_gfunction(const nlohmann::json& spec);

/// C_{G*}(T) for a registry Hamiltonian's certificate G, when closed-form.
std::optional<double> registry_cg_star(const std::string& id, const nlohmann::json& params,
                                       double period);

/// {"hamiltonian": {"id":.., "params":{..}}, "T":.., "N":.., "epsilon":..,
///  "solver": {"grad_tol":.., "max_iter":..}}
struct ParsedProblem {
    DualActionProblem problem;
    std::string hamiltonian_id;
};
ParsedProblem problem_from_json(const nlohmann::json& spec);

/// {"phi": {...}, "potential": {"id":.., "params":{..}}, "T":.., "Lambda":..}
/// Potential ids: "quadratic_cos" {k, amplitude, n}, "scaled_power" {p, c, n}.
PhiLaplacianProblem phi_problem_from_json(const nlohmann::json& spec);

}  // namespace dualact
