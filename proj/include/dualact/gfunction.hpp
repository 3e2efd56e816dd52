// Anisotropic G-functions: even, strictly convex-at-large-scale descriptors
// G : R^n -> [0, inf) with G(0) = 0 and superlinear growth, together with
// Legendre-Fenchel conjugation, structure tests (Delta_2, symplectic,
// semi-symplectic) and growth indices.

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dualact/vecops.hpp"

namespace dualact {

class GFunction;

/// Raised when the inner maximization of a numerical conjugate fails to
/// converge; carries the query point and an iteration trace.
struct ConjugateSolveError : std::runtime_error {
    Vec query;
    std::string trace;
    ConjugateSolveError(std::string msg, Vec v, std::string tr)
        : std::runtime_error(std::move(msg)), query(std::move(v)), trace(std::move(tr)) {}
};

struct NumericalConjugateOptions {
    double tol = 1e-11;      // residual |grad G(u) - v| <= tol * (1 + |v|)
    int max_newton = 100;
    int max_ascent = 400;
    /// Non-smooth targets cannot always reach tol exactly; the best iterate
    /// is accepted within this factor of it, and rejected beyond.
    double stall_factor = 100.0;
};

namespace detail {

/// Internal polymorphic descriptor behind GFunction's value semantics.
class GForm {
public:
    virtual ~GForm() = default;
    virtual int dim() const = 0;
    virtual double value(ConstSpan u) const = 0;
    virtual void gradient(ConstSpan u, MutSpan out) const = 0;
    /// Closed-form conjugate descriptor when the family admits one.
    virtual std::shared_ptr<const GForm> conjugate_form() const { return nullptr; }
    virtual nlohmann::json to_json() const;
    virtual std::string kind() const = 0;
};

}  // namespace detail

struct PowerBlock {
    double p;    // exponent, > 1
    double a;    // weight multiplying |u_block|^p, > 0
    int size;    // block dimension
};

/// Immutable, shareable descriptor of a G-function. All operations are pure;
/// numerical-conjugate warm starts live in thread-local caches.
class GFunction {
public:
    GFunction() = default;

    int dim() const { return form_ ? form_->dim() : 0; }
    bool valid() const { return static_cast<bool>(form_); }

    double operator()(ConstSpan u) const { return value(u); }
    double value(ConstSpan u) const;
    Vec gradient(ConstSpan u) const;

    /// Legendre-Fenchel conjugate. Closed form for power sums, quadratics,
    /// linear images and direct sums; otherwise backed by a damped-Newton
    /// maximization of <u,v> - G(u).
    GFunction conjugate() const;
    bool conjugate_is_closed_form() const;

    /// |<grad G(u), u> - G(u) - G*(grad G(u))|  (Young's identity residual).
    double young_identity_residual(ConstSpan u) const;

    std::string kind() const { return form_ ? form_->kind() : "empty"; }

    nlohmann::json to_json() const;
    static GFunction from_json(const nlohmann::json& j);

    // Factories ------------------------------------------------------------
    static GFunction power_sum(std::vector<PowerBlock> blocks);
    /// Single block a * |u|^p on R^size.
    static GFunction power(double p, double a, int size);
    /// (scale/2) <Q u, u> with Q symmetric positive definite.
    static GFunction quadratic(Matrix q, double scaleFactor = 1.0);
    /// G(A u) for invertible A.
    static GFunction linear_image(GFunction inner, Matrix a);
    /// Direct sum on consecutive blocks.
    static GFunction direct_sum(std::vector<GFunction> components);
    /// Callback-defined form; grad may be empty (central differences then).
    static GFunction custom(int dim, std::function<double(ConstSpan)> eval,
                            std::function<Vec(ConstSpan)> grad = {},
                            std::string label = "custom");
    /// |u1|^p/p + |u2|^q/q with q = p/(p-1) on R^{2n}; symplectic.
    static GFunction symplectic_power_pair(double p, int n = 1);

    const detail::GForm& impl() const { return *form_; }
    explicit GFunction(std::shared_ptr<const detail::GForm> f) : form_(std::move(f)) {}

    NumericalConjugateOptions conjugate_options;

private:
    std::shared_ptr<const detail::GForm> form_;
};

/// Solves sup_u <u,v> - G(u) by damped Newton on grad G(u) = v with a
/// gradient-ascent fallback; returns (value, maximizer).
struct ConjugatePoint {
    double value;
    Vec argmax;
    int iterations;
};
ConjugatePoint numerical_conjugate_point(const GFunction& g, ConstSpan v,
                                         const Vec* warm_start = nullptr,
                                         const NumericalConjugateOptions& opts = {});

// ---------------------------------------------------------------------------
// Structure tests and certificates.
// ---------------------------------------------------------------------------

struct SampleSpec {
    int count = 200;
    double radius_min = 1e-3;
    double radius_max = 1e3;
    uint64_t seed = 1234;

    std::string describe() const;
};

/// Sampled verification of the G-function axioms (zero at origin, positivity,
/// evenness, midpoint convexity, superlinear growth along rays).
struct AxiomReport {
    bool passed = true;
    std::string failure;
};
AxiomReport check_gfunction_axioms(const GFunction& g, const SampleSpec& spec = {});

struct Delta2Certificate {
    double c;          // smallest sampled C with G(2u) <= C G(u) + 1
    bool global;       // ratio stable across radius shells (no +1 needed)
    bool unbounded;    // growth beyond the cap detected; c reported at the cap
};
Delta2Certificate delta2_certificate(const GFunction& g, double sample_radius = 1e3,
                                     int n_samples = 200, uint64_t seed = 99);

struct SymplecticReport {
    bool symplectic;
    double worst_residual;   // max |G*(Ju) - G(u)| / (1 + |G(u)|)
    Vec worst_point;
};
SymplecticReport symplectic_test(const GFunction& g, int n_samples = 200,
                                 double tol = 1e-8, uint64_t seed = 7);

struct SemiSymplecticCertificate {
    double k = 0.0;
    double c = 0.0;
    std::string verified_on;
    std::optional<Vec> violated_at;

    bool found() const { return !violated_at.has_value(); }
    /// Norm bound K(C*T + 1) of the induced embedding L^G -> L^{G*}.
    double embedding_constant(double period) const { return k * (c * period + 1.0); }
};
SemiSymplecticCertificate semi_symplectic_certificate(const GFunction& g,
                                                      const SampleSpec& spec = {},
                                                      double k_max = 1e6,
                                                      double c_max = 1e6);

struct GrowthIndices {
    double simonenko_p;   // inf <u, grad G(u)> / G(u)
    double simonenko_q;   // sup, may be +inf
    double mo_alpha;      // log-log slope of sup_u G(tu)/G(u), t -> 0+
    double mo_beta;       // same, t -> inf
    double k_eps;         // sampled constant of the two-sided power bound
    double eps;
    std::string sample_spec;
};
GrowthIndices growth_indices(const GFunction& g, const SampleSpec& spec = {},
                             double eps = 0.0);

/// Checks the sandwich -beta <= H(u) <= G(u) + gamma on the samples and then
/// verifies G*(grad H(u)) <= G(ru)/(r-1) + r(beta+gamma)/(r-1) at each one.
struct ConvexFunction {
    int dim;
    std::function<double(ConstSpan)> value;
    std::function<Vec(ConstSpan)> gradient;

    ConvexFunction() = default;
    ConvexFunction(int d, std::function<double(ConstSpan)> v, std::function<Vec(ConstSpan)> g)
        : dim(d), value(std::move(v)), gradient(std::move(g)) {}
    ConvexFunction(const GFunction& g);  // NOLINT(google-explicit-constructor)
};

struct ConjugateGradientBoundReport {
    bool hypothesis_ok;
    Vec hypothesis_violation;   // point where the sandwich failed (if any)
    int violations;             // of the gradient bound itself
    double max_slack;           // min over samples of RHS - LHS
    double min_slack;
};
ConjugateGradientBoundReport conjugate_gradient_bound(const ConvexFunction& h,
                                                      const GFunction& g, double beta,
                                                      double gamma, double r,
                                                      const std::vector<Vec>& samples);

}  // namespace dualact
