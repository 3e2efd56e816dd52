#include "dualact/gfunction.hpp"
#include <limits>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace dualact {

using detail::GForm;
using nlohmann::json;

namespace {

constexpr double kTinyValue = 1e-300;

double block_norm(ConstSpan u, int offset, int size) {
    double s = 0.0;
    for (int i = 0; i < size; ++i) s += u[offset + i] * u[offset + i];
    return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Concrete forms.
// ---------------------------------------------------------------------------

class PowerSumForm final : public GForm {
public:
    explicit PowerSumForm(std::vector<PowerBlock> blocks) : blocks_(std::move(blocks)) {
        dim_ = 0;
        for (const auto& b : blocks_) {
            if (b.p <= 1.0) throw std::invalid_argument("power_sum: exponent must exceed 1");
            if (b.a <= 0.0) throw std::invalid_argument("power_sum: weight must be positive");
            if (b.size <= 0) throw std::invalid_argument("power_sum: block size must be positive");
            dim_ += b.size;
        }
        if (blocks_.empty()) throw std::invalid_argument("power_sum: no blocks");
    }

    int dim() const override { return dim_; }

    double value(ConstSpan u) const override {
        double s = 0.0;
        int off = 0;
        for (const auto& b : blocks_) {
            const double r = block_norm(u, off, b.size);
            s += b.a * std::pow(r, b.p);
            off += b.size;
        }
        return s;
    }

    void gradient(ConstSpan u, MutSpan out) const override {
        int off = 0;
        for (const auto& b : blocks_) {
            const double r = block_norm(u, off, b.size);
            // Minimal-norm subgradient at a block origin when p < 2.
            const double factor = r > 0.0 ? b.a * b.p * std::pow(r, b.p - 2.0) : 0.0;
            for (int i = 0; i < b.size; ++i) out[off + i] = factor * u[off + i];
            off += b.size;
        }
    }

    std::shared_ptr<const GForm> conjugate_form() const override {
        std::vector<PowerBlock> conj;
        conj.reserve(blocks_.size());
        for (const auto& b : blocks_) {
            const double q = b.p / (b.p - 1.0);
            conj.push_back({q, (1.0 / q) * std::pow(b.p * b.a, -q / b.p), b.size});
        }
        return std::make_shared<PowerSumForm>(std::move(conj));
    }

    json to_json() const override {
        json jb = json::array();
        for (const auto& b : blocks_) jb.push_back({{"p", b.p}, {"a", b.a}, {"size", b.size}});
        return {{"kind", "power_sum"}, {"blocks", jb}};
    }

    std::string kind() const override { return "power_sum"; }

private:
    std::vector<PowerBlock> blocks_;
    int dim_ = 0;
};

class QuadraticForm final : public GForm {
public:
    QuadraticForm(Matrix q, double scaleFactor) : q_(std::move(q)), scale_(scaleFactor) {
        if (q_.rows != q_.cols) throw std::invalid_argument("quadratic: matrix not square");
        if (scale_ <= 0.0) throw std::invalid_argument("quadratic: scale must be positive");
        for (int i = 0; i < q_.rows; ++i)
            for (int j = 0; j < i; ++j)
                if (std::abs(q_(i, j) - q_(j, i)) > 1e-12 * (1.0 + std::abs(q_(i, j))))
                    throw std::invalid_argument("quadratic: matrix not symmetric");
        // Positive definiteness shows up as a failed factorization otherwise.
        inv_ = invert(q_);
        if (value(Vec(q_.rows, 1.0)) <= 0.0)
            throw std::invalid_argument("quadratic: matrix not positive definite");
    }

    int dim() const override { return q_.rows; }

    double value(ConstSpan u) const override {
        const Vec qu = q_.apply(u);
        return 0.5 * scale_ * dot(qu, u);
    }

    void gradient(ConstSpan u, MutSpan out) const override {
        const Vec qu = q_.apply(u);
        for (int i = 0; i < q_.rows; ++i) out[i] = scale_ * qu[i];
    }

    std::shared_ptr<const GForm> conjugate_form() const override {
        return std::make_shared<QuadraticForm>(inv_, 1.0 / scale_);
    }

    json to_json() const override {
        return {{"kind", "quadratic"}, {"n", q_.rows}, {"scale", scale_}, {"matrix", q_.a}};
    }

    std::string kind() const override { return "quadratic"; }

private:
    Matrix q_;
    double scale_;
    Matrix inv_;
};

class LinearImageForm final : public GForm {
public:
    LinearImageForm(GFunction inner, Matrix a) : inner_(std::move(inner)), a_(std::move(a)) {
        if (a_.rows != a_.cols || a_.rows != inner_.dim())
            throw std::invalid_argument("linear_image: matrix shape does not match inner dim");
        inv_t_ = invert(a_).transpose();
    }

    int dim() const override { return a_.rows; }

    double value(ConstSpan u) const override { return inner_.value(a_.apply(u)); }

    void gradient(ConstSpan u, MutSpan out) const override {
        const Vec g = inner_.gradient(a_.apply(u));
        const Vec atg = a_.apply_transpose(g);
        std::copy(atg.begin(), atg.end(), out.begin());
    }

    std::shared_ptr<const GForm> conjugate_form() const override;

    json to_json() const override {
        return {{"kind", "linear_image"},
                {"n", a_.rows},
                {"matrix", a_.a},
                {"inner", inner_.to_json()["form"]}};
    }

    std::string kind() const override { return "linear_image"; }

private:
    GFunction inner_;
    Matrix a_;
    Matrix inv_t_;
};

class SumForm final : public GForm {
public:
    explicit SumForm(std::vector<GFunction> comps) : comps_(std::move(comps)) {
        if (comps_.empty()) throw std::invalid_argument("direct_sum: no components");
        offsets_.reserve(comps_.size());
        dim_ = 0;
        for (const auto& c : comps_) {
            offsets_.push_back(dim_);
            dim_ += c.dim();
        }
    }

    int dim() const override { return dim_; }

    double value(ConstSpan u) const override {
        double s = 0.0;
        for (size_t i = 0; i < comps_.size(); ++i)
            s += comps_[i].value(u.subspan(offsets_[i], comps_[i].dim()));
        return s;
    }

    void gradient(ConstSpan u, MutSpan out) const override {
        for (size_t i = 0; i < comps_.size(); ++i) {
            const Vec g = comps_[i].gradient(u.subspan(offsets_[i], comps_[i].dim()));
            std::copy(g.begin(), g.end(), out.begin() + offsets_[i]);
        }
    }

    std::shared_ptr<const GForm> conjugate_form() const override {
        std::vector<GFunction> conj;
        conj.reserve(comps_.size());
        for (const auto& c : comps_) conj.push_back(c.conjugate());
        return std::make_shared<SumForm>(std::move(conj));
    }

    json to_json() const override {
        json comps = json::array();
        for (const auto& c : comps_) comps.push_back(c.to_json()["form"]);
        return {{"kind", "sum"}, {"components", comps}};
    }

    std::string kind() const override { return "sum"; }

private:
    std::vector<GFunction> comps_;
    std::vector<int> offsets_;
    int dim_ = 0;
};

class CustomForm final : public GForm {
public:
    CustomForm(int d, std::function<double(ConstSpan)> eval, std::function<Vec(ConstSpan)> grad,
               std::string label)
        : dim_(d), eval_(std::move(eval)), grad_(std::move(grad)), label_(std::move(label)) {}

    int dim() const override { return dim_; }

    double value(ConstSpan u) const override { return eval_(u); }

    void gradient(ConstSpan u, MutSpan out) const override {
        if (grad_) {
            const Vec g = grad_(u);
            std::copy(g.begin(), g.end(), out.begin());
            return;
        }
        Vec w(u.begin(), u.end());
        for (int j = 0; j < dim_; ++j) {
            const double h = 1e-7 * (1.0 + std::abs(w[j]));
            const double saved = w[j];
            w[j] = saved + h;
            const double fp = eval_(w);
            w[j] = saved - h;
            const double fm = eval_(w);
            w[j] = saved;
            out[j] = (fp - fm) / (2.0 * h);
        }
    }

    std::string kind() const override { return label_; }

private:
    int dim_;
    std::function<double(ConstSpan)> eval_;
    std::function<Vec(ConstSpan)> grad_;
    std::string label_;
};

/// Conjugate without a closed form: every evaluation solves the inner
/// maximization, warm-started from the last query on this thread.
class NumericalConjugateForm final : public GForm {
public:
    explicit NumericalConjugateForm(GFunction primal) : primal_(std::move(primal)) {}

    int dim() const override { return primal_.dim(); }

    double value(ConstSpan v) const override { return solve(v).value; }

    void gradient(ConstSpan v, MutSpan out) const override {
        const Vec u = solve(v).argmax;  // grad G*(v) is the maximizer
        std::copy(u.begin(), u.end(), out.begin());
    }

    std::shared_ptr<const GForm> conjugate_form() const override {
        return std::shared_ptr<const GForm>(&primal_.impl(), [p = primal_](const GForm*) {});
    }

    json to_json() const override {
        throw std::runtime_error("numerical conjugate has no serializable form");
    }

    std::string kind() const override { return "numerical_conjugate"; }

private:
    ConjugatePoint solve(ConstSpan v) const {
        thread_local std::unordered_map<const NumericalConjugateForm*, Vec> warm_cache;
        if (warm_cache.size() > 64) warm_cache.clear();
        auto it = warm_cache.find(this);
        const Vec* warm = it != warm_cache.end() ? &it->second : nullptr;
        ConjugatePoint pt =
            numerical_conjugate_point(primal_, v, warm, primal_.conjugate_options);
        warm_cache[this] = pt.argmax;
        return pt;
    }

    GFunction primal_;
};

std::shared_ptr<const GForm> LinearImageForm::conjugate_form() const {
    return std::make_shared<LinearImageForm>(inner_.conjugate(), inv_t_);
}

}  // namespace

// ---------------------------------------------------------------------------
// GFunction surface.
// ---------------------------------------------------------------------------

json detail::GForm::to_json() const {
    throw std::runtime_error("form '" + kind() + "' has no JSON representation");
}

double GFunction::value(ConstSpan u) const {
    require_dim(dim(), u.size(), "GFunction::value");
    return form_->value(u);
}

Vec GFunction::gradient(ConstSpan u) const {
    require_dim(dim(), u.size(), "GFunction::gradient");
    Vec out(dim());
    form_->gradient(u, out);
    return out;
}

GFunction GFunction::conjugate() const {
    if (!form_) throw std::runtime_error("conjugate of empty GFunction");
    if (auto closed = form_->conjugate_form()) {
        GFunction g(std::move(closed));
        g.conjugate_options = conjugate_options;
        return g;
    }
    GFunction g(std::make_shared<NumericalConjugateForm>(*this));
    g.conjugate_options = conjugate_options;
    return g;
}

bool GFunction::conjugate_is_closed_form() const {
    return form_ && form_->conjugate_form() != nullptr;
}

double GFunction::young_identity_residual(ConstSpan u) const {
    const Vec grad = gradient(u);
    const GFunction star = conjugate();
    return std::abs(dot(grad, u) - value(u) - star.value(grad));
}

json GFunction::to_json() const {
    if (!form_) throw std::runtime_error("to_json of empty GFunction");
    json form = form_->to_json();  // may throw; keep it out of the braced list
    return {{"dim", dim()}, {"form", std::move(form)}};
}

GFunction GFunction::from_json(const json& j) {
    const json& form = j.contains("form") ? j.at("form") : j;
    const std::string kind = form.at("kind").get<std::string>();
    if (kind == "power_sum") {
        std::vector<PowerBlock> blocks;
        for (const auto& b : form.at("blocks"))
            blocks.push_back({b.at("p").get<double>(), b.at("a").get<double>(),
                              b.at("size").get<int>()});
        return power_sum(std::move(blocks));
    }
    if (kind == "quadratic") {
        const int n = form.at("n").get<int>();
        Matrix q(n, n);
        q.a = form.at("matrix").get<Vec>();
        return quadratic(std::move(q), form.at("scale").get<double>());
    }
    if (kind == "linear_image") {
        const int n = form.at("n").get<int>();
        Matrix a(n, n);
        a.a = form.at("matrix").get<Vec>();
        return linear_image(from_json(form.at("inner")), std::move(a));
    }
    if (kind == "sum") {
        std::vector<GFunction> comps;
        for (const auto& c : form.at("components")) comps.push_back(from_json(c));
        return direct_sum(std::move(comps));
    }
    throw std::runtime_error("unknown GFunction kind '" + kind + "'");
}

GFunction GFunction::power_sum(std::vector<PowerBlock> blocks) {
    return GFunction(std::make_shared<PowerSumForm>(std::move(blocks)));
}

GFunction GFunction::power(double p, double a, int size) {
    return power_sum({PowerBlock{p, a, size}});
}

GFunction GFunction::quadratic(Matrix q, double scaleFactor) {
    return GFunction(std::make_shared<QuadraticForm>(std::move(q), scaleFactor));
}

GFunction GFunction::linear_image(GFunction inner, Matrix a) {
    return GFunction(std::make_shared<LinearImageForm>(std::move(inner), std::move(a)));
}

GFunction GFunction::direct_sum(std::vector<GFunction> components) {
    return GFunction(std::make_shared<SumForm>(std::move(components)));
}

GFunction GFunction::custom(int dim, std::function<double(ConstSpan)> eval,
                            std::function<Vec(ConstSpan)> grad, std::string label) {
    return GFunction(
        std::make_shared<CustomForm>(dim, std::move(eval), std::move(grad), std::move(label)));
}

GFunction GFunction::symplectic_power_pair(double p, int n) {
    const double q = p / (p - 1.0);
    return direct_sum({power(p, 1.0 / p, n), power(q, 1.0 / q, n)});
}

// ---------------------------------------------------------------------------
// Numerical conjugation.
// ---------------------------------------------------------------------------

ConjugatePoint numerical_conjugate_point(const GFunction& g, ConstSpan v, const Vec* warm_start,
                                         const NumericalConjugateOptions& opts) {
    const int n = g.dim();
    require_dim(n, v.size(), "numerical_conjugate_point");

    auto objective = [&](ConstSpan u) { return dot(u, v) - g.value(u); };

    Vec u(v.begin(), v.end());
    if (warm_start && static_cast<int>(warm_start->size()) == n &&
        objective(*warm_start) > objective(u))
        u = *warm_start;
    if (objective(Vec(n, 0.0)) > objective(u)) u.assign(n, 0.0);

    std::ostringstream trace;
    const double target = opts.tol * (1.0 + norm2(v));
    int total_iters = 0;

    auto residual = [&](ConstSpan w, Vec& grad_out) {
        grad_out = g.gradient(w);
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) {
            grad_out[i] -= v[i];
            r2 += grad_out[i] * grad_out[i];
        }
        return std::sqrt(r2);
    };

    Vec f;
    double res = residual(u, f);
    Vec best_u = u;
    double best_res = res;

    for (int outer = 0; outer < 6 && res > target; ++outer) {
        // restart each pass from the best point seen so far
        if (res > best_res) {
            u = best_u;
            res = residual(u, f);
        }
        // Damped Newton on grad G(u) = v with a finite-difference Jacobian.
        // Odd passes switch to purely relative steps: when the solution sits
        // below the absolute step and the Hessian is singular there (power
        // exponents below 2), an absolute step straddles the kink and the
        // secant slope never lets Newton land.
        const bool relative_fd = outer % 2 == 1;
        const double u_scale = 1.0 + max_abs(u);
        for (int it = 0; it < opts.max_newton && res > target; ++it, ++total_iters) {
            Matrix jac(n, n);
            Vec w = u;
            for (int j = 0; j < n; ++j) {
                const double h = relative_fd
                                     ? 1.5e-8 * std::abs(u[j]) + 1e-18 * u_scale
                                     : 1.5e-8 * (1.0 + std::abs(u[j]));
                const double saved = w[j];
                w[j] = saved + h;
                const Vec gp = g.gradient(w);
                w[j] = saved - h;
                const Vec gm = g.gradient(w);
                w[j] = saved;
                for (int i = 0; i < n; ++i) jac(i, j) = (gp[i] - gm[i]) / (2.0 * h);
            }
            Vec step;
            double mu = 0.0;
            for (;;) {
                try {
                    Matrix jm = jac;
                    if (mu > 0.0)
                        for (int i = 0; i < n; ++i) jm(i, i) += mu;
                    Vec rhs(n);
                    for (int i = 0; i < n; ++i) rhs[i] = -f[i];
                    step = solve_linear(jm, rhs);
                    break;
                } catch (const std::runtime_error&) {
                    mu = mu == 0.0 ? 1e-8 * (1.0 + res) : mu * 100.0;
                    if (mu > 1e12) break;
                }
            }
            if (step.empty()) break;

            double t = 1.0;
            bool accepted = false;
            for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
                Vec cand = u;
                axpy(t, step, cand);
                Vec fc;
                const double rc = residual(cand, fc);
                if (rc < (1.0 - 1e-4 * t) * res) {
                    u = std::move(cand);
                    f = std::move(fc);
                    res = rc;
                    accepted = true;
                    break;
                }
            }
            if (res < best_res) {
                best_res = res;
                best_u = u;
            }
            if (!accepted) {
                trace << "newton stalled at iter " << total_iters << " res=" << res << "; ";
                break;
            }
        }
        if (best_res <= target) break;

        // Backtracking ascent on <u,v> - G(u); the ascent direction is -f.
        double phi = objective(u);
        double step0 = 1.0;
        for (int it = 0; it < opts.max_ascent && res > target; ++it, ++total_iters) {
            double t = step0;
            bool accepted = false;
            for (int ls = 0; ls < 50; ++ls, t *= 0.5) {
                Vec cand = u;
                axpy(-t, f, cand);
                const double pc = objective(cand);
                if (pc > phi + 1e-4 * t * res * res) {
                    u = std::move(cand);
                    phi = pc;
                    accepted = true;
                    step0 = std::min(4.0 * t, 1e6);
                    break;
                }
            }
            if (!accepted) {
                trace << "ascent stalled res=" << res << "; ";
                break;
            }
            res = residual(u, f);
            if (res < best_res) {
                best_res = res;
                best_u = u;
            }
        }
    }

    if (best_res > opts.stall_factor * target) {
        std::ostringstream msg;
        msg << "conjugate maximization did not converge: residual " << best_res << " > "
            << target;
        throw ConjugateSolveError(msg.str(), Vec(v.begin(), v.end()), trace.str());
    }
    return ConjugatePoint{objective(best_u), std::move(best_u), total_iters};
}

// ---------------------------------------------------------------------------
// Structure tests.
// ---------------------------------------------------------------------------

std::string SampleSpec::describe() const {
    std::ostringstream os;
    os << count << " points, log-uniform radii in [" << radius_min << ", " << radius_max
       << "], uniform directions, seed " << seed;
    return os.str();
}

AxiomReport check_gfunction_axioms(const GFunction& g, const SampleSpec& spec) {
    AxiomReport rep;
    auto fail = [&](const std::string& why) {
        rep.passed = false;
        rep.failure = why;
        return rep;
    };

    const Vec zero(g.dim(), 0.0);
    if (std::abs(g.value(zero)) > 1e-12) return fail("G(0) != 0");

    Rng rng(spec.seed);
    auto pts = sample_points(rng, g.dim(), spec.count, spec.radius_min, spec.radius_max);
    for (const auto& u : pts) {
        const double gu = g.value(u);
        if (!(gu > 0.0)) return fail("G not positive away from the origin");
        Vec neg = u;
        scale(-1.0, neg);
        if (std::abs(g.value(neg) - gu) > 1e-10 * (1.0 + gu)) return fail("G not even");
    }
    for (size_t i = 0; i + 1 < pts.size(); i += 2) {
        const Vec& x = pts[i];
        const Vec& y = pts[i + 1];
        Vec mid(x.size());
        for (size_t j = 0; j < x.size(); ++j) mid[j] = 0.5 * (x[j] + y[j]);
        if (g.value(mid) > 0.5 * (g.value(x) + g.value(y)) + 1e-9 * (1.0 + g.value(x) + g.value(y)))
            return fail("midpoint convexity violated");
    }
    // Superlinearity proxy: G(ru)/(r|u|) must increase along sampled rays,
    // probed on a geometric ladder inside the sampling radius.
    for (int i = 0; i < std::min<int>(32, spec.count); ++i) {
        const Vec dir = random_direction(rng, g.dim());
        double prev = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < 4; ++j) {
            const double r =
                spec.radius_min * std::pow(spec.radius_max / spec.radius_min, j / 3.0);
            Vec x = dir;
            scale(r, x);
            const double slope = g.value(x) / r;
            if (slope <= prev) return fail("superlinear growth check failed along a ray");
            prev = slope;
        }
    }
    return rep;
}

Delta2Certificate delta2_certificate(const GFunction& g, double sample_radius, int n_samples,
                                     uint64_t seed) {
    Rng rng(seed);
    auto pts = sample_points(rng, g.dim(), n_samples, sample_radius * 1e-6, sample_radius);
    constexpr double kCap = 1e12;

    double c_plus = 0.0;
    double ratio_inner = 0.0;   // |u| <= radius/4
    double ratio_full = 0.0;
    for (const auto& u : pts) {
        const double gu = g.value(u);
        if (gu < kTinyValue) continue;
        Vec two = u;
        scale(2.0, two);
        const double g2 = g.value(two);
        c_plus = std::max(c_plus, (g2 - 1.0) / gu);
        const double ratio = g2 / gu;
        ratio_full = std::max(ratio_full, ratio);
        if (norm2(u) <= 0.25 * sample_radius) ratio_inner = std::max(ratio_inner, ratio);
    }
    Delta2Certificate cert;
    cert.c = std::max(0.0, c_plus);
    cert.unbounded = ratio_full > kCap;
    cert.global = !cert.unbounded && ratio_inner > 0.0 &&
                  ratio_full <= ratio_inner * 1.05 + 1e-9;
    return cert;
}

SymplecticReport symplectic_test(const GFunction& g, int n_samples, double tol, uint64_t seed) {
    if (g.dim() % 2 != 0) throw std::invalid_argument("symplectic_test: dimension must be even");
    const GFunction star = g.conjugate();
    Rng rng(seed);
    auto pts = sample_points(rng, g.dim(), n_samples);
    SymplecticReport rep{true, 0.0, {}};
    for (const auto& u : pts) {
        const double gu = g.value(u);
        const double resid = std::abs(star.value(apply_J(u)) - gu) / (1.0 + std::abs(gu));
        if (resid > rep.worst_residual) {
            rep.worst_residual = resid;
            rep.worst_point = u;
        }
    }
    rep.symplectic = rep.worst_residual < tol;
    return rep;
}

SemiSymplecticCertificate semi_symplectic_certificate(const GFunction& g, const SampleSpec& spec,
                                                      double k_max, double c_max) {
    if (g.dim() % 2 != 0)
        throw std::invalid_argument("semi_symplectic_certificate: dimension must be even");
    const GFunction star = g.conjugate();
    Rng rng(spec.seed);
    auto pts = sample_points(rng, g.dim(), spec.count, spec.radius_min, spec.radius_max);

    std::vector<double> star_ju(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) star_ju[i] = star.value(apply_J(pts[i]));

    auto needed_c = [&](double k, size_t& worst) {
        double c = 0.0;
        worst = 0;
        for (size_t i = 0; i < pts.size(); ++i) {
            Vec ku = pts[i];
            scale(k, ku);
            const double gap = star_ju[i] - g.value(ku);
            if (gap > c) {
                c = gap;
                worst = i;
            }
        }
        return c;
    };

    SemiSymplecticCertificate cert;
    cert.verified_on = spec.describe();

    size_t worst = 0;
    if (needed_c(1.0, worst) <= 1e-9) {
        cert.k = 1.0;
        cert.c = 0.0;
        return cert;
    }

    double best_score = std::numeric_limits<double>::infinity();
    bool found = false;
    size_t worst_overall = 0;
    for (int e = -10; e <= 20; ++e) {
        const double k = std::pow(2.0, e);
        if (k > k_max) break;
        const double c = needed_c(k, worst);
        if (c > c_max) {
            worst_overall = worst;
            continue;
        }
        const double score = k * (c + 1.0);
        if (score < best_score) {
            best_score = score;
            cert.k = k;
            cert.c = c;
            found = true;
        }
    }
    if (!found) cert.violated_at = pts[worst_overall];
    return cert;
}

GrowthIndices growth_indices(const GFunction& g, const SampleSpec& spec, double eps) {
    Rng rng(spec.seed);
    auto pts = sample_points(rng, g.dim(), spec.count, spec.radius_min, spec.radius_max);

    GrowthIndices idx{};
    idx.eps = eps;
    idx.sample_spec = spec.describe();

    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& u : pts) {
        const double gu = g.value(u);
        if (gu < kTinyValue) continue;
        const double ratio = dot(u, g.gradient(u)) / gu;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    idx.simonenko_p = lo;
    idx.simonenko_q = hi > 1e12 ? std::numeric_limits<double>::infinity() : hi;

    auto sup_ratio = [&](double t) {
        double s = 0.0;
        for (const auto& u : pts) {
            const double gu = g.value(u);
            if (gu < kTinyValue) continue;
            Vec tu = u;
            scale(t, tu);
            s = std::max(s, g.value(tu) / gu);
        }
        return s;
    };

    // Least-squares slope of log2 sup_u G(tu)/G(u) against log2 t over a
    // dyadic window; the limits are log-asymptotic slopes.
    auto fit_slope = [&](int k_lo, int k_hi) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (int k = k_lo; k <= k_hi; ++k) {
            const double x = k;
            const double y = std::log2(sup_ratio(std::pow(2.0, k)));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++m;
        }
        return (m * sxy - sx * sy) / (m * sxx - sx * sx);
    };
    idx.mo_alpha = fit_slope(-20, -10);
    idx.mo_beta = fit_slope(10, 20);

    double k_eps = 1.0;
    for (int k = -20; k <= 20; k += 2) {
        const double t = std::pow(2.0, k);
        const double lo_pow = std::min(std::pow(t, idx.mo_beta + eps), std::pow(t, idx.mo_alpha - eps));
        const double hi_pow = std::max(std::pow(t, idx.mo_beta + eps), std::pow(t, idx.mo_alpha - eps));
        for (size_t i = 0; i < pts.size(); i += 7) {
            const double gu = g.value(pts[i]);
            if (gu < kTinyValue) continue;
            Vec tu = pts[i];
            scale(t, tu);
            const double gtu = g.value(tu);
            if (gtu < kTinyValue) continue;
            k_eps = std::max(k_eps, gtu / (hi_pow * gu));
            k_eps = std::max(k_eps, lo_pow * gu / gtu);
        }
    }
    idx.k_eps = k_eps;
    return idx;
}

ConvexFunction::ConvexFunction(const GFunction& g)
    : dim(g.dim()),
      value([g](ConstSpan u) { return g.value(u); }),
      gradient([g](ConstSpan u) { return g.gradient(u); }) {}

ConjugateGradientBoundReport conjugate_gradient_bound(const ConvexFunction& h, const GFunction& g,
                                                      double beta, double gamma, double r,
                                                      const std::vector<Vec>& samples) {
    if (r <= 1.0) throw std::invalid_argument("conjugate_gradient_bound: r must exceed 1");
    ConjugateGradientBoundReport rep{true, {}, 0, -std::numeric_limits<double>::infinity(),
                                     std::numeric_limits<double>::infinity()};
    for (const auto& u : samples) {
        const double hu = h.value(u);
        if (hu < -beta - 1e-12 || hu > g.value(u) + gamma + 1e-12) {
            rep.hypothesis_ok = false;
            rep.hypothesis_violation = u;
            throw std::invalid_argument(
                "conjugate_gradient_bound: sandwich -beta <= H <= G + gamma fails on a sample");
        }
    }
    const GFunction star = g.conjugate();
    for (const auto& u : samples) {
        Vec ru = u;
        scale(r, ru);
        const double lhs = star.value(h.gradient(u));
        const double rhs = g.value(ru) / (r - 1.0) + r / (r - 1.0) * (beta + gamma);
        const double slack = rhs - lhs;
        rep.max_slack = std::max(rep.max_slack, slack);
        rep.min_slack = std::min(rep.min_slack, slack);
        if (slack < -1e-9 * (1.0 + std::abs(rhs))) ++rep.violations;
    }
    return rep;
}

}  // namespace dualact
