// Uniformly sampled T-periodic paths with wrap-around indexing, their discrete
// calculus, and CSV/JSON round-trips.

#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "dualact/vecops.hpp"

namespace dualact {

class Trajectory {
public:
    Trajectory() = default;
    Trajectory(double period, int n_samples, int dim, DerivRule rule = DerivRule::Spectral)
        : period_(period),
          n_(n_samples),
          dim_(dim),
          rule_(rule),
          values_(static_cast<size_t>(n_samples) * dim, 0.0) {
        if (period <= 0.0) throw std::invalid_argument("Trajectory: period must be positive");
        if (n_samples < 4) throw std::invalid_argument("Trajectory: need at least 4 samples");
        if (dim < 1) throw std::invalid_argument("Trajectory: dimension must be positive");
    }

    double period() const { return period_; }
    int samples() const { return n_; }
    int dim() const { return dim_; }
    DerivRule rule() const { return rule_; }
    double time_at(int k) const { return period_ * k / n_; }
    double quad_weight() const { return period_ / n_; }

    ConstSpan node(int k) const { return ConstSpan(values_).subspan(wrap(k) * dim_, dim_); }
    MutSpan node(int k) { return MutSpan(values_).subspan(wrap(k) * dim_, dim_); }
    double& at(int k, int j) { return values_[wrap(k) * dim_ + j]; }
    double at(int k, int j) const { return values_[wrap(k) * dim_ + j]; }

    const Vec& values() const { return values_; }
    Vec& values() { return values_; }

    /// Sample a callable t -> vector (or scalar via the second overload).
    static Trajectory sample(double period, int n_samples, int dim,
                             const std::function<Vec(double)>& f,
                             DerivRule rule = DerivRule::Spectral);
    static Trajectory sample_scalar(double period, int n_samples,
                                    const std::function<double(double)>& f,
                                    DerivRule rule = DerivRule::Spectral);

    Vec mean() const;
    /// u = mean + tilde; tilde has zero mean by construction.
    Trajectory tilde() const;
    void remove_mean();

    Trajectory derivative() const;
    /// Zero-mean antiderivative (spectral rule only).
    Trajectory antiderivative() const;

    double max_norm() const { return max_abs(values_); }

    nlohmann::json to_json() const;
    static Trajectory from_json(const nlohmann::json& j, DerivRule rule = DerivRule::Spectral);
    void write_csv(std::ostream& os) const;
    static Trajectory read_csv(std::istream& is, double period,
                               DerivRule rule = DerivRule::Spectral);

private:
    size_t wrap(int k) const {
        int m = k % n_;
        if (m < 0) m += n_;
        return static_cast<size_t>(m);
    }

    double period_ = 1.0;
    int n_ = 0;
    int dim_ = 0;
    DerivRule rule_ = DerivRule::Spectral;
    Vec values_;
};

/// Band-limited random trajectory: Fourier modes 1..max_mode with standard
/// normal coefficients per component; mean-free by construction.
Trajectory random_band_limited(Rng& rng, double period, int n_samples, int dim,
                               int max_mode = 8, DerivRule rule = DerivRule::Spectral);

}  // namespace dualact
