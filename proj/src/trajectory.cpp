#include "dualact/trajectory.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace dualact {

Trajectory Trajectory::sample(double period, int n_samples, int dim,
                              const std::function<Vec(double)>& f, DerivRule rule) {
    Trajectory u(period, n_samples, dim, rule);
    for (int k = 0; k < n_samples; ++k) {
        const Vec x = f(u.time_at(k));
        require_dim(dim, x.size(), "Trajectory::sample");
        std::copy(x.begin(), x.end(), u.node(k).begin());
    }
    return u;
}

Trajectory Trajectory::sample_scalar(double period, int n_samples,
                                     const std::function<double(double)>& f, DerivRule rule) {
    return sample(period, n_samples, 1, [&](double t) { return Vec{f(t)}; }, rule);
}

Vec Trajectory::mean() const {
    Vec m(dim_, 0.0);
    for (int k = 0; k < n_; ++k) axpy(1.0, node(k), m);
    scale(1.0 / n_, m);
    return m;
}

Trajectory Trajectory::tilde() const {
    Trajectory t = *this;
    t.remove_mean();
    return t;
}

void Trajectory::remove_mean() {
    const Vec m = mean();
    for (int k = 0; k < n_; ++k)
        for (int j = 0; j < dim_; ++j) at(k, j) -= m[j];
}

Trajectory Trajectory::derivative() const {
    Trajectory d(period_, n_, dim_, rule_);
    d.values_ = periodic_derivative(values_, n_, dim_, period_, rule_);
    return d;
}

Trajectory Trajectory::antiderivative() const {
    Trajectory a(period_, n_, dim_, rule_);
    a.values_ = periodic_antiderivative(values_, n_, dim_, period_);
    return a;
}

nlohmann::json Trajectory::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (int k = 0; k < n_; ++k) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < dim_; ++j) row.push_back(at(k, j));
        rows.push_back(std::move(row));
    }
    return {{"T", period_}, {"values", rows}};
}

Trajectory Trajectory::from_json(const nlohmann::json& j, DerivRule rule) {
    const auto& rows = j.at("values");
    const int n = static_cast<int>(rows.size());
    const int dim = static_cast<int>(rows.at(0).size());
    Trajectory u(j.at("T").get<double>(), n, dim, rule);
    for (int k = 0; k < n; ++k)
        for (int j2 = 0; j2 < dim; ++j2) u.at(k, j2) = rows.at(k).at(j2).get<double>();
    return u;
}

void Trajectory::write_csv(std::ostream& os) const {
    os << "t";
    for (int j = 0; j < dim_; ++j) os << ",x" << (j + 1);
    os << "\n";
    os.precision(17);
    for (int k = 0; k < n_; ++k) {
        os << time_at(k);
        for (int j = 0; j < dim_; ++j) os << "," << at(k, j);
        os << "\n";
    }
}

Trajectory Trajectory::read_csv(std::istream& is, double period, DerivRule rule) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("trajectory csv: empty stream");
    int dim = -1;  // header columns minus the time column
    for (char c : line)
        if (c == ',') ++dim;
    ++dim;
    if (dim < 1) throw std::runtime_error("trajectory csv: malformed header");

    std::vector<Vec> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        Vec row;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (static_cast<int>(row.size()) != dim + 1)
            throw std::runtime_error("trajectory csv: inconsistent row width");
        rows.push_back(std::move(row));
    }
    Trajectory u(period, static_cast<int>(rows.size()), dim, rule);
    for (size_t k = 0; k < rows.size(); ++k)
        for (int j = 0; j < dim; ++j) u.at(static_cast<int>(k), j) = rows[k][j + 1];
    return u;
}

Trajectory random_band_limited(Rng& rng, double period, int n_samples, int dim, int max_mode,
                               DerivRule rule) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Vec> a(max_mode, Vec(dim)), b(max_mode, Vec(dim));
    for (int m = 0; m < max_mode; ++m)
        for (int j = 0; j < dim; ++j) {
            a[m][j] = gauss(rng);
            b[m][j] = gauss(rng);
        }
    Trajectory u(period, n_samples, dim, rule);
    for (int k = 0; k < n_samples; ++k) {
        const double t = u.time_at(k);
        for (int j = 0; j < dim; ++j) {
            double s = 0.0;
            for (int m = 1; m <= max_mode; ++m) {
                const double w = 2.0 * std::numbers::pi * m * t / period;
                s += a[m - 1][j] * std::cos(w) + b[m - 1][j] * std::sin(w);
            }
            u.at(k, j) = s;
        }
    }
    return u;
}

}  // namespace dualact
