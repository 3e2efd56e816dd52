#include "dualact/vecops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dualact {

double dot(ConstSpan a, ConstSpan b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(ConstSpan a) { return std::sqrt(dot(a, a)); }

double max_abs(ConstSpan a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

void axpy(double alpha, ConstSpan x, MutSpan y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(double alpha, MutSpan x) {
    for (double& v : x) v *= alpha;
}

void apply_J(ConstSpan u, MutSpan out) {
    const size_t n = u.size() / 2;
    for (size_t i = 0; i < n; ++i) {
        out[i] = u[n + i];
        out[n + i] = -u[i];
    }
}

Vec apply_J(ConstSpan u) {
    Vec out(u.size());
    apply_J(u, out);
    return out;
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols, rows);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Vec Matrix::apply(ConstSpan x) const {
    Vec y(rows, 0.0);
    for (int i = 0; i < rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < cols; ++j) s += (*this)(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Vec Matrix::apply_transpose(ConstSpan x) const {
    Vec y(cols, 0.0);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) y[j] += (*this)(i, j) * x[i];
    return y;
}

LuFactors lu_factor(Matrix m, double pivot_tol) {
    if (m.rows != m.cols) throw std::invalid_argument("lu_factor: matrix not square");
    const int n = m.rows;
    LuFactors f;
    f.perm.resize(n);
    for (int i = 0; i < n; ++i) f.perm[i] = i;

    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(m(k, k));
        for (int i = k + 1; i < n; ++i) {
            if (std::abs(m(i, k)) > best) {
                best = std::abs(m(i, k));
                piv = i;
            }
        }
        if (best < pivot_tol) throw std::runtime_error("lu_factor: singular matrix");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            std::swap(f.perm[k], f.perm[piv]);
        }
        for (int i = k + 1; i < n; ++i) {
            m(i, k) /= m(k, k);
            const double lik = m(i, k);
            for (int j = k + 1; j < n; ++j) m(i, j) -= lik * m(k, j);
        }
    }
    f.lu = std::move(m);
    return f;
}

Vec LuFactors::solve(ConstSpan b) const {
    const int n = lu.rows;
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = b[perm[i]];
    for (int i = 1; i < n; ++i) {
        double s = x[i];
        for (int j = 0; j < i; ++j) s -= lu(i, j) * x[j];
        x[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j < n; ++j) s -= lu(i, j) * x[j];
        x[i] = s / lu(i, i);
    }
    return x;
}

Matrix invert(const Matrix& m) {
    const LuFactors f = lu_factor(m);
    const int n = m.rows;
    Matrix inv(n, n);
    Vec e(n, 0.0);
    for (int j = 0; j < n; ++j) {
        e.assign(n, 0.0);
        e[j] = 1.0;
        Vec col = f.solve(e);
        for (int i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

Vec solve_linear(const Matrix& m, ConstSpan b) { return lu_factor(m).solve(b); }

// ---------------------------------------------------------------------------

namespace {

bool is_power_of_two(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        for (auto& x : a) x /= static_cast<double>(n);
    }
}

void dft_direct(std::vector<std::complex<double>>& a, bool inverse) {
    const size_t n = a.size();
    std::vector<std::complex<double>> out(n);
    const double sgn = inverse ? 1.0 : -1.0;
    for (size_t k = 0; k < n; ++k) {
        std::complex<double> s(0.0, 0.0);
        for (size_t j = 0; j < n; ++j) {
            const double ang = sgn * 2.0 * std::numbers::pi * static_cast<double>(k * j % n) /
                               static_cast<double>(n);
            s += a[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = inverse ? s / static_cast<double>(n) : s;
    }
    a = std::move(out);
}

}  // namespace

void fourier_transform(std::vector<std::complex<double>>& data, bool inverse) {
    if (is_power_of_two(data.size()))
        fft_radix2(data, inverse);
    else
        dft_direct(data, inverse);
}

Vec periodic_derivative(ConstSpan values, int n_samples, int dim, double period,
                        DerivRule rule) {
    const int n = n_samples;
    Vec out(values.size(), 0.0);
    if (rule == DerivRule::ForwardDiff) {
        const double h = period / n;
        for (int k = 0; k < n; ++k) {
            const int kn = (k + 1) % n;
            for (int j = 0; j < dim; ++j)
                out[static_cast<size_t>(k) * dim + j] =
                    (values[static_cast<size_t>(kn) * dim + j] -
                     values[static_cast<size_t>(k) * dim + j]) /
                    h;
        }
        return out;
    }
    std::vector<std::complex<double>> buf(n);
    for (int j = 0; j < dim; ++j) {
        for (int k = 0; k < n; ++k)
            buf[k] = values[static_cast<size_t>(k) * dim + j];
        fourier_transform(buf, false);
        for (int k = 0; k < n; ++k) {
            int m = k <= n / 2 ? k : k - n;
            if (2 * k == n) m = 0;  // Nyquist mode carries no derivative for real data
            const double omega = 2.0 * std::numbers::pi * m / period;
            buf[k] *= std::complex<double>(0.0, omega);
        }
        fourier_transform(buf, true);
        for (int k = 0; k < n; ++k)
            out[static_cast<size_t>(k) * dim + j] = buf[k].real();
    }
    return out;
}

Vec periodic_derivative_transpose(ConstSpan values, int n_samples, int dim,
                                  double period, DerivRule rule) {
    if (rule == DerivRule::Spectral) {
        // The spectral differentiation matrix is antisymmetric.
        Vec d = periodic_derivative(values, n_samples, dim, period, rule);
        scale(-1.0, d);
        return d;
    }
    const int n = n_samples;
    const double h = period / n;
    Vec out(values.size(), 0.0);
    for (int k = 0; k < n; ++k) {
        const int kp = (k - 1 + n) % n;
        for (int j = 0; j < dim; ++j)
            out[static_cast<size_t>(k) * dim + j] =
                (values[static_cast<size_t>(kp) * dim + j] -
                 values[static_cast<size_t>(k) * dim + j]) /
                h;
    }
    return out;
}

Vec periodic_antiderivative(ConstSpan values, int n_samples, int dim, double period) {
    const int n = n_samples;
    Vec out(values.size(), 0.0);
    std::vector<std::complex<double>> buf(n);
    for (int j = 0; j < dim; ++j) {
        for (int k = 0; k < n; ++k)
            buf[k] = values[static_cast<size_t>(k) * dim + j];
        fourier_transform(buf, false);
        buf[0] = 0.0;
        for (int k = 1; k < n; ++k) {
            int m = k <= n / 2 ? k : k - n;
            if (2 * k == n) {
                buf[k] = 0.0;
                continue;
            }
            const double omega = 2.0 * std::numbers::pi * m / period;
            buf[k] /= std::complex<double>(0.0, omega);
        }
        fourier_transform(buf, true);
        for (int k = 0; k < n; ++k)
            out[static_cast<size_t>(k) * dim + j] = buf[k].real();
    }
    return out;
}

Vec random_direction(Rng& rng, int dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec d(dim);
    double n = 0.0;
    do {
        for (auto& x : d) x = gauss(rng);
        n = norm2(d);
    } while (n < 1e-12);
    scale(1.0 / n, d);
    return d;
}

std::vector<Vec> sample_points(Rng& rng, int dim, int count, double radius_min,
                               double radius_max) {
    std::uniform_real_distribution<double> unif(std::log(radius_min), std::log(radius_max));
    std::vector<Vec> pts;
    pts.reserve(count);
    for (int i = 0; i < count; ++i) {
        Vec d = random_direction(rng, dim);
        scale(std::exp(unif(rng)), d);
        pts.push_back(std::move(d));
    }
    return pts;
}

void require_dim(int expected, size_t got, const char* what) {
    if (static_cast<size_t>(expected) != got)
        throw DimensionMismatch(std::string(what) + ": expected dimension " +
                                std::to_string(expected) + ", got " + std::to_string(got));
}

}  // namespace dualact
