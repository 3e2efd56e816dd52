// Small dense vector/matrix kernels shared by all modules.
//
// Everything here operates on flat std::vector<double> buffers; trajectory
// data is stored row-major as values[k*dim + j] (node k, component j).

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dualact {

using Vec = std::vector<double>;
using ConstSpan = std::span<const double>;
using MutSpan = std::span<double>;

double dot(ConstSpan a, ConstSpan b);
double norm2(ConstSpan a);
double max_abs(ConstSpan a);

/// y += alpha * x
void axpy(double alpha, ConstSpan x, MutSpan y);
void scale(double alpha, MutSpan x);

/// Canonical symplectic matrix on R^{2n}: J(x, y) = (y, -x) with x, y in R^n.
void apply_J(ConstSpan u, MutSpan out);
Vec apply_J(ConstSpan u);

/// Dense row-major matrix, only used at small dimensions (Newton systems,
/// quadratic forms, linear images).
struct Matrix {
    int rows = 0;
    int cols = 0;
    Vec a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static Matrix identity(int n);
    Matrix transpose() const;
    Vec apply(ConstSpan x) const;
    Vec apply_transpose(ConstSpan x) const;
};

/// LU factorization with partial pivoting; throws std::runtime_error on a
/// numerically singular matrix.
struct LuFactors {
    Matrix lu;
    std::vector<int> perm;

    Vec solve(ConstSpan b) const;
};

LuFactors lu_factor(Matrix m, double pivot_tol = 1e-14);
Matrix invert(const Matrix& m);

/// Solves m x = b in place of forming the inverse.
Vec solve_linear(const Matrix& m, ConstSpan b);

// ---------------------------------------------------------------------------
// Periodic grid calculus.
// ---------------------------------------------------------------------------

enum class DerivRule { Spectral, ForwardDiff };

/// In-place radix-2 FFT when the size is a power of two, direct DFT otherwise.
void fourier_transform(std::vector<std::complex<double>>& data, bool inverse);

/// Derivative of a T-periodic sampled path (row-major N x dim).
Vec periodic_derivative(ConstSpan values, int n_samples, int dim, double period,
                        DerivRule rule);

/// Adjoint of the derivative operator used when assembling gradients of
/// quadrature functionals:  sum_k <(D v)_k, w_k> = sum_k <v_k, (D^T w)_k>.
Vec periodic_derivative_transpose(ConstSpan values, int n_samples, int dim,
                                  double period, DerivRule rule);

/// Mean-zero antiderivative (spectral); input must have zero mean per
/// component.
Vec periodic_antiderivative(ConstSpan values, int n_samples, int dim, double period);

// ---------------------------------------------------------------------------
// Sampling helpers used by the property checks.
// ---------------------------------------------------------------------------

using Rng = std::mt19937_64;

Vec random_direction(Rng& rng, int dim);

/// Points with uniform random directions and log-uniform radii in
/// [radius_min, radius_max]; the default sampling grid of the toolkit.
std::vector<Vec> sample_points(Rng& rng, int dim, int count, double radius_min = 1e-3,
                               double radius_max = 1e3);

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

void require_dim(int expected, size_t got, const char* what);

}  // namespace dualact
