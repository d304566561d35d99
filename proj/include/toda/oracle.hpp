#pragma once

#include <vector>

#include "toda/model.hpp"
#include "toda/specfun.hpp"

namespace toda {

// Relative-coordinate operator of the two-particle chain:
//   -hbar^2 psi'' + (a e^{-x} + b e^{x}) psi,  a = (kappa g^2)^hbar, b = g^{2 hbar},
// discretized by the 3-point Laplacian with Dirichlet walls at x0 +- L.
struct DiscretizedOperator {
    double half_width = 0.0;
    double center = 0.0;  // potential minimum x0 = ln(a/b)/2
    int points = 0;       // interior grid points
    double a = 0.0, b = 0.0;
    double hbar = 1.0;

    double spacing() const { return 2.0 * half_width / (points + 1); }
    double potential(double x) const;
    double diagonal(int i) const;
    double off_diagonal() const;

    // Number of eigenvalues below e (Sturm count).
    int count_below(double e) const;
    // k-th eigenvalue (0-based) by bisection.
    double eigenvalue(int k, double tol = 1e-14) const;
    // Normalized eigenvector for eigenvalue e by inverse iteration.
    std::vector<double> eigenvector(double e) const;
};

struct OracleSpectrum {
    std::vector<double> energies;         // full two-body energies P^2/4 + eps
    std::vector<double> relative;         // eps
    double half_width = 0.0;              // final L
    int points = 0;                       // finest grid
    double refinement_delta = 0.0;        // max change of the extrapolated values under the last halving
    double width_delta = 0.0;             // max change when L is enlarged
    double boundary_amplitude = 0.0;      // max |psi| at the walls relative to max |psi|
};

// Lowest `count` (<= 20) energies at total momentum P; kappa > 0 required.
// Throws SolverError when refinement does not settle below tol (relative).
OracleSpectrum n2_relative_spectrum(const ModelParams& p, double momentum, int count, double tol = 1e-7);

struct FredholmSeries {
    cplx value;
    std::vector<cplx> terms;         // order-n contributions, n = 1..order
    std::vector<double> bounds;      // Hadamard bounds ((1 + rho^hbar) u)^n / n!
    double tail_bound = 0.0;         // bound on orders beyond `order`
    double window_bound = 0.0;       // bound on indices beyond the window
    int window = 0;
    bool conclusive = true;          // tail + window bound below tol
};

// Discrete Fredholm expansion of K_+(lambda) = det(1 + M), M the off-diagonal part of the
// half-infinite tridiagonal matrix with rows (rho^hbar / t_k, 1, 1 / t_k), t_k = t(lambda + i k hbar),
// by explicit enumeration of principal minors of size <= order (<= 4) over indices 1..window.
FredholmSeries fredholm_series_k_plus(cplx lambda, const SpectralPolynomial& t, const ModelParams& p,
                                      int order, int window = 40, double tol = 1e-8);

}  // namespace toda
