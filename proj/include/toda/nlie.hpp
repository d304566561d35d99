#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "toda/baxter.hpp"
#include "toda/model.hpp"
#include "toda/specfun.hpp"

namespace toda {

// Uniform grid on [-L, L] with end-corrected trapezoid weights.
struct Grid {
    std::vector<double> nodes;
    std::vector<double> weights;
    double lambda_max = 0.0;
    std::size_t count = 0;
    double spacing = 0.0;
};

Grid make_grid(double lambda_max, double spacing);
// L = max |Re delta| + margin * hbar, spacing = hbar / nodes_per_hbar
Grid default_grid(const HillZeros& deltas, const ModelParams& p, double margin = 20.0,
                  double nodes_per_hbar = 16.0);

struct NlieOptions {
    double tol = 1e-12;
    int max_iter = 20000;
    bool certify = true;   // re-solve on the halved grid
    int tail_points = 32;  // Gauss-Legendre nodes per tail beyond +-L
    bool verbose = false;
    std::vector<double> warm_start;  // ln Y on all quadrature nodes, or empty
};

struct NlieCertificate {
    int iterations = 0;
    int continuation_steps = 0;
    double rho_over_j = 0.0;
    bool contraction_regime = false;  // rho^hbar / J < 1
    int contraction_violations = 0;
    double max_observed_ratio = 0.0;
    double max_contraction_bound = 0.0;
    bool anderson_used = false;
    double grid_halving_delta = -1.0;  // < 0: not computed
    double outer_ln_y = 0.0;           // max |ln Y| at the two outermost grid nodes
};

struct NlieSolution {
    Grid grid;
    std::vector<double> ln_y;  // on grid.nodes
    HillZeros deltas;
    ModelParams params;
    double residual = 0.0;

    // full quadrature: grid nodes followed by the tail nodes
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> ln_y_all;
    std::vector<double> log_term;  // ln(1 + rho^hbar Y / |theta(mu - i hbar/2)|^2)

    NlieCertificate certificate;
};

// inf over the real line of |theta(x - i hbar/2)|^2, theta = prod (x - delta)
double theta_infimum(const HillZeros& deltas, const ModelParams& p);

NlieSolution solve_nlie(const HillZeros& deltas, const ModelParams& p, const Grid& grid, double tol);
NlieSolution solve_nlie(const HillZeros& deltas, const ModelParams& p, const Grid& grid,
                        const NlieOptions& opt);

// Nystrom extension of ln Y off the nodes; complex z needs |Im z| < hbar.
double ln_y_at(const NlieSolution& sol, double x);
cplx ln_y_at(const NlieSolution& sol, cplx z);
// ln(1 + rho^hbar Y(z) / (theta(z - i hbar/2) theta(z + i hbar/2)))
cplx log_term_at(const NlieSolution& sol, cplx z);

enum class Side { Upper, Lower };

// F(z) = (1/2 pi i) int f(mu)/(z - mu) dmu from samples of f on a real-line quadrature.
// Near the axis (|Im z| < width/4) the singularity is subtracted, which needs the
// continuation f_at(z); Side picks the boundary value when Im z = 0.
cplx cauchy_transform(const std::vector<double>& nodes, const std::vector<double>& weights,
                      const std::vector<cplx>& values, const std::function<cplx(cplx)>& f_at,
                      cplx z, Side side, double width);
cplx cauchy_transform(const NlieSolution& sol, cplx z, Side side);

// ln v_up(lambda); continuation below Im lambda = -hbar/2 adds the jump of the transform.
cplx log_v_up(cplx lambda, const NlieSolution& sol, bool allow_continuation = false);
// ln v_down(nu), raw integral for Im nu < -hbar/2, continued above when allowed.
cplx log_v_down(cplx nu, const NlieSolution& sol, bool allow_continuation = false);

cplx v_up(cplx lambda, const NlieSolution& sol);
cplx v_down(cplx nu, const NlieSolution& sol);

// (v_up(x - i hbar/2 + i0), v_down(x - i hbar/2 - i0))
std::pair<cplx, cplx> plemelj_boundary(double x, const NlieSolution& sol);

LogComplex q_delta(cplx lambda, QSign sign, const NlieSolution& sol);
double q_delta_baxter_residual(cplx lambda, QSign sign, const NlieSolution& sol,
                               const SpectralPolynomial& t);
double quantum_wronskian_residual(double x, const NlieSolution& sol);

cplx t_delta(cplx lambda, const NlieSolution& sol);

struct NewtonSums {
    std::vector<double> values;  // E_1..E_kmax
    double tail_error = 0.0;
    double max_imag = 0.0;
};

NewtonSums newton_sums_certified(const NlieSolution& sol, int k_max);
std::vector<double> newton_sums(const NlieSolution& sol, int k_max);

}  // namespace toda
