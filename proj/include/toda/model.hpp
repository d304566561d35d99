#pragma once

#include <complex>
#include <vector>

namespace toda {

using cplx = std::complex<double>;

struct ModelParams {
    int n_particles = 2;
    double hbar = 1.0;
    double g = 1.0;
    double kappa = 1.0;

    // rho = kappa g^{2N}; always recomputed from the primary fields.
    double rho() const;
    // rho^hbar, the weight in front of every determinant coupling.
    double rho_weight() const;

    void validate() const;
};

struct TruncationConfig {
    int depth = 0;  // 0 selects max(4N, 40) and a lambda-dependent floor
    double tail_tol = 1e-13;
    int max_depth = 1 << 20;
};

// Monic t(lambda) = prod (lambda - tau_k) over a self-conjugate multiset.
class SpectralPolynomial {
public:
    SpectralPolynomial() = default;
    explicit SpectralPolynomial(std::vector<cplx> roots);

    // Monic polynomial with the given elementary symmetric functions e_1..e_N.
    static SpectralPolynomial from_elementary(const std::vector<double>& e);

    const std::vector<cplx>& roots() const { return roots_; }
    int degree() const { return static_cast<int>(roots_.size()); }

    // c[0] = 1, c[k] = (-1)^k e_k: coefficient of lambda^{N-k}
    std::vector<double> coefficients() const;

    cplx operator()(cplx lambda) const;

    // Throws ValidationError unless degree == N and |Im tau| < hbar/2.
    void validate(const ModelParams& p) const;

private:
    std::vector<cplx> roots_;
};

struct HillZeros {
    std::vector<cplx> deltas;
    int contour_count = 0;      // argument-principle count (0 when not computed)
    double max_residual = 0.0;  // max |H(delta_k)|

    double total_momentum() const;
    void validate(const ModelParams& p) const;
};

// prod (lambda - r_k)
cplx product_over_roots(const std::vector<cplx>& roots, cplx lambda);

std::vector<cplx> power_sums(const std::vector<cplx>& roots, int k_max);
// Newton's identities: p_1..p_N -> e_1..e_N
std::vector<double> elementary_from_power_sums(const std::vector<double>& p);
std::vector<double> elementary_from_roots(const std::vector<cplx>& roots);
// Roots of lambda^N - e_1 lambda^{N-1} + e_2 lambda^{N-2} - ..., conjugate pairs symmetrised.
std::vector<cplx> roots_from_elementary(const std::vector<double>& e);

// Real-axis quadrature: end-corrected trapezoid on [-L, L] plus Gauss-Legendre tails
// in u = L/|mu| covering |mu| > L.
struct LineQuadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t core_count = 0;  // first core_count nodes are the uniform grid
    double lambda_max = 0.0;
    double spacing = 0.0;
};

LineQuadrature make_line_quadrature(double lambda_max, double spacing, int tail_points = 32);

}  // namespace toda
