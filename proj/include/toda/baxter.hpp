#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "toda/model.hpp"
#include "toda/specfun.hpp"

namespace toda {

enum class QSign { Plus, Minus };

// t(l) Q(l) = up * Q(l + i hbar) + down * Q(l - i hbar)
struct BaxterCoefficients {
    cplx up;
    cplx down;
};

// For kappa = 0 the factor kappa^{-i lambda} of Q^+ is stripped, which moves kappa^hbar
// from the down-shift to the up-shift term.
inline BaxterCoefficients baxter_coefficients(const ModelParams& p, QSign sign)
{
    const int n = p.n_particles;
    const cplx in = std::pow(cplx(0.0, 1.0), n);
    const double gn = std::pow(p.g, n * p.hbar);
    const double kh = p.kappa == 0.0 ? 0.0 : std::pow(p.kappa, p.hbar);
    if (sign == QSign::Plus && p.kappa == 0.0) return {0.0, std::conj(in) * gn};
    return {in * gn, kh * std::conj(in) * gn};
}

// ln of the exponential prefactor of Q^+ / Q^-:
//   plus:  (kappa g^N)^{-i l} hbar^{i N l/hbar} e^{-N pi l/hbar}
//   minus: g^{i N l} hbar^{-i N l/hbar} e^{-N pi l/hbar}
inline cplx q_prefactor_log(cplx lambda, const ModelParams& p, QSign sign)
{
    const cplx I(0.0, 1.0);
    const double n = p.n_particles;
    const double lh = std::log(p.hbar) / p.hbar;
    const cplx decay = -n * std::numbers::pi * lambda / p.hbar;
    if (sign == QSign::Plus) {
        const double lk = p.kappa > 0.0 ? std::log(p.kappa) : 0.0;
        return -I * lambda * (lk + n * std::log(p.g)) + I * n * lambda * lh + decay;
    }
    return I * n * lambda * std::log(p.g) - I * n * lambda * lh + decay;
}

// sum_k ln Gamma(1 -+ i(lambda - r_k)/hbar)  (minus sign for Plus)
inline cplx gamma_product_log(cplx lambda, const std::vector<cplx>& roots, double hbar, QSign sign)
{
    const cplx I(0.0, 1.0);
    const double s = sign == QSign::Plus ? -1.0 : 1.0;
    cplx acc = 0.0;
    for (auto r : roots) acc += log_gamma(1.0 + s * I * (lambda - r) / hbar);
    return acc;
}

// Relative Baxter residual from the ratios Q(l + i hbar)/Q(l) and Q(l - i hbar)/Q(l).
inline double baxter_relative_residual(cplx t_value, const BaxterCoefficients& c, cplx ratio_up,
                                       cplx ratio_down)
{
    const cplx a = c.up * ratio_up, b = c.down * ratio_down;
    const double scale = std::max({std::abs(t_value), std::abs(a), std::abs(b)});
    return std::abs(t_value - a - b) / scale;
}

}  // namespace toda
