#pragma once

#include <vector>

#include "toda/baxter.hpp"
#include "toda/model.hpp"
#include "toda/specfun.hpp"

namespace toda {

// Gutzwiller's fundamental solutions Q_t^+ and Q_t^- for a fixed polynomial t.
struct QPair {
    SpectralPolynomial t;
    ModelParams params;
    TruncationConfig cfg;

    LogComplex plus(cplx lambda) const;
    LogComplex minus(cplx lambda) const;
    LogComplex operator()(cplx lambda, QSign s) const { return s == QSign::Plus ? plus(lambda) : minus(lambda); }
};

LogComplex q_big_plus(cplx lambda, const SpectralPolynomial& t, const ModelParams& p,
                      const TruncationConfig& cfg);
LogComplex q_big_minus(cplx lambda, const SpectralPolynomial& t, const ModelParams& p,
                       const TruncationConfig& cfg);

// Relative residual of the Baxter equation for Q_t^sign at lambda.
double baxter_residual(cplx lambda, const QPair& qp, QSign sign);

// Q^+(l) Q^-(l + i hbar) - Q^-(l) Q^+(l + i hbar)
LogComplex wronskian(cplx lambda, const QPair& qp);
// kappa^{-i l} g^{-N hbar} e^{-2N pi l/hbar} prod (hbar/(i pi)) sinh(pi(l - tau)/hbar) * H(l)
LogComplex wronskian_closed_form(cplx lambda, const QPair& qp);
double wronskian_residual(cplx lambda, const QPair& qp);
// |W(l + i hbar) / W(l) - (-1)^N kappa^hbar| / kappa^hbar
double wronskian_quasi_periodicity_residual(cplx lambda, const QPair& qp);

// q(l) = e^{N pi l/hbar} (Q^+(l) - zeta Q^-(l)) / prod sinh(pi(l - delta_k)/hbar)
LogComplex q_small(cplx lambda, const QPair& qp, double zeta_phase, const std::vector<cplx>& deltas);
// |1 - zeta Q^-(delta_k)/Q^+(delta_k)|: residue of q at delta_k relative to the Q scale
double q_small_residue(std::size_t k, const QPair& qp, double zeta_phase,
                       const std::vector<cplx>& deltas);

// Y_t on the real axis from the determinants and the Hill zeros.
double y_from_determinants(double lambda, const SpectralPolynomial& t,
                           const std::vector<cplx>& deltas, const ModelParams& p,
                           const TruncationConfig& cfg);

}  // namespace toda
