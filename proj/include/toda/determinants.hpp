#pragma once

#include "toda/model.hpp"
#include "toda/specfun.hpp"

namespace toda {

// Value of a truncated determinant plus the evidence that truncation settled.
struct DeterminantValue {
    cplx value;
    int depth = 0;       // depth of the returned value
    double delta = 0.0;  // |value(depth) - value(depth/2)|
};

// K_+(lambda): half-infinite tridiagonal determinant with rows
// (rho^hbar / t(lambda + i k hbar), 1, 1 / t(lambda + i k hbar)), k >= 1.
DeterminantValue k_plus_certified(cplx lambda, const SpectralPolynomial& t, const ModelParams& p,
                                  const TruncationConfig& cfg);
cplx k_plus(cplx lambda, const SpectralPolynomial& t, const ModelParams& p,
            const TruncationConfig& cfg);
// K_-(lambda) = conj K_+(conj lambda)
cplx k_minus(cplx lambda, const SpectralPolynomial& t, const ModelParams& p,
             const TruncationConfig& cfg);

// H(lambda) = K_+(l) K_-(l + i hbar) - rho^hbar K_+(l + i hbar) K_-(l) / (t(l) t(l + i hbar))
cplx hill(cplx lambda, const SpectralPolynomial& t, const ModelParams& p,
          const TruncationConfig& cfg);

// Central (2w+1)x(2w+1) truncation of the doubly-infinite Hill matrix. Oracle only.
cplx hill_brute(cplx lambda, const SpectralPolynomial& t, const ModelParams& p, int window);

// prod_k sinh(pi(lambda - delta_k)/hbar) / sinh(pi(lambda - tau_k)/hbar)
cplx hill_factorized(cplx lambda, const std::vector<cplx>& tau, const std::vector<cplx>& deltas,
                     double hbar);

// sum_{k>=1} 1/|t(lambda + i k hbar)|, the scale in the Hadamard bound on |K_+ - 1|
double k_plus_decay_scale(cplx lambda, const SpectralPolynomial& t, const ModelParams& p);

// Number of zeros of H in the strip |Im lambda| < hbar/2 (argument principle).
int hill_zero_count(const SpectralPolynomial& t, const ModelParams& p, const TruncationConfig& cfg,
                    double half_width);

HillZeros hill_zeros(const SpectralPolynomial& t, const ModelParams& p,
                     const TruncationConfig& cfg);

}  // namespace toda
