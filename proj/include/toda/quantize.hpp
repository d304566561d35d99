#pragma once

#include <optional>
#include <vector>

#include "toda/model.hpp"
#include "toda/nlie.hpp"

namespace toda {

struct QuantizationProblem {
    ModelParams params;
    std::vector<int> quantum_numbers;
    double total_momentum = 0.0;

    void validate() const;
};

struct QuantizationCandidate {
    HillZeros deltas;
    double zeta_phase = 0.0;  // in (-pi, pi]
    int winding = 0;          // solved phase = zeta_phase + 2 pi winding
    std::vector<double> residuals;
    bool converged = false;
    int iterations = 0;
    std::vector<double> history;  // max |residual| per Newton step

    double phase() const;
};

struct SpectrumResult {
    std::vector<cplx> tau;
    std::vector<double> newton_sums;
    std::vector<double> elementary_symmetric;  // e_1..e_N = eigenvalues of H_1..H_N
    double energy = 0.0;
    double yang_value = 0.0;
};

struct QuantizeOptions {
    double tol = 1e-10;  // on max |F_k| and |sum delta - P|
    int max_iter = 40;
    double nlie_tol = 1e-12;
    double fd_step = 1e-6;  // in units of hbar
    double margin = 20.0;   // grid half-width beyond max |delta|, in hbar
    double nodes_per_hbar = 16.0;
    bool verbose = false;
};

// F_k for real delta; requires rho > 0.
std::vector<double> quantization_residual(const QuantizationCandidate& c, const QuantizationProblem& q,
                                          const NlieSolution& sol);
// F_k with the integral term dropped (the rho -> 0 form).
std::vector<double> quantization_residual_dropped(const QuantizationCandidate& c,
                                                  const QuantizationProblem& q);

QuantizationCandidate solve_quantization(const QuantizationProblem& q,
                                         const std::optional<QuantizationCandidate>& init = std::nullopt,
                                         const QuantizeOptions& opt = {});

// NLIE solve at the candidate's zeros on the grid the solver would use.
NlieSolution solve_nlie_for(const QuantizationCandidate& c, const QuantizationProblem& q,
                            const QuantizeOptions& opt = {}, bool certify = true);

// w = Im W for real delta and unimodular zeta.
double yang_potential(const QuantizationCandidate& c, const QuantizationProblem& q, const NlieSolution& sol);
// Central-difference gradient of w in delta, Y re-solved at every shifted point.
std::vector<double> yang_gradient(const QuantizationCandidate& c, const QuantizationProblem& q,
                                  const QuantizeOptions& opt = {}, double step = 1e-5);

SpectrumResult reconstruct_spectrum(const QuantizationCandidate& c, const QuantizationProblem& q,
                                    const NlieSolution& sol);

}  // namespace toda
