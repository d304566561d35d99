#include "toda/gutzwiller.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "toda/determinants.hpp"
#include "toda/errors.hpp"

namespace toda {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

LogComplex assemble(cplx lambda, cplx k_value, const SpectralPolynomial& t, const ModelParams& p,
                    QSign sign)
{
    return LogComplex::from_log(q_prefactor_log(lambda, p, sign) -
                                gamma_product_log(lambda, t.roots(), p.hbar, sign)) *
           LogComplex::from_complex(k_value);
}

}  // namespace

LogComplex q_big_plus(cplx lambda, const SpectralPolynomial& t, const ModelParams& p,
                      const TruncationConfig& cfg)
{
    return assemble(lambda, k_plus(lambda, t, p, cfg), t, p, QSign::Plus);
}

LogComplex q_big_minus(cplx lambda, const SpectralPolynomial& t, const ModelParams& p,
                       const TruncationConfig& cfg)
{
    return assemble(lambda, k_minus(lambda, t, p, cfg), t, p, QSign::Minus);
}

LogComplex QPair::plus(cplx lambda) const { return q_big_plus(lambda, t, params, cfg); }
LogComplex QPair::minus(cplx lambda) const { return q_big_minus(lambda, t, params, cfg); }

double baxter_residual(cplx lambda, const QPair& qp, QSign sign)
{
    const double hb = qp.params.hbar;
    const LogComplex q0 = qp(lambda, sign);
    const cplx up = (qp(lambda + I * hb, sign) / q0).to_complex();
    const cplx down = (qp(lambda - I * hb, sign) / q0).to_complex();
    return baxter_relative_residual(qp.t(lambda), baxter_coefficients(qp.params, sign), up, down);
}

LogComplex wronskian(cplx lambda, const QPair& qp)
{
    const cplx l1 = lambda + I * qp.params.hbar;
    const LogComplex a = qp.plus(lambda) * qp.minus(l1);
    if (qp.params.kappa == 0.0) return a;  // stripped gauge: second term carries kappa^hbar
    const LogComplex b = qp.minus(lambda) * qp.plus(l1);
    return a * LogComplex::from_complex(1.0 - (b / a).to_complex());
}

LogComplex wronskian_closed_form(cplx lambda, const QPair& qp)
{
    const ModelParams& p = qp.params;
    const double n = p.n_particles;
    const double hb = p.hbar;
    cplx lg = -n * hb * std::log(p.g) - 2.0 * n * pi * lambda / hb + n * std::log(hb / pi) -
              I * (n * pi / 2.0);
    if (p.kappa > 0.0) lg += -I * lambda * std::log(p.kappa);
    LogComplex w = LogComplex::from_log(lg);
    for (auto tau : qp.t.roots()) w *= log_sinh_scaled(pi * (lambda - tau) / hb);
    return w * LogComplex::from_complex(hill(lambda, qp.t, p, qp.cfg));
}

double wronskian_residual(cplx lambda, const QPair& qp)
{
    const cplx l1 = lambda + I * qp.params.hbar;
    const LogComplex rhs = wronskian_closed_form(lambda, qp);
    const cplx a = (qp.plus(lambda) * qp.minus(l1) / rhs).to_complex();
    if (qp.params.kappa == 0.0) return std::abs(a - 1.0);
    const cplx b = (qp.minus(lambda) * qp.plus(l1) / rhs).to_complex();
    return std::abs(a - b - 1.0);
}

double wronskian_quasi_periodicity_residual(cplx lambda, const QPair& qp)
{
    const ModelParams& p = qp.params;
    if (p.kappa == 0.0) throw DomainError("quasi-periodicity of W needs kappa > 0");
    const cplx ratio = (wronskian(lambda + I * p.hbar, qp) / wronskian(lambda, qp)).to_complex();
    const double kh = std::pow(p.kappa, p.hbar);
    const double sign = p.n_particles % 2 ? -1.0 : 1.0;
    return std::abs(ratio - sign * kh) / kh;
}

namespace {

// 1 - zeta Q^-(l)/Q^+(l)
cplx numerator_ratio(cplx lambda, const QPair& qp, double zeta_phase)
{
    return 1.0 - (LogComplex(0.0, zeta_phase) * qp.minus(lambda) / qp.plus(lambda)).to_complex();
}

}  // namespace

LogComplex q_small(cplx lambda, const QPair& qp, double zeta_phase, const std::vector<cplx>& deltas)
{
    const double hb = qp.params.hbar;
    const double n = qp.params.n_particles;
    LogComplex scale = LogComplex::from_log(n * pi * lambda / hb) * qp.plus(lambda);

    std::size_t near = deltas.size();
    for (std::size_t k = 0; k < deltas.size(); ++k)
        if (std::abs(lambda - deltas[k]) < 1e-4 * hb) near = k;

    LogComplex others;
    for (std::size_t k = 0; k < deltas.size(); ++k)
        if (k != near) others *= log_sinh_scaled(pi * (lambda - deltas[k]) / hb);

    if (near == deltas.size())
        return scale * LogComplex::from_complex(numerator_ratio(lambda, qp, zeta_phase)) / others;

    // first-order expansion of the ratio about the zero of sinh
    const cplx d = deltas[near];
    const double s = 1e-5 * hb;
    const cplx r0 = numerator_ratio(d, qp, zeta_phase);
    const cplx r1 = (numerator_ratio(d + s, qp, zeta_phase) - numerator_ratio(d - s, qp, zeta_phase)) / (2.0 * s);
    const cplx dl = lambda - d;
    cplx local;
    if (dl == 0.0) {
        if (std::abs(r0) > 1e-7) {
            std::ostringstream os;
            os << "q_small: pole at delta_" << near << " = " << d << " (relative residue " << std::abs(r0) << ")";
            throw PoleError(os.str(), std::abs(r0));
        }
        local = r1 * hb / pi;
    } else {
        local = (r0 + r1 * dl) / ((pi / hb) * dl);
    }
    return scale * LogComplex::from_complex(local) / others;
}

double q_small_residue(std::size_t k, const QPair& qp, double zeta_phase,
                       const std::vector<cplx>& deltas)
{
    return std::abs(numerator_ratio(deltas.at(k), qp, zeta_phase));
}

double y_from_determinants(double lambda, const SpectralPolynomial& t,
                           const std::vector<cplx>& deltas, const ModelParams& p,
                           const TruncationConfig& cfg)
{
    const double hb = p.hbar;
    const cplx lo(lambda, -0.5 * hb), hi(lambda, 0.5 * hb);
    const cplx kp = k_plus(hi, t, p, cfg);
    const cplx h = hill(lo, t, p, cfg);
    const double th = std::norm(product_over_roots(deltas, lo));
    const double tt = std::norm(t(lo));
    return std::norm(kp) / h.real() * th / tt;
}

}  // namespace toda
