#include "toda/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>

#include "toda/errors.hpp"

namespace toda {

double ModelParams::rho() const { return kappa * std::pow(g, 2 * n_particles); }

double ModelParams::rho_weight() const
{
    if (kappa == 0.0) return 0.0;
    return std::pow(rho(), hbar);
}

void ModelParams::validate() const
{
    std::ostringstream os;
    if (n_particles < 2) os << "n_particles must be >= 2 (got " << n_particles << "); ";
    if (!(hbar > 0.0) || !std::isfinite(hbar)) os << "hbar must be positive (got " << hbar << "); ";
    if (!(g > 0.0) || !std::isfinite(g)) os << "g must be positive (got " << g << "); ";
    if (!(kappa >= 0.0 && kappa <= 1.0)) os << "kappa must lie in [0, 1] (got " << kappa << "); ";
    if (!os.str().empty()) throw ValidationError(os.str());
}

namespace {

// Pair every root with a conjugate partner and make the pairing exact.
std::vector<cplx> symmetrise(std::vector<cplx> r, double tol)
{
    const std::size_t n = r.size();
    std::vector<bool> used(n, false);
    std::vector<cplx> out;
    out.reserve(n);
    double scale = 1.0;
    for (auto z : r) scale = std::max(scale, std::abs(z));
    for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        used[i] = true;
        if (std::abs(r[i].imag()) <= tol * scale) {
            out.emplace_back(r[i].real(), 0.0);
            continue;
        }
        std::size_t best = n;
        double bd = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (used[j]) continue;
            const double d = std::abs(r[j] - std::conj(r[i]));
            if (best == n || d < bd) {
                best = j;
                bd = d;
            }
        }
        if (best == n || bd > std::sqrt(tol) * scale) {
            std::ostringstream os;
            os << "root set is not self-conjugate: no partner for " << r[i];
            throw ValidationError(os.str());
        }
        used[best] = true;
        const cplx m = 0.5 * (r[i] + std::conj(r[best]));
        out.push_back(m);
        out.push_back(std::conj(m));
    }
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

}  // namespace

SpectralPolynomial::SpectralPolynomial(std::vector<cplx> roots)
    : roots_(symmetrise(std::move(roots), 1e-12))
{
}

SpectralPolynomial SpectralPolynomial::from_elementary(const std::vector<double>& e)
{
    return SpectralPolynomial(roots_from_elementary(e));
}

std::vector<double> SpectralPolynomial::coefficients() const
{
    const auto e = elementary_from_roots(roots_);
    std::vector<double> c(e.size() + 1, 1.0);
    for (std::size_t k = 1; k <= e.size(); ++k) c[k] = (k % 2 ? -1.0 : 1.0) * e[k - 1];
    return c;
}

cplx SpectralPolynomial::operator()(cplx lambda) const { return product_over_roots(roots_, lambda); }

void SpectralPolynomial::validate(const ModelParams& p) const
{
    if (degree() != p.n_particles) {
        std::ostringstream os;
        os << "tau: expected " << p.n_particles << " roots, got " << degree();
        throw ValidationError(os.str());
    }
    for (auto z : roots_) {
        if (!(std::abs(z.imag()) < 0.5 * p.hbar)) {
            std::ostringstream os;
            os << "tau: root " << z << " violates |Im tau| < hbar/2";
            throw ValidationError(os.str());
        }
    }
}

double HillZeros::total_momentum() const
{
    double s = 0.0;
    for (auto d : deltas) s += d.real();
    return s;
}

void HillZeros::validate(const ModelParams& p) const
{
    if (static_cast<int>(deltas.size()) != p.n_particles) {
        std::ostringstream os;
        os << "delta: expected " << p.n_particles << " values, got " << deltas.size();
        throw ValidationError(os.str());
    }
    SpectralPolynomial probe(deltas);  // throws unless self-conjugate
    for (auto z : deltas) {
        if (!(std::abs(z.imag()) < 0.5 * p.hbar)) {
            std::ostringstream os;
            os << "delta: value " << z << " violates |Im delta| < hbar/2";
            throw ValidationError(os.str());
        }
    }
}

cplx product_over_roots(const std::vector<cplx>& roots, cplx lambda)
{
    cplx v = 1.0;
    for (auto r : roots) v *= lambda - r;
    return v;
}

std::vector<cplx> power_sums(const std::vector<cplx>& roots, int k_max)
{
    std::vector<cplx> p(k_max, 0.0);
    for (auto r : roots) {
        cplx z = 1.0;
        for (int k = 0; k < k_max; ++k) {
            z *= r;
            p[k] += z;
        }
    }
    return p;
}

std::vector<double> elementary_from_power_sums(const std::vector<double>& p)
{
    const std::size_t n = p.size();
    std::vector<double> e(n + 1, 0.0);
    e[0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k) {
        double s = 0.0;
        for (std::size_t i = 1; i <= k; ++i) s += ((i % 2) ? 1.0 : -1.0) * e[k - i] * p[i - 1];
        e[k] = s / static_cast<double>(k);
    }
    return {e.begin() + 1, e.end()};
}

std::vector<double> elementary_from_roots(const std::vector<cplx>& roots)
{
    std::vector<cplx> e(roots.size() + 1, 0.0);
    e[0] = 1.0;
    for (std::size_t j = 0; j < roots.size(); ++j)
        for (std::size_t k = j + 1; k >= 1; --k) e[k] += e[k - 1] * roots[j];
    std::vector<double> out(roots.size());
    for (std::size_t k = 1; k <= roots.size(); ++k) out[k - 1] = e[k].real();
    return out;
}

std::vector<cplx> roots_from_elementary(const std::vector<double>& e)
{
    const int n = static_cast<int>(e.size());
    if (n == 0) return {};
    // coefficients of lambda^{n-k}: (-1)^k e_k
    std::vector<double> c(n + 1, 1.0);
    for (int k = 1; k <= n; ++k) c[k] = (k % 2 ? -1.0 : 1.0) * e[k - 1];

    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) comp(0, k) = -c[k + 1];
    for (int k = 1; k < n; ++k) comp(k, k - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    std::vector<cplx> r(n);
    for (int k = 0; k < n; ++k) r[k] = es.eigenvalues()[k];

    auto poly = [&](cplx z, cplx& dp) {
        cplx v = 1.0;
        dp = 0.0;
        for (int k = 1; k <= n; ++k) {
            dp = dp * z + v;
            v = v * z + c[k];
        }
        return v;
    };
    for (auto& z : r) {
        for (int it = 0; it < 8; ++it) {
            cplx dp;
            const cplx v = poly(z, dp);
            if (dp == 0.0) break;
            const cplx step = v / dp;
            z -= step;
            if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(z))) break;
        }
    }
    return symmetrise(r, 1e-10);
}

LineQuadrature make_line_quadrature(double lambda_max, double spacing, int tail_points)
{
    if (!(lambda_max > 0.0) || !(spacing > 0.0)) throw ValidationError("quadrature: bad extent");
    LineQuadrature q;
    const auto intervals = static_cast<std::size_t>(std::ceil(2.0 * lambda_max / spacing - 1e-9));
    const std::size_t n = std::max<std::size_t>(intervals, 8) + 1;
    const double h = 2.0 * lambda_max / static_cast<double>(n - 1);
    q.lambda_max = lambda_max;
    q.spacing = h;
    q.core_count = n;
    q.nodes.resize(n);
    q.weights.assign(n, h);
    for (std::size_t i = 0; i < n; ++i) q.nodes[i] = -lambda_max + h * static_cast<double>(i);
    q.nodes[n - 1] = lambda_max;
    // end corrections of the extended trapezoid rule, O(h^4)
    const double ends[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
    for (int i = 0; i < 3; ++i) {
        q.weights[i] = ends[i] * h;
        q.weights[n - 1 - i] = ends[i] * h;
    }

    std::vector<double> x, w;
    auto push_rule = [&](const auto& abscissa, const auto& wts) {
        for (std::size_t i = 0; i < abscissa.size(); ++i) {
            if (abscissa[i] == 0.0) {
                x.push_back(0.0);
                w.push_back(wts[i]);
                continue;
            }
            x.push_back(abscissa[i]);
            w.push_back(wts[i]);
            x.push_back(-abscissa[i]);
            w.push_back(wts[i]);
        }
    };
    switch (tail_points) {
    case 16: {
        using R = boost::math::quadrature::gauss<double, 16>;
        push_rule(R::abscissa(), R::weights());
        break;
    }
    case 32: {
        using R = boost::math::quadrature::gauss<double, 32>;
        push_rule(R::abscissa(), R::weights());
        break;
    }
    case 64: {
        using R = boost::math::quadrature::gauss<double, 64>;
        push_rule(R::abscissa(), R::weights());
        break;
    }
    default:
        throw ValidationError("quadrature: tail_points must be 16, 32 or 64");
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = 0.5 * (1.0 + x[i]);
        const double wu = 0.5 * w[i];
        const double mu = lambda_max / u;
        const double wm = wu * lambda_max / (u * u);
        q.nodes.push_back(mu);
        q.weights.push_back(wm);
        q.nodes.push_back(-mu);
        q.weights.push_back(wm);
    }
    return q;
}

}  // namespace toda
