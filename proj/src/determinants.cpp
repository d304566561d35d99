#include "toda/determinants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "toda/errors.hpp"

namespace toda {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

int default_depth(cplx lambda, const ModelParams& p, const TruncationConfig& cfg)
{
    if (cfg.depth > 0) return std::max(cfg.depth, 2 * p.n_particles);
    const int floor_lambda = static_cast<int>(std::ceil(2.0 * std::abs(lambda) / p.hbar)) + 10;
    return std::max({4 * p.n_particles, 40, floor_lambda});
}

void check_poles(cplx lambda, const SpectralPolynomial& t, const ModelParams& p, double tol)
{
    for (auto tau : t.roots()) {
        const double k = std::round((tau.imag() - lambda.imag()) / p.hbar);
        if (k < 1) continue;
        if (std::abs(lambda + I * (k * p.hbar) - tau) < tol) {
            std::ostringstream os;
            os << "K_+: lambda = " << lambda << " is at the pole tau - " << k << " i hbar, tau = " << tau;
            throw DomainError(os.str());
        }
    }
}

// Sum_{k > m} c_k with c_k = rho^hbar / (t(l + i(k-1)hbar) t(l + i k hbar)), via the
// midpoint Euler-Maclaurin formula; the integral is mapped to u = a/x in (0, 1].
cplx coupling_tail(cplx lambda, const SpectralPolynomial& t, const ModelParams& p, int m)
{
    const double w = p.rho_weight();
    const double hb = p.hbar;
    auto f = [&](double x) {
        return w / (t(lambda + I * ((x - 1.0) * hb)) * t(lambda + I * (x * hb)));
    };
    const double a = m + 0.5;
    using Rule = boost::math::quadrature::gauss<double, 20>;
    const cplx integral = Rule::integrate(
        [&](double u) {
            if (u <= 0.0) return cplx(0.0);
            return f(a / u) * (a / (u * u));
        },
        0.0, 1.0);
    cplx logder = 0.0;
    for (auto tau : t.roots())
        logder += 1.0 / (lambda + I * ((a - 1.0) * hb) - tau) + 1.0 / (lambda + I * (a * hb) - tau);
    const cplx fprime = f(a) * (-I * hb) * logder;
    return integral - fprime / 24.0;
}

}  // namespace

DeterminantValue k_plus_certified(cplx lambda, const SpectralPolynomial& t, const ModelParams& p,
                                  const TruncationConfig& cfg)
{
    const double w = p.rho_weight();
    if (w == 0.0) return {1.0, 0, 0.0};
    check_poles(lambda, t, p, cfg.tail_tol);

    const double hb = p.hbar;
    int m = default_depth(lambda, p, cfg);
    // leading minors: D_k = D_{k-1} - c_k D_{k-2}
    cplx d_prev2 = 1.0, d_prev = 1.0;
    cplx t_prev = t(lambda + I * hb);
    int k = 1;
    auto advance_to = [&](int target) {
        while (k < target) {
            ++k;
            const cplx t_k = t(lambda + I * (k * hb));
            const cplx c = w / (t_prev * t_k);
            const cplx d = d_prev - c * d_prev2;
            d_prev2 = d_prev;
            d_prev = d;
            t_prev = t_k;
        }
        return d_prev - coupling_tail(lambda, t, p, k) * d_prev2;
    };

    cplx coarse = advance_to(m);
    while (true) {
        const cplx fine = advance_to(2 * m);
        const double diff = std::abs(fine - coarse);
        if (diff <= cfg.tail_tol * std::max(1.0, std::abs(fine))) return {fine, 2 * m, diff};
        if (2 * m > cfg.max_depth) {
            std::ostringstream os;
            os.precision(17);
            os << "K_+ truncation did not settle at lambda = " << lambda << ": value(" << m
               << ") = " << coarse << ", value(" << 2 * m << ") = " << fine;
            throw TruncationError(os.str());
        }
        coarse = fine;
        m *= 2;
    }
}

cplx k_plus(cplx lambda, const SpectralPolynomial& t, const ModelParams& p,
            const TruncationConfig& cfg)
{
    return k_plus_certified(lambda, t, p, cfg).value;
}

cplx k_minus(cplx lambda, const SpectralPolynomial& t, const ModelParams& p,
             const TruncationConfig& cfg)
{
    return std::conj(k_plus(std::conj(lambda), t, p, cfg));
}

cplx hill(cplx lambda, const SpectralPolynomial& t, const ModelParams& p,
          const TruncationConfig& cfg)
{
    const double w = p.rho_weight();
    if (w == 0.0) return 1.0;
    const cplx l1 = lambda + I * p.hbar;
    const cplx t0 = t(lambda), t1 = t(l1);
    if (t0 == 0.0 || t1 == 0.0) throw DomainError("hill: lambda at a zero of t(lambda) t(lambda + i hbar)");
    return k_plus(lambda, t, p, cfg) * k_minus(l1, t, p, cfg) -
           w * k_plus(l1, t, p, cfg) * k_minus(lambda, t, p, cfg) / (t0 * t1);
}

cplx hill_brute(cplx lambda, const SpectralPolynomial& t, const ModelParams& p, int window)
{
    if (window < 2 * p.n_particles) throw ValidationError("hill_brute: window must be >= 2N");
    const double w = p.rho_weight();
    if (w == 0.0) return 1.0;
    cplx d_prev2 = 1.0, d_prev = 1.0;
    cplx t_prev = t(lambda - I * (window * p.hbar));
    for (int k = -window + 1; k <= window; ++k) {
        const cplx t_k = t(lambda + I * (k * p.hbar));
        const cplx d = d_prev - w / (t_prev * t_k) * d_prev2;
        d_prev2 = d_prev;
        d_prev = d;
        t_prev = t_k;
    }
    return d_prev;
}

cplx hill_factorized(cplx lambda, const std::vector<cplx>& tau, const std::vector<cplx>& deltas,
                     double hbar)
{
    LogComplex r;
    for (auto d : deltas) r *= log_sinh_scaled(pi * (lambda - d) / hbar);
    for (auto tk : tau) r /= log_sinh_scaled(pi * (lambda - tk) / hbar);
    return r.to_complex();
}

double k_plus_decay_scale(cplx lambda, const SpectralPolynomial& t, const ModelParams& p)
{
    double u = 0.0;
    for (int k = 1; k <= 200000; ++k) {
        const double term = 1.0 / std::abs(t(lambda + I * (k * p.hbar)));
        u += term;
        if (k > 100 && term * k < 1e-17 * u) break;
    }
    return u;
}

namespace {

// G(lambda) = H(lambda) prod sinh(pi(lambda - tau)/hbar) is entire in the strip.
struct EntireHill {
    const SpectralPolynomial& t;
    const ModelParams& p;
    const TruncationConfig& cfg;

    double phase(cplx lambda) const
    {
        double ph = std::arg(hill(lambda, t, p, cfg));
        for (auto tau : t.roots()) ph += log_sinh_scaled(pi * (lambda - tau) / p.hbar).phase;
        return ph;
    }

    cplx direct(cplx lambda) const
    {
        cplx s = 1.0;
        for (auto tau : t.roots()) s *= std::sinh(pi * (lambda - tau) / p.hbar);
        return hill(lambda, t, p, cfg) * s;
    }

    // Near a root of t the two factors are evaluated on a small circle instead.
    cplx operator()(cplx lambda) const
    {
        bool near = false;
        for (auto tau : t.roots()) near = near || std::abs(lambda - tau) < 1e-6 * p.hbar;
        if (!near) return direct(lambda);
        const int n = 16;
        const double r = 1e-3 * p.hbar;
        cplx acc = 0.0;
        for (int j = 0; j < n; ++j) acc += direct(lambda + std::polar(r, 2.0 * pi * (j + 0.5) / n));
        return acc / static_cast<double>(n);
    }
};

double unwrap_segment(const EntireHill& g, cplx a, cplx b, double pa, double pb, int depth)
{
    const double d = wrap_phase(pb - pa);
    if (std::abs(d) < 0.5 || depth > 14) return d;
    const cplx m = 0.5 * (a + b);
    const double pm = g.phase(m);
    return unwrap_segment(g, a, m, pa, pm, depth + 1) + unwrap_segment(g, m, b, pm, pb, depth + 1);
}

}  // namespace

int hill_zero_count(const SpectralPolynomial& t, const ModelParams& p, const TruncationConfig& cfg,
                    double half_width)
{
    const EntireHill g{t, p, cfg};
    const double eps = 1e-3 * p.hbar;
    const double y0 = -0.5 * p.hbar + eps, y1 = 0.5 * p.hbar - eps;
    const cplx corners[5] = {{-half_width, y0}, {half_width, y0}, {half_width, y1},
                             {-half_width, y1}, {-half_width, y0}};
    const double step = p.hbar / 16.0;
    double total = 0.0;
    for (int s = 0; s < 4; ++s) {
        const cplx a = corners[s], b = corners[s + 1];
        const int n = std::max(4, static_cast<int>(std::ceil(std::abs(b - a) / step)));
        cplx prev = a;
        double pprev = g.phase(a);
        for (int j = 1; j <= n; ++j) {
            const cplx z = a + (b - a) * (static_cast<double>(j) / n);
            const double pz = g.phase(z);
            total += unwrap_segment(g, prev, z, pprev, pz, 0);
            prev = z;
            pprev = pz;
        }
    }
    const double winding = total / (2.0 * pi);
    const double rounded = std::round(winding);
    if (std::abs(winding - rounded) > 1e-3) {
        std::ostringstream os;
        os << "hill_zero_count: winding number " << winding << " is not an integer";
        throw StructuralError(os.str());
    }
    return static_cast<int>(rounded);
}

HillZeros hill_zeros(const SpectralPolynomial& t, const ModelParams& p,
                     const TruncationConfig& cfg)
{
    t.validate(p);
    const int n = p.n_particles;
    const double hb = p.hbar;
    HillZeros out;
    if (p.rho_weight() == 0.0) {
        out.deltas = t.roots();
        out.contour_count = n;
        return out;
    }

    double re_max = 0.0;
    for (auto tau : t.roots()) re_max = std::max(re_max, std::abs(tau.real()));

    // 1. argument-principle count
    int count = hill_zero_count(t, p, cfg, re_max + 5.0 * hb);
    for (double extra = 10.0; count != n && extra <= 40.0; extra *= 2.0)
        count = hill_zero_count(t, p, cfg, re_max + extra * hb);
    out.contour_count = count;
    if (count != n) {
        std::ostringstream os;
        os << "hill_zeros: argument principle finds " << count << " zeros in the strip, expected " << n;
        throw StructuralError(os.str());
    }

    // 2. power sums of the zeros from the real function h(x) = H(x - i hbar/2) > 0
    const auto q = make_line_quadrature(re_max + 10.0 * hb, hb / 32.0, 32);
    std::vector<cplx> acc(n, 0.0);
    for (std::size_t j = 0; j < q.nodes.size(); ++j) {
        const double x = q.nodes[j];
        const cplx hv = hill(cplx(x, -0.5 * hb), t, p, cfg);
        if (!(hv.real() > 0.0) || std::abs(hv.imag()) > 1e-8 * std::abs(hv)) {
            std::ostringstream os;
            os << "hill_zeros: H(x - i hbar/2) = " << hv << " is not positive at x = " << x
               << "; zeros sit on the strip boundary";
            throw StructuralError(os.str());
        }
        const double lh = std::log(hv.real());
        const cplx up(x, 0.5 * hb), dn(x, -0.5 * hb);
        cplx pu = 1.0, pd = 1.0;
        for (int k = 1; k <= n; ++k) {
            acc[k - 1] += q.weights[j] * (pu - pd) * lh;
            pu *= up;
            pd *= dn;
        }
    }
    const auto ptau = power_sums(t.roots(), n);
    std::vector<double> pk(n);
    for (int k = 1; k <= n; ++k)
        pk[k - 1] = (ptau[k - 1] + static_cast<double>(k) / (2.0 * pi * I) * acc[k - 1]).real();
    std::vector<cplx> guess = roots_from_elementary(elementary_from_power_sums(pk));

    // 3. Newton polish on the entire function G
    const EntireHill g{t, p, cfg};
    const double s = 1e-5 * hb;
    for (auto& z : guess) {
        for (int it = 0; it < 60; ++it) {
            const cplx gz = g(z);
            const cplx dg = (g(z + s) - g(z - s)) / (2.0 * s);
            if (dg == 0.0) break;
            cplx step = gz / dg;
            if (std::abs(step) > 0.25 * hb) step *= 0.25 * hb / std::abs(step);
            z -= step;
            if (std::abs(step) < 1e-15 * std::max(hb, std::abs(z))) break;
        }
    }
    // 4. merge near-coincident zeros, restore exact conjugation
    for (std::size_t i = 0; i < guess.size(); ++i)
        for (std::size_t j = i + 1; j < guess.size(); ++j)
            if (std::abs(guess[i] - guess[j]) < 1e-6 * hb) guess[i] = guess[j] = 0.5 * (guess[i] + guess[j]);
    out.deltas = SpectralPolynomial(guess).roots();

    cplx sd = 0.0, st = 0.0;
    double scale = 1.0;
    for (auto d : out.deltas) sd += d;
    for (auto tau : t.roots()) {
        st += tau;
        scale = std::max(scale, std::abs(tau));
    }
    if (std::abs(sd - st) > 1e-8 * scale) {
        std::ostringstream os;
        os.precision(17);
        os << "hill_zeros: sum of zeros " << sd << " differs from sum of roots " << st;
        throw ConsistencyError(os.str());
    }
    for (auto d : out.deltas) {
        bool at_root = false;
        for (auto tau : t.roots()) at_root = at_root || std::abs(d - tau) < 1e-6 * hb;
        double r;
        if (!at_root) {
            r = std::abs(hill(d, t, p, cfg));
        } else {
            // H has a removable pole-zero pair here; use the zero displacement of G
            const cplx dg = (g(d + s) - g(d - s)) / (2.0 * s);
            r = std::abs(g(d) / dg) / hb;
        }
        out.max_residual = std::max(out.max_residual, r);
    }
    if (out.max_residual > std::max(1e3 * cfg.tail_tol, 1e-10)) {
        std::ostringstream os;
        os << "hill_zeros: |H(delta)| = " << out.max_residual << " after refinement";
        throw ConsistencyError(os.str());
    }
    for (auto d : out.deltas) {
        if (!(std::abs(d.imag()) < 0.5 * hb)) throw StructuralError("hill_zeros: zero outside the strip");
    }
    return out;
}

}  // namespace toda
