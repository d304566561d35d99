#include "toda/nlie.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "toda/errors.hpp"

namespace toda {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

double kernel(double x, double hb) { return hb / (pi * (x * x + hb * hb)); }
cplx kernel(cplx z, double hb) { return hb / (pi * (z * z + hb * hb)); }

// theta(mu - i hbar/2) theta(mu + i hbar/2) = |theta(mu - i hbar/2)|^2 on the real line
cplx theta_pair(const std::vector<cplx>& d, cplx z, double hb)
{
    return product_over_roots(d, z - 0.5 * I * hb) * product_over_roots(d, z + 0.5 * I * hb);
}

}  // namespace

Grid make_grid(double lambda_max, double spacing)
{
    const auto q = make_line_quadrature(lambda_max, spacing, 16);
    Grid g;
    g.nodes.assign(q.nodes.begin(), q.nodes.begin() + static_cast<long>(q.core_count));
    g.weights.assign(q.weights.begin(), q.weights.begin() + static_cast<long>(q.core_count));
    g.lambda_max = q.lambda_max;
    g.count = q.core_count;
    g.spacing = q.spacing;
    return g;
}

Grid default_grid(const HillZeros& deltas, const ModelParams& p, double margin, double nodes_per_hbar)
{
    double re_max = 0.0;
    for (auto d : deltas.deltas) re_max = std::max(re_max, std::abs(d.real()));
    return make_grid(re_max + margin * p.hbar, p.hbar / nodes_per_hbar);
}

double theta_infimum(const HillZeros& deltas, const ModelParams& p)
{
    const double hb = p.hbar;
    auto f = [&](double x) { return theta_pair(deltas.deltas, x, hb).real(); };
    double lo = 0.0, hi = 0.0;
    for (auto d : deltas.deltas) {
        lo = std::min(lo, d.real());
        hi = std::max(hi, d.real());
    }
    lo -= 2.0 * hb;
    hi += 2.0 * hb;
    const int n = 4000;
    double best = f(lo), xb = lo;
    for (int i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double v = f(x);
        if (v < best) {
            best = v;
            xb = x;
        }
    }
    // golden-section polish
    double a = xb - (hi - lo) / n, b = xb + (hi - lo) / n;
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80; ++it) {
        const double c = b - r * (b - a), d = a + r * (b - a);
        if (f(c) < f(d)) b = d;
        else a = c;
    }
    return std::min(best, f(0.5 * (a + b)));
}

namespace {

struct FixedPoint {
    Eigen::MatrixXd kmat;  // kmat(i, j) = w_j K(x_i - x_j)
    Eigen::VectorXd theta;

    Eigen::VectorXd log_term(const Eigen::VectorXd& f, double w) const
    {
        Eigen::VectorXd l(f.size());
        for (Eigen::Index j = 0; j < f.size(); ++j) l[j] = std::log1p(w * std::exp(f[j]) / theta[j]);
        return l;
    }
    Eigen::VectorXd apply(const Eigen::VectorXd& f, double w) const { return kmat * log_term(f, w); }
};

struct IterationResult {
    Eigen::VectorXd f;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

IterationResult iterate(const FixedPoint& fp, double w, Eigen::VectorXd f, const NlieOptions& opt,
                        double j_inf, bool certify_contraction, NlieCertificate& cert)
{
    IterationResult r;
    double d_prev = -1.0;
    Eigen::VectorXd f_prev = f;
    // Anderson history (depth 2)
    std::vector<Eigen::VectorXd> xs, gs;
    int slow = 0;
    for (int it = 0; it < opt.max_iter; ++it) {
        const Eigen::VectorXd g = fp.apply(f, w);
        const double d = (g - f).lpNorm<Eigen::Infinity>();
        r.iterations = it + 1;
        if (opt.verbose && (it % 50 == 0 || d < opt.tol))
            std::cerr << "  nlie iter " << it << " weight " << w << " update " << d << "\n";
        if (d_prev > 0.0) {
            const double ratio = d / d_prev;
            cert.max_observed_ratio = std::max(cert.max_observed_ratio, ratio);
            if (certify_contraction) {
                const double m = std::max(f.maxCoeff(), f_prev.maxCoeff());
                const double q = w * std::exp(m) / (j_inf + w * std::exp(m));
                cert.max_contraction_bound = std::max(cert.max_contraction_bound, q);
                if (d > q * d_prev * (1.0 + 1e-9) + 1e-15 * (1.0 + f.cwiseAbs().maxCoeff()))
                    ++cert.contraction_violations;
            }
            slow = ratio > 0.9 ? slow + 1 : 0;
        }
        if (d < opt.tol) {
            r.f = g;
            r.residual = (fp.apply(g, w) - g).lpNorm<Eigen::Infinity>();
            r.converged = true;
            return r;
        }
        if (!std::isfinite(d)) break;
        f_prev = f;
        d_prev = d;
        if (!certify_contraction && slow >= 3) {
            // Anderson mixing, depth 2
            cert.anderson_used = true;
            xs.push_back(f);
            gs.push_back(g);
            if (xs.size() > 3) {
                xs.erase(xs.begin());
                gs.erase(gs.begin());
            }
            const auto m = static_cast<Eigen::Index>(xs.size()) - 1;
            if (m >= 1) {
                Eigen::MatrixXd df(f.size(), m), dg(f.size(), m);
                for (Eigen::Index k = 0; k < m; ++k) {
                    df.col(k) = (gs[k + 1] - xs[k + 1]) - (gs[k] - xs[k]);
                    dg.col(k) = gs[k + 1] - gs[k];
                }
                const Eigen::VectorXd gamma = df.colPivHouseholderQr().solve(g - f);
                f = g - dg * gamma;
                continue;
            }
        } else {
            xs.clear();
            gs.clear();
        }
        f = g;
    }
    r.f = f;
    return r;
}

NlieSolution solve_once(const HillZeros& deltas, const ModelParams& p, const Grid& grid,
                        const NlieOptions& opt)
{
    const double hb = p.hbar;
    const auto q = make_line_quadrature(grid.lambda_max, grid.spacing, opt.tail_points);
    if (q.core_count != grid.count) throw ValidationError("solve_nlie: grid is not a uniform symmetric grid");
    const auto n = static_cast<Eigen::Index>(q.nodes.size());

    FixedPoint fp;
    fp.kmat.resize(n, n);
    fp.theta.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        fp.theta[i] = theta_pair(deltas.deltas, q.nodes[i], hb).real();
        for (Eigen::Index j = 0; j < n; ++j) fp.kmat(i, j) = q.weights[j] * kernel(q.nodes[i] - q.nodes[j], hb);
    }
    const double weight = p.rho_weight();

    NlieSolution sol;
    sol.grid = grid;
    sol.deltas = deltas;
    sol.params = p;
    sol.nodes = q.nodes;
    sol.weights = q.weights;
    auto& cert = sol.certificate;
    const double j_inf = theta_infimum(deltas, p);
    cert.rho_over_j = weight / j_inf;
    cert.contraction_regime = cert.rho_over_j < 1.0;

    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    if (!opt.warm_start.empty()) {
        if (static_cast<Eigen::Index>(opt.warm_start.size()) != n)
            throw ValidationError("solve_nlie: warm start has the wrong size");
        f = Eigen::Map<const Eigen::VectorXd>(opt.warm_start.data(), n);
    }

    IterationResult res;
    if (weight == 0.0) {
        res.f = Eigen::VectorXd::Zero(n);
        res.converged = true;
    } else if (cert.contraction_regime || !opt.warm_start.empty()) {
        res = iterate(fp, weight, f, opt, j_inf, cert.contraction_regime, cert);
        cert.iterations = res.iterations;
        if (!res.converged) {
            std::ostringstream os;
            os << "solve_nlie: no convergence in " << opt.max_iter << " iterations";
            throw SolverError(os.str());
        }
    } else {
        // continuation in the weight rho^hbar along w_j = w (j/m)^2
        double last_good = 0.0;
        bool done = false;
        for (int m = 8; m <= 256 && !done; m *= 2) {
            Eigen::VectorXd fc = Eigen::VectorXd::Zero(n);
            int total = 0;
            bool ok = true;
            for (int j = 1; j <= m; ++j) {
                const double wj = weight * (static_cast<double>(j) / m) * (static_cast<double>(j) / m);
                NlieOptions step = opt;
                step.tol = j == m ? opt.tol : std::max(opt.tol, 1e-9);
                const auto r = iterate(fp, wj, fc, step, j_inf, false, cert);
                total += r.iterations;
                if (!r.converged) {
                    ok = false;
                    break;
                }
                fc = r.f;
                last_good = std::max(last_good, wj);
                if (j == m) res = r;
            }
            cert.iterations += total;
            if (ok) {
                cert.continuation_steps = m;
                done = true;
            }
        }
        if (!done) {
            std::ostringstream os;
            os << "solve_nlie: continuation broke down; last converged rho^hbar = " << last_good;
            throw SolverError(os.str());
        }
    }

    sol.residual = res.residual;
    sol.ln_y_all.assign(res.f.data(), res.f.data() + n);
    const Eigen::VectorXd l = fp.log_term(res.f, weight);
    sol.log_term.assign(l.data(), l.data() + n);
    sol.ln_y.assign(sol.ln_y_all.begin(), sol.ln_y_all.begin() + static_cast<long>(grid.count));
    cert.outer_ln_y = std::max(std::abs(sol.ln_y.front()), std::abs(sol.ln_y.back()));
    return sol;
}

}  // namespace

NlieSolution solve_nlie(const HillZeros& deltas, const ModelParams& p, const Grid& grid, double tol)
{
    NlieOptions opt;
    opt.tol = tol;
    return solve_nlie(deltas, p, grid, opt);
}

NlieSolution solve_nlie(const HillZeros& deltas, const ModelParams& p, const Grid& grid,
                        const NlieOptions& opt)
{
    p.validate();
    deltas.validate(p);
    if (!(opt.tol > 0.0)) throw ValidationError("solve_nlie: tol must be positive");
    double re_max = 0.0;
    for (auto d : deltas.deltas) re_max = std::max(re_max, std::abs(d.real()));
    if (grid.lambda_max < re_max + 10.0 * p.hbar - 1e-12)
        throw ValidationError("solve_nlie: grid must extend 10 hbar beyond the zeros");
    if (grid.spacing > p.hbar / 8.0 + 1e-15) throw ValidationError("solve_nlie: grid spacing must be <= hbar/8");

    NlieSolution sol = solve_once(deltas, p, grid, opt);
    if (opt.certify && p.rho_weight() > 0.0) {
        NlieOptions fine = opt;
        fine.certify = false;
        fine.warm_start.clear();
        fine.verbose = false;
        const Grid g2 = make_grid(grid.lambda_max, grid.spacing / 2.0);
        const NlieSolution s2 = solve_once(deltas, p, g2, fine);
        double delta = 0.0;
        for (std::size_t i = 0; i < grid.count; ++i)
            delta = std::max(delta, std::abs(sol.ln_y[i] - s2.ln_y[2 * i]));
        sol.certificate.grid_halving_delta = delta;
        if (delta > 10.0 * opt.tol) {
            std::ostringstream os;
            os << "solve_nlie: halving the grid spacing moves ln Y by " << delta << " > 10 tol";
            throw DiscretizationError(os.str());
        }
    }
    return sol;
}

double ln_y_at(const NlieSolution& sol, double x)
{
    const double hb = sol.params.hbar;
    double acc = 0.0;
    for (std::size_t j = 0; j < sol.nodes.size(); ++j)
        acc += sol.weights[j] * kernel(x - sol.nodes[j], hb) * sol.log_term[j];
    return acc;
}

cplx ln_y_at(const NlieSolution& sol, cplx z)
{
    const double hb = sol.params.hbar;
    if (!(std::abs(z.imag()) < hb)) throw DomainError("ln_y_at: needs |Im z| < hbar");
    if (z.imag() == 0.0) return ln_y_at(sol, z.real());
    if (std::abs(z.imag()) > 0.5 * hb && sol.params.rho_weight() != 0.0) {
        // near a kernel pole: split K into its two Cauchy kernels, the close one is
        // evaluated with singularity subtraction
        const cplx ih = I * hb;
        return cauchy_transform(sol, z - ih, Side::Lower) - cauchy_transform(sol, z + ih, Side::Upper);
    }
    cplx acc = 0.0;
    for (std::size_t j = 0; j < sol.nodes.size(); ++j)
        acc += sol.weights[j] * kernel(z - sol.nodes[j], hb) * sol.log_term[j];
    return acc;
}

cplx log_term_at(const NlieSolution& sol, cplx z)
{
    const double w = sol.params.rho_weight();
    if (w == 0.0) return 0.0;
    const cplx u = w * std::exp(ln_y_at(sol, z)) / theta_pair(sol.deltas.deltas, z, sol.params.hbar);
    if (z.imag() == 0.0) return std::log1p(u.real());
    return std::log(1.0 + u);
}

cplx cauchy_transform(const std::vector<double>& nodes, const std::vector<double>& weights,
                      const std::vector<cplx>& values, const std::function<cplx(cplx)>& f_at,
                      cplx z, Side side, double width)
{
    const double y = z.imag();
    cplx acc = 0.0;
    if (std::abs(y) >= 0.25 * width) {
        for (std::size_t j = 0; j < nodes.size(); ++j) acc += weights[j] * values[j] / (z - nodes[j]);
        return acc / (2.0 * pi * I);
    }
    // subtract f(z) phi(mu), phi(mu) = (a^2 - y^2)/((mu - c)^2 + a^2) with phi(z) = 1
    const double a = width, c = z.real();
    const bool upper = y > 0.0 || (y == 0.0 && side == Side::Upper);
    const cplx fz = f_at(z);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double mu = nodes[j];
        const cplx dz = z - mu;
        if (std::abs(dz) < 1e-7 * width) {
            const double s = 1e-4 * width;
            const cplx fprime = (f_at(cplx(mu + s, 0.0)) - f_at(cplx(mu - s, 0.0))) / (2.0 * s);
            acc -= weights[j] * fprime;
            continue;
        }
        const double phi = (a * a - y * y) / ((mu - c) * (mu - c) + a * a);
        acc += weights[j] * (values[j] - fz * phi) / dz;
    }
    const cplx phi_integral = upper ? -pi * I * (a - y) / a : pi * I * (a + y) / a;
    return (acc + fz * phi_integral) / (2.0 * pi * I);
}

cplx cauchy_transform(const NlieSolution& sol, cplx z, Side side)
{
    if (sol.params.rho_weight() == 0.0) return 0.0;
    std::vector<cplx> values(sol.log_term.begin(), sol.log_term.end());
    return cauchy_transform(sol.nodes, sol.weights, values,
                            [&](cplx w) { return log_term_at(sol, w); }, z, side, sol.params.hbar);
}

namespace {

// ln(1 + u(z)) with the principal branch; only ever exponentiated
cplx jump_log(const NlieSolution& sol, cplx z)
{
    const double hb = sol.params.hbar;
    if (!(std::abs(z.imag()) < hb)) throw DomainError("analytic continuation of v needs |Im z| < hbar");
    return log_term_at(sol, z);
}

}  // namespace

cplx log_v_up(cplx lambda, const NlieSolution& sol, bool allow_continuation)
{
    const cplx z = lambda + 0.5 * I * sol.params.hbar;
    if (sol.params.rho_weight() == 0.0) return 0.0;
    if (z.imag() >= 0.0) return -cauchy_transform(sol, z, Side::Upper);
    if (!allow_continuation) throw DomainError("v_up: Im lambda must exceed -hbar/2");
    return -cauchy_transform(sol, z, Side::Lower) + jump_log(sol, z);
}

cplx log_v_down(cplx nu, const NlieSolution& sol, bool allow_continuation)
{
    const cplx z = nu + 0.5 * I * sol.params.hbar;
    if (sol.params.rho_weight() == 0.0) return 0.0;
    if (z.imag() <= 0.0) return cauchy_transform(sol, z, Side::Lower);
    if (!allow_continuation) throw DomainError("v_down: Im nu must stay below -hbar/2");
    return cauchy_transform(sol, z, Side::Upper) + jump_log(sol, z);
}

cplx v_up(cplx lambda, const NlieSolution& sol)
{
    if (!(lambda.imag() > -0.5 * sol.params.hbar + 1e-6)) {
        std::ostringstream os;
        os << "v_up: lambda = " << lambda << " outside Im lambda > -hbar/2";
        throw DomainError(os.str());
    }
    return std::exp(log_v_up(lambda, sol));
}

cplx v_down(cplx nu, const NlieSolution& sol)
{
    if (!(nu.imag() < -0.5 * sol.params.hbar - 1e-6)) {
        std::ostringstream os;
        os << "v_down: nu = " << nu << " outside Im nu < -hbar/2";
        throw DomainError(os.str());
    }
    return std::exp(log_v_down(nu, sol));
}

std::pair<cplx, cplx> plemelj_boundary(double x, const NlieSolution& sol)
{
    const cplx nu(x, -0.5 * sol.params.hbar);
    return {std::exp(log_v_up(nu, sol)), std::exp(log_v_down(nu, sol))};
}

LogComplex q_delta(cplx lambda, QSign sign, const NlieSolution& sol)
{
    const ModelParams& p = sol.params;
    const cplx v = sign == QSign::Plus ? log_v_up(lambda, sol, true)
                                       : log_v_down(lambda - I * p.hbar, sol, true);
    return LogComplex::from_log(q_prefactor_log(lambda, p, sign) + v -
                                gamma_product_log(lambda, sol.deltas.deltas, p.hbar, sign));
}

double q_delta_baxter_residual(cplx lambda, QSign sign, const NlieSolution& sol,
                               const SpectralPolynomial& t)
{
    const double hb = sol.params.hbar;
    const LogComplex q0 = q_delta(lambda, sign, sol);
    const cplx up = (q_delta(lambda + I * hb, sign, sol) / q0).to_complex();
    const cplx down = (q_delta(lambda - I * hb, sign, sol) / q0).to_complex();
    return baxter_relative_residual(t(lambda), baxter_coefficients(sol.params, sign), up, down);
}

double quantum_wronskian_residual(double x, const NlieSolution& sol)
{
    const ModelParams& p = sol.params;
    const double hb = p.hbar;
    const double n = p.n_particles;
    const cplx lambda(x, -0.5 * hb), l1 = lambda + I * hb;
    cplx lg = n * (std::log(hb / pi) - hb * std::log(p.g) - 2.0 * pi * lambda / hb) - I * (n * pi / 2.0);
    if (p.kappa > 0.0) lg += -I * lambda * std::log(p.kappa);
    LogComplex rhs = LogComplex::from_log(lg);
    for (auto d : sol.deltas.deltas) rhs *= log_sinh_scaled(pi * (lambda - d) / hb);
    const cplx a = (q_delta(lambda, QSign::Plus, sol) * q_delta(l1, QSign::Minus, sol) / rhs).to_complex();
    if (p.kappa == 0.0) return std::abs(a - 1.0);
    const cplx b = (q_delta(lambda, QSign::Minus, sol) * q_delta(l1, QSign::Plus, sol) / rhs).to_complex();
    return std::abs(a - b - 1.0);
}

cplx t_delta(cplx lambda, const NlieSolution& sol)
{
    const ModelParams& p = sol.params;
    const double hb = p.hbar;
    const auto& d = sol.deltas.deltas;
    for (auto dk : d)
        if (std::abs(lambda - dk) <= 1e-4 * hb) throw DomainError("t_delta: lambda too close to a zero delta");
    const cplx th0 = product_over_roots(d, lambda);
    const cplx thp = product_over_roots(d, lambda + I * hb);
    const cplx thm = product_over_roots(d, lambda - I * hb);
    const double w = p.rho_weight();
    const cplx a = std::exp(log_v_up(lambda - I * hb, sol, true) + log_v_down(lambda, sol, true)) * th0;
    const cplx b = std::exp(log_v_up(lambda + I * hb, sol, true) + log_v_down(lambda - 2.0 * I * hb, sol, true)) /
                   (th0 * thp * thm);
    return a - w * w * b;
}

NewtonSums newton_sums_certified(const NlieSolution& sol, int k_max)
{
    const ModelParams& p = sol.params;
    if (k_max < 1 || k_max > p.n_particles) throw ValidationError("newton_sums: need 1 <= k_max <= N");
    const double hb = p.hbar;
    const auto& d = sol.deltas.deltas;
    auto bracket = [&](double mu, int k) {
        return std::pow(cplx(mu, 0.5 * hb), k - 1) - std::pow(cplx(mu, -0.5 * hb), k - 1);
    };
    NewtonSums out;
    const auto pd = power_sums(d, k_max);
    const std::size_t core = sol.grid.count;
    // second tail rule for the error estimate
    using Rule = boost::math::quadrature::gauss<double, 16>;
    const double lam = sol.grid.lambda_max;
    for (int k = 1; k <= k_max; ++k) {
        cplx core_sum = 0.0, tail = 0.0, tail_alt = 0.0;
        for (std::size_t j = 0; j < sol.nodes.size(); ++j) {
            const cplx term = sol.weights[j] * bracket(sol.nodes[j], k) * sol.log_term[j];
            (j < core ? core_sum : tail) += term;
        }
        if (k > 1 && p.rho_weight() > 0.0) {
            for (double s : {1.0, -1.0}) {
                tail_alt += Rule::integrate(
                    [&](double u) {
                        const double mu = s * lam / u;
                        return (bracket(mu, k) * log_term_at(sol, cplx(mu, 0.0))) * (lam / (u * u));
                    },
                    0.0, 1.0);
            }
        }
        const double factor = static_cast<double>(k) / (2.0 * pi);
        const cplx e = pd[k - 1] + factor / I * (core_sum + tail);
        out.values.push_back(e.real());
        out.max_imag = std::max(out.max_imag, std::abs(e.imag()));
        if (k > 1) out.tail_error = std::max(out.tail_error, factor * std::abs(tail - tail_alt));
    }
    if (out.tail_error > 1e-9) {
        std::ostringstream os;
        os << "newton_sums: tail estimate " << out.tail_error << " too large; widen the grid";
        throw DiscretizationError(os.str());
    }
    return out;
}

std::vector<double> newton_sums(const NlieSolution& sol, int k_max)
{
    return newton_sums_certified(sol, k_max).values;
}

}  // namespace toda
