#include "toda/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "toda/errors.hpp"
#include "toda/specfun.hpp"

namespace toda {

namespace {

constexpr double pi = std::numbers::pi;

// coefficient of delta_k in F_k: 2N ln(hbar)/hbar - ln(rho)
double linear_coefficient(const ModelParams& p)
{
    return 2.0 * p.n_particles * std::log(p.hbar) / p.hbar - std::log(p.rho());
}

std::vector<double> real_parts(const HillZeros& z)
{
    std::vector<double> d;
    for (auto v : z.deltas) {
        if (std::abs(v.imag()) > 1e-12) throw ValidationError("quantization: only real zeros are supported");
        d.push_back(v.real());
    }
    return d;
}

HillZeros make_zeros(const std::vector<double>& d)
{
    HillZeros z;
    for (double v : d) z.deltas.emplace_back(v, 0.0);
    return z;
}

double max_abs(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

void QuantizationProblem::validate() const
{
    params.validate();
    if (static_cast<int>(quantum_numbers.size()) != params.n_particles)
        throw ValidationError("quantum_numbers must have N entries");
    if (!(params.rho() > 0.0))
        throw ValidationError("quantization needs rho > 0 (kappa > 0): ln rho enters the conditions");
    if (!std::isfinite(total_momentum)) throw ValidationError("momentum must be finite");
}

double QuantizationCandidate::phase() const { return zeta_phase + 2.0 * pi * winding; }

std::vector<double> quantization_residual_dropped(const QuantizationCandidate& c,
                                                  const QuantizationProblem& q)
{
    q.validate();
    const auto d = real_parts(c.deltas);
    const double hb = q.params.hbar;
    const double lin = linear_coefficient(q.params);
    std::vector<double> f(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
        double s = -2.0 * pi * q.quantum_numbers[k] + lin * d[k] - c.phase();
        for (std::size_t p = 0; p < d.size(); ++p)
            if (p != k) s += 2.0 * log_gamma(cplx(1.0, (d[k] - d[p]) / hb)).imag();
        f[k] = s;
    }
    return f;
}

std::vector<double> quantization_residual(const QuantizationCandidate& c, const QuantizationProblem& q,
                                          const NlieSolution& sol)
{
    auto f = quantization_residual_dropped(c, q);
    const auto d = real_parts(c.deltas);
    const double h2 = 0.25 * q.params.hbar * q.params.hbar;
    for (std::size_t k = 0; k < d.size(); ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < sol.nodes.size(); ++j) {
            const double x = d[k] - sol.nodes[j];
            acc += sol.weights[j] * 2.0 * x / (x * x + h2) * sol.log_term[j];
        }
        f[k] += acc / (2.0 * pi);
    }
    return f;
}

namespace {

class Driver {
public:
    Driver(const QuantizationProblem& q, const QuantizeOptions& opt) : q_(q), opt_(opt) {}

    // F_1..F_N, sum delta - P
    std::vector<double> residual(const std::vector<double>& d, double phase, bool full)
    {
        QuantizationCandidate c;
        c.deltas = make_zeros(d);
        c.zeta_phase = phase;  // unwrapped: winding stays 0 internally
        std::vector<double> f;
        if (full) {
            ensure_grid(d);
            NlieOptions o;
            o.tol = opt_.nlie_tol;
            o.certify = false;
            if (!warm_.empty()) o.warm_start = warm_;
            const NlieSolution sol = solve_nlie(c.deltas, q_.params, grid_, o);
            last_ = sol.ln_y_all;
            f = quantization_residual(c, q_, sol);
        } else {
            f = quantization_residual_dropped(c, q_);
        }
        f.push_back(std::accumulate(d.begin(), d.end(), 0.0) - q_.total_momentum);
        return f;
    }

    void accept() { warm_ = last_; }

    // Damped Newton with a forward-difference Jacobian in delta; d/dphase is exact.
    bool newton(std::vector<double>& d, double& phase, bool full, std::vector<double>* history, int& iters)
    {
        const auto n = static_cast<Eigen::Index>(d.size());
        const double hb = q_.params.hbar;
        auto f = residual(d, phase, full);
        accept();
        for (int it = 0; it < opt_.max_iter; ++it) {
            iters = it;
            const double fn = max_abs(f);
            if (history) history->push_back(fn);
            if (opt_.verbose)
                std::cerr << (full ? "quantize" : "init") << " step " << it << " max|F| " << fn << "\n";
            if (fn <= opt_.tol) return true;
            Eigen::MatrixXd jac(n + 1, n + 1);
            const double h = opt_.fd_step * hb;
            for (Eigen::Index k = 0; k < n; ++k) {
                auto dk = d;
                dk[k] += h;
                const auto fk = residual(dk, phase, full);
                for (Eigen::Index i = 0; i <= n; ++i) jac(i, k) = (fk[i] - f[i]) / h;
            }
            for (Eigen::Index i = 0; i < n; ++i) jac(i, n) = -1.0;
            jac(n, n) = 0.0;
            Eigen::VectorXd rhs(n + 1);
            for (Eigen::Index i = 0; i <= n; ++i) rhs[i] = -f[i];
            Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
            if (!lu.isInvertible()) {
                const Eigen::VectorXd kernel = lu.kernel().col(0);
                std::ostringstream os;
                os << "solve_quantization: singular Jacobian, degenerate direction [" << kernel.transpose() << "]";
                throw SolverError(os.str());
            }
            const Eigen::VectorXd step = lu.solve(rhs);
            double lam = 1.0;
            bool improved = false;
            for (int ls = 0; ls < 12; ++ls, lam *= 0.5) {
                auto dn = d;
                double step_max = 0.0;
                for (Eigen::Index k = 0; k < n; ++k) step_max = std::max(step_max, std::abs(step[k]));
                const double cap = step_max > hb ? hb / step_max : 1.0;
                for (Eigen::Index k = 0; k < n; ++k) dn[k] += lam * cap * step[k];
                const double pn = phase + lam * cap * step[n];
                std::vector<double> fnew;
                try {
                    fnew = residual(dn, pn, full);
                } catch (const Error&) {
                    continue;
                }
                if (max_abs(fnew) < fn || (ls == 11 && std::isfinite(max_abs(fnew)))) {
                    d = dn;
                    phase = pn;
                    f = fnew;
                    accept();
                    improved = true;
                    break;
                }
            }
            if (!improved) return false;
        }
        iters = opt_.max_iter;
        return max_abs(f) <= opt_.tol;
    }

    const Grid& grid() const { return grid_; }

private:
    void ensure_grid(const std::vector<double>& d)
    {
        const double hb = q_.params.hbar;
        const double need = max_abs(d) + 10.0 * hb;
        if (grid_.count > 0 && grid_.lambda_max >= need) return;
        grid_ = make_grid(max_abs(d) + opt_.margin * hb, hb / opt_.nodes_per_hbar);
        warm_.clear();
    }

    const QuantizationProblem& q_;
    const QuantizeOptions& opt_;
    Grid grid_;
    std::vector<double> warm_, last_;
};

}  // namespace

QuantizationCandidate solve_quantization(const QuantizationProblem& q,
                                         const std::optional<QuantizationCandidate>& init,
                                         const QuantizeOptions& opt)
{
    q.validate();
    const int n = q.params.n_particles;
    const double hb = q.params.hbar;
    Driver drv(q, opt);

    std::vector<double> d;
    double phase = 0.0;
    if (init) {
        d = real_parts(init->deltas);
        phase = init->phase();
    } else {
        // decoupled (integral-free) system first
        const double lin = linear_coefficient(q.params);
        const int nsum = std::accumulate(q.quantum_numbers.begin(), q.quantum_numbers.end(), 0);
        const double phase0 = (-2.0 * pi * nsum + lin * q.total_momentum) / n;
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return q.quantum_numbers[a] < q.quantum_numbers[b]; });
        bool ok = false;
        for (double spread : {1.0, 2.0, 0.5, 3.0, 5.0}) {
            std::vector<double> dd(n);
            for (int r = 0; r < n; ++r)
                dd[order[r]] = q.total_momentum / n + (r - 0.5 * (n - 1)) * spread * hb;
            double ph = phase0;
            int iters = 0;
            try {
                ok = drv.newton(dd, ph, false, nullptr, iters);
            } catch (const Error&) {
                ok = false;
            }
            if (ok) {
                d = dd;
                phase = ph;
                break;
            }
        }
        if (!ok) throw SolverError("solve_quantization: the decoupled initial system did not converge");
    }

    QuantizationCandidate c;
    int iters = 0;
    const bool converged = drv.newton(d, phase, true, &c.history, iters);
    c.deltas = make_zeros(d);
    c.zeta_phase = wrap_phase(phase);
    if (c.zeta_phase < -pi + 1e-9) c.zeta_phase = std::min(c.zeta_phase + 2.0 * pi, pi);  // zeta = -1 reported as +pi
    c.winding = static_cast<int>(std::lround((phase - c.zeta_phase) / (2.0 * pi)));
    c.iterations = iters;
    c.converged = converged;
    auto f = drv.residual(d, phase, true);
    f.pop_back();
    c.residuals = f;
    if (!converged) {
        std::ostringstream os;
        os << "solve_quantization: no convergence after " << iters << " steps; best max|F| = "
           << (c.history.empty() ? -1.0 : *std::min_element(c.history.begin(), c.history.end()));
        os << "; best candidate delta = [";
        for (double v : d) os << " " << v;
        os << " ], phase = " << phase;
        throw SolverError(os.str());
    }
    return c;
}

NlieSolution solve_nlie_for(const QuantizationCandidate& c, const QuantizationProblem& q,
                            const QuantizeOptions& opt, bool certify)
{
    NlieOptions o;
    o.tol = opt.nlie_tol;
    o.certify = certify;
    o.verbose = opt.verbose;
    const Grid g = default_grid(c.deltas, q.params, opt.margin, opt.nodes_per_hbar);
    return solve_nlie(c.deltas, q.params, g, o);
}

double yang_potential(const QuantizationCandidate& c, const QuantizationProblem& q, const NlieSolution& sol)
{
    q.validate();
    const auto d = real_parts(c.deltas);
    const double hb = q.params.hbar;
    double sum = 0.0, sq = 0.0, nd = 0.0, pairs = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
        sum += d[k];
        sq += d[k] * d[k];
        nd += q.quantum_numbers[k] * d[k];
        for (std::size_t j = 0; j < d.size(); ++j)
            if (j != k) pairs += varpi(d[k] - d[j], hb).imag();
    }
    const double pert = 0.5 * sq * linear_coefficient(q.params) - c.phase() * sum + pairs - 2.0 * pi * nd;

    double inst = 0.0;
    for (std::size_t j = 0; j < sol.nodes.size(); ++j) {
        const double l = sol.log_term[j];
        inst += sol.weights[j] * (0.5 * sol.ln_y_all[j] * l + dilog(-std::expm1(l)));
    }
    return pert + inst / (2.0 * pi);
}

std::vector<double> yang_gradient(const QuantizationCandidate& c, const QuantizationProblem& q,
                                  const QuantizeOptions& opt, double step)
{
    const auto d = real_parts(c.deltas);
    const double h = step * q.params.hbar;
    const Grid g = default_grid(c.deltas, q.params, opt.margin + 1.0, opt.nodes_per_hbar);
    NlieOptions o;
    o.tol = opt.nlie_tol;
    o.certify = false;
    auto value = [&](const std::vector<double>& x) {
        QuantizationCandidate cc = c;
        cc.deltas = make_zeros(x);
        return yang_potential(cc, q, solve_nlie(cc.deltas, q.params, g, o));
    };
    std::vector<double> grad(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
        auto xp = d, xm = d;
        xp[k] += h;
        xm[k] -= h;
        grad[k] = (value(xp) - value(xm)) / (2.0 * h);
    }
    return grad;
}

SpectrumResult reconstruct_spectrum(const QuantizationCandidate& c, const QuantizationProblem& q,
                                    const NlieSolution& sol)
{
    const int n = q.params.n_particles;
    SpectrumResult r;
    const auto ns = newton_sums_certified(sol, n);
    if (ns.max_imag > 1e-8) throw ConsistencyError("reconstruct_spectrum: complex Newton sums");
    r.newton_sums = ns.values;
    r.elementary_symmetric = elementary_from_power_sums(ns.values);
    r.tau = SpectralPolynomial::from_elementary(r.elementary_symmetric).roots();
    const double e1 = r.elementary_symmetric[0];
    r.energy = 0.5 * e1 * e1 - r.elementary_symmetric[1];
    r.yang_value = yang_potential(c, q, sol);
    return r;
}

}  // namespace toda
