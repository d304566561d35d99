#include "toda/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "toda/errors.hpp"

namespace toda {

double DiscretizedOperator::potential(double x) const { return a * std::exp(-x) + b * std::exp(x); }

double DiscretizedOperator::diagonal(int i) const
{
    const double h = spacing();
    const double x = center - half_width + (i + 1) * h;
    return 2.0 * hbar * hbar / (h * h) + potential(x);
}

double DiscretizedOperator::off_diagonal() const
{
    const double h = spacing();
    return -hbar * hbar / (h * h);
}

int DiscretizedOperator::count_below(double e) const
{
    const double e2 = off_diagonal() * off_diagonal();
    int count = 0;
    double q = 1.0;
    for (int i = 0; i < points; ++i) {
        q = diagonal(i) - e - (i > 0 ? e2 / q : 0.0);
        if (q == 0.0) q = -1e-300;
        if (q < 0.0) ++count;
    }
    return count;
}

double DiscretizedOperator::eigenvalue(int k, double tol) const
{
    double lo = 0.0, hi = 1.0;
    while (count_below(hi) <= k) {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > tol * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (count_below(mid) > k ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> DiscretizedOperator::eigenvector(double e) const
{
    // inverse iteration with a slightly shifted eigenvalue; Thomas algorithm
    const double shift = e * (1.0 + 1e-10) + 1e-12;
    const double off = off_diagonal();
    std::vector<double> x(points, 1.0), c(points), y(points);
    for (int sweep = 0; sweep < 4; ++sweep) {
        double denom = diagonal(0) - shift;
        c[0] = off / denom;
        y[0] = x[0] / denom;
        for (int i = 1; i < points; ++i) {
            denom = diagonal(i) - shift - off * c[i - 1];
            c[i] = off / denom;
            y[i] = (x[i] - off * y[i - 1]) / denom;
        }
        for (int i = points - 2; i >= 0; --i) y[i] -= c[i] * y[i + 1];
        double norm = 0.0;
        for (double v : y) norm = std::max(norm, std::abs(v));
        for (int i = 0; i < points; ++i) x[i] = y[i] / norm;
    }
    return x;
}

namespace {

DiscretizedOperator make_operator(const ModelParams& p, double half_width, double h)
{
    DiscretizedOperator op;
    op.hbar = p.hbar;
    op.a = std::pow(p.kappa * p.g * p.g, p.hbar);
    op.b = std::pow(p.g, 2.0 * p.hbar);
    op.center = 0.5 * std::log(op.a / op.b);
    // snap the box to the grid so that halving h nests the nodes exactly
    op.points = std::max(3, static_cast<int>(std::lround(2.0 * half_width / h)) - 1);
    op.half_width = 0.5 * (op.points + 1) * h;
    return op;
}

std::vector<double> lowest(const DiscretizedOperator& op, int count)
{
    std::vector<double> e(count);
    for (int k = 0; k < count; ++k) e[k] = op.eigenvalue(k);
    return e;
}

double max_rel_diff(const std::vector<double>& x, const std::vector<double>& y)
{
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]) / std::max(1.0, std::abs(y[i])));
    return m;
}

}  // namespace

OracleSpectrum n2_relative_spectrum(const ModelParams& p, double momentum, int count, double tol)
{
    p.validate();
    if (p.n_particles != 2) throw ValidationError("n2_relative_spectrum: N must be 2");
    if (!(p.kappa > 0.0)) throw ValidationError("n2_relative_spectrum: kappa > 0 required (confinement)");
    if (count < 1 || count > 20) throw ValidationError("n2_relative_spectrum: count must be in 1..20");
    if (!std::isfinite(momentum)) throw ValidationError("n2_relative_spectrum: momentum must be finite");

    OracleSpectrum out;
    const double hb = p.hbar;

    // wall placement: grow L until the wall amplitude of every retained state is negligible
    double L = 8.0;
    double h_coarse = 0.05 * hb;
    for (int attempt = 0;; ++attempt) {
        const auto op = make_operator(p, L, h_coarse);
        L = op.half_width;
        const auto e = lowest(op, count);
        h_coarse = std::min(0.05 * hb, 0.1 * hb / std::sqrt(std::max(1.0, e.back())));
        double amp = 0.0;
        for (double ek : e) {
            const auto v = op.eigenvector(ek);
            amp = std::max({amp, std::abs(v.front()), std::abs(v.back())});
        }
        out.boundary_amplitude = amp;
        if (amp < 1e-10) break;
        if (attempt > 30) throw SolverError("n2_relative_spectrum: box growth did not confine the states");
        L *= 1.25;
    }

    // Romberg in h^2 on the fixed box
    std::vector<std::vector<std::vector<double>>> table;
    double h = h_coarse;
    bool settled = false;
    for (int level = 0; level < 8; ++level, h *= 0.5) {
        const auto op = make_operator(p, L, h);
        std::vector<std::vector<double>> row{lowest(op, count)};
        for (std::size_t j = 1; j <= table.size() && j <= 3; ++j) {
            const double f = std::pow(4.0, static_cast<double>(j));
            std::vector<double> r(count);
            for (int k = 0; k < count; ++k) r[k] = (f * row[j - 1][k] - table.back()[j - 1][k]) / (f - 1.0);
            row.push_back(r);
        }
        out.points = op.points;
        if (!table.empty() && table.back().size() >= 3 && row.size() >= 4) {
            out.refinement_delta = max_rel_diff(row.back(), table.back().back());
            if (out.refinement_delta < 0.1 * tol) {
                out.relative = row.back();
                settled = true;
                table.push_back(row);
                break;
            }
        }
        table.push_back(row);
    }
    if (!settled) {
        std::ostringstream os;
        os << "n2_relative_spectrum: grid refinement did not settle (delta " << out.refinement_delta << ")";
        throw SolverError(os.str());
    }

    // enlarging the box must not move anything
    {
        const double hc = h_coarse;
        const auto e1 = lowest(make_operator(p, L, hc), count);
        const auto e2 = lowest(make_operator(p, 1.5 * L, hc), count);  // same spacing, wider box
        out.width_delta = max_rel_diff(e2, e1);
        if (out.width_delta > tol) throw SolverError("n2_relative_spectrum: box-width dependence above tolerance");
    }

    out.half_width = L;
    for (double e : out.relative) out.energies.push_back(0.25 * momentum * momentum + e);
    return out;
}

FredholmSeries fredholm_series_k_plus(cplx lambda, const SpectralPolynomial& t, const ModelParams& p,
                                      int order, int window, double tol)
{
    p.validate();
    if (order < 0 || order > 4) throw ValidationError("fredholm_series_k_plus: order must be in 0..4");
    if (window < 2) throw ValidationError("fredholm_series_k_plus: window too small");

    const double w = p.rho_weight();
    const cplx I(0.0, 1.0);
    std::vector<cplx> inv_t(window + 2);
    double u = 0.0;
    for (int k = 1; k <= window + 1; ++k) {
        const cplx tk = t(lambda + I * (k * p.hbar));
        if (tk == cplx(0.0)) throw DomainError("fredholm_series_k_plus: pole of the matrix entries");
        inv_t[k] = 1.0 / tk;
        if (k <= window) u += std::abs(inv_t[k]);
    }
    // M_{k,k+1} = 1/t_k, M_{k,k-1} = rho^hbar / t_k (indices 1-based)
    auto entry = [&](int r, int c) -> cplx {
        if (c == r + 1) return inv_t[r];
        if (c == r - 1) return w * inv_t[r];
        return 0.0;
    };

    FredholmSeries out;
    out.window = window;
    out.value = 1.0;
    std::vector<int> idx;
    double fact = 1.0;
    for (int n = 1; n <= order; ++n) {
        fact *= n;
        // sum over ordered tuples = n! * sum over subsets; det vanishes on repeats
        cplx sum = 0.0;
        idx.assign(n, 0);
        for (int i = 0; i < n; ++i) idx[i] = i + 1;
        while (true) {
            Eigen::MatrixXcd m(n, n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) m(r, c) = entry(idx[r], idx[c]);
            sum += m.determinant();
            int pos = n - 1;
            while (pos >= 0 && idx[pos] == window - (n - 1 - pos)) --pos;
            if (pos < 0) break;
            ++idx[pos];
            for (int j = pos + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
        }
        out.terms.push_back(sum);
        out.bounds.push_back(std::pow((1.0 + w) * u, n) / fact);
        out.value += sum;
    }
    // remaining orders: sum_{n > order} x^n / n!
    const double x = (1.0 + w) * u;
    double term = std::pow(x, order + 1);
    double f = fact * (order + 1);
    double tail = 0.0;
    for (int n = order + 1; n < order + 60; ++n) {
        tail += term / f;
        term *= x;
        f *= n + 1;
    }
    out.tail_bound = tail;
    // indices beyond the window: every minor touching them carries a factor 1/|t_k|, k > window
    double u_out = 0.0;
    for (int k = window + 1; k <= 64 * window; ++k) u_out += 1.0 / std::abs(t(lambda + I * (k * p.hbar)));
    out.window_bound = (1.0 + w) * u_out * std::exp(x + (1.0 + w) * u_out);
    out.conclusive = out.tail_bound + out.window_bound < tol;
    return out;
}

}  // namespace toda
