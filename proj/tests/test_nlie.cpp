#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "toda/determinants.hpp"
#include "toda/errors.hpp"
#include "toda/gutzwiller.hpp"
#include "toda/nlie.hpp"

using namespace toda;
using std::numbers::pi;

namespace {

const cplx I(0.0, 1.0);

struct Setup {
    ModelParams p;
    SpectralPolynomial t;
    HillZeros z;
    NlieSolution sol;
};

Setup setup(const ModelParams& p, std::vector<cplx> tau)
{
    Setup s{p, SpectralPolynomial(std::move(tau)), {}, {}};
    s.z = hill_zeros(s.t, p, {});
    s.sol = solve_nlie(s.z, p, default_grid(s.z, p), 1e-12);
    return s;
}

double real_integral(const std::function<double(double)>& f, double a, double b)
{
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
}

}  // namespace

TEST_CASE("no coupling: Y = 1, v = 1, Newton sums are plain power sums")
{
    const ModelParams p{3, 1.0, 1.0, 0.0};
    HillZeros z;
    z.deltas = {-1.3, 0.2, 1.7};
    const auto sol = solve_nlie(z, p, default_grid(z, p), 1e-12);
    for (double v : sol.ln_y) CHECK(v == 0.0);
    CHECK(std::abs(v_up(cplx(0.3, 0.1), sol) - 1.0) < 1e-15);
    CHECK(std::abs(v_down(cplx(0.3, -0.8), sol) - 1.0) < 1e-15);
    const auto e = newton_sums(sol, 3);
    const auto ex = power_sums(z.deltas, 3);
    for (int k = 0; k < 3; ++k) CHECK(e[k] == doctest::Approx(ex[k].real()).epsilon(1e-14));
}

TEST_CASE("fixed point equals the determinant construction of Y")
{
    struct Case {
        ModelParams p;
        std::vector<cplx> tau;
        bool contraction;
    };
    const std::vector<Case> cases{
        {{2, 1.0, 1.0, 1.0}, {1.5, -1.5}, true},
        {{2, 1.0, 0.97, 1.0}, {1.0, -1.0}, false},
        {{3, 1.0, 1.0, 1.0}, {-1.5, 0.0, 1.5}, true},
        {{3, 1.0, 1.0, 1.0}, {-1.2, 0.0, 1.2}, false},
    };
    for (const auto& c : cases) {
        const auto s = setup(c.p, c.tau);
        const auto& cert = s.sol.certificate;
        CHECK(cert.contraction_regime == c.contraction);
        if (c.contraction) CHECK(cert.contraction_violations == 0);
        else CHECK(cert.continuation_steps > 0);
        CHECK(cert.grid_halving_delta >= 0.0);
        CHECK(cert.grid_halving_delta <= 1e-11);
        double sup = 0.0;
        for (std::size_t i = 0; i < s.sol.grid.count; ++i) {
            const double y = y_from_determinants(s.sol.grid.nodes[i], s.t, s.z.deltas, c.p, {});
            sup = std::max(sup, std::abs(std::log(y) - s.sol.ln_y[i]));
        }
        CHECK(sup < 1e-7);
    }
}

TEST_CASE("small coupling: ln Y is linear in rho^hbar up to second order")
{
    HillZeros z;
    z.deltas = {1.2, -0.9};
    auto linear = [&](double x, const ModelParams& p) {
        auto f = [&](double mu) {
            const double k = p.hbar / (pi * ((x - mu) * (x - mu) + p.hbar * p.hbar));
            double th = 1.0;
            for (auto d : z.deltas) th *= (mu - d.real()) * (mu - d.real()) + 0.25 * p.hbar * p.hbar;
            return k / th;
        };
        return p.rho_weight() * real_integral(f, -std::numeric_limits<double>::infinity(),
                                              std::numeric_limits<double>::infinity());
    };
    std::vector<double> dev;
    for (double kappa : {2e-3, 1e-3}) {
        const ModelParams p{2, 1.0, 1.0, kappa};
        const auto sol = solve_nlie(z, p, default_grid(z, p), 1e-14);
        double m = 0.0;
        for (double x : {-2.0, -0.5, 0.0, 0.7, 1.3, 3.0}) m = std::max(m, std::abs(ln_y_at(sol, x) - linear(x, p)));
        dev.push_back(m);
    }
    // quadratic remainder: halving rho^hbar divides it by four
    CHECK(dev[0] / dev[1] == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("Cauchy transform against a Hilbert-transform pair by quadrature")
{
    const double a = 2.5;
    auto f = [&](double mu) { return std::log1p(a / (mu * mu + 1.0)); };
    auto f_at = [&](cplx z) { return std::log(1.0 + a / (z * z + 1.0)); };
    const auto q = make_line_quadrature(40.0, 1.0 / 16.0, 64);
    std::vector<cplx> vals;
    for (double x : q.nodes) vals.emplace_back(f(x), 0.0);
    const double inf = std::numeric_limits<double>::infinity();
    for (double x : {-1.3, 0.0, 0.4, 2.2}) {
        // PV int f(mu)/(x - mu) = int_0^inf [f(x - s) - f(x + s)]/s ds
        const double pv = real_integral([&](double s) { return s == 0.0 ? 0.0 : (f(x - s) - f(x + s)) / s; }, 0.0, inf);
        const cplx up = cauchy_transform(q.nodes, q.weights, vals, f_at, cplx(x, 0.0), Side::Upper, 1.0);
        const cplx lo = cauchy_transform(q.nodes, q.weights, vals, f_at, cplx(x, 0.0), Side::Lower, 1.0);
        CHECK(std::abs(up - (pv / (2.0 * pi * I) - 0.5 * f(x))) < 1e-9);
        CHECK(std::abs(lo - (pv / (2.0 * pi * I) + 0.5 * f(x))) < 1e-9);
    }
    // off the axis, straight complex quadrature
    for (cplx z : {cplx(0.3, 0.1), cplx(-1.0, -0.05), cplx(2.0, 0.6)}) {
        const double re = real_integral([&](double mu) { return (f(mu) / (z - mu)).real(); }, -inf, inf);
        const double im = real_integral([&](double mu) { return (f(mu) / (z - mu)).imag(); }, -inf, inf);
        const cplx direct = cplx(re, im) / (2.0 * pi * I);
        CHECK(std::abs(cauchy_transform(q.nodes, q.weights, vals, f_at, z, Side::Upper, 1.0) - direct) < 1e-8);
    }
}

TEST_CASE("v functions agree with the determinant expressions")
{
    const auto s = setup({2, 1.0, 1.0, 1.0}, {1.5, -1.5});
    const double hb = s.p.hbar;
    for (double x : {-2.0, -0.6, 0.3, 1.1, 2.7}) {
        cplx lg = 0.0;
        for (std::size_t k = 0; k < s.z.deltas.size(); ++k)
            lg += log_gamma(1.0 - I * (x - s.z.deltas[k]) / hb) - log_gamma(1.0 - I * (x - s.t.roots()[k]) / hb);
        const cplx expect = k_plus(x, s.t, s.p, {}) * std::exp(lg);
        CHECK(std::abs(v_up(x, s.sol) - expect) < 1e-7 * std::abs(expect));
        CHECK(std::abs(v_down(cplx(x, -hb), s.sol) - std::conj(v_up(cplx(x, 0.0), s.sol))) < 1e-12);
    }
}

TEST_CASE("boundary values: v_up v_down across the line equals 1 + u")
{
    const auto s = setup({3, 1.0, 1.0, 1.0}, {-1.5, 0.0, 1.5});
    for (double x : {-2.2, -0.3, 0.8, 1.9}) {
        const auto [vu, vd] = plemelj_boundary(x, s.sol);
        CHECK(std::abs(vu * vd - std::exp(log_term_at(s.sol, cplx(x, 0.0)))) < 1e-10);
    }
}

TEST_CASE("Y is recovered from v_up and v_down")
{
    const auto s = setup({2, 1.0, 1.0, 1.0}, {1.5, -1.5});
    const double hb = s.p.hbar;
    for (double x : {-2.5, -0.4, 0.0, 1.3, 3.3}) {
        const cplx y = v_up(cplx(x, 0.5 * hb), s.sol) * v_down(cplx(x, -1.5 * hb), s.sol);
        CHECK(std::abs(y - std::exp(ln_y_at(s.sol, x))) < 1e-10);
    }
}

TEST_CASE("Q_delta: Baxter equation, quantum Wronskian and t_delta")
{
    for (auto [p, tau] : {std::pair{ModelParams{2, 1.0, 1.0, 1.0}, std::vector<cplx>{1.5, -1.5}},
                          std::pair{ModelParams{3, 1.0, 1.0, 1.0}, std::vector<cplx>{-1.2, 0.0, 1.2}}}) {
        const auto s = setup(p, tau);
        for (cplx l : {cplx(0.3, 0.1), cplx(-1.1, -0.2), cplx(0.8, 0.25), cplx(2.2, -0.25), cplx(1.57, 0.373)}) {
            CHECK(q_delta_baxter_residual(l, QSign::Plus, s.sol, s.t) < 1e-9);
            CHECK(q_delta_baxter_residual(l, QSign::Minus, s.sol, s.t) < 1e-9);
        }
        for (double x : {-1.3, 0.2, 0.9, 2.5}) {
            CHECK(quantum_wronskian_residual(x, s.sol) < 1e-10);
            const cplx td = t_delta(x, s.sol);
            CHECK(std::abs(td - s.t(x)) < 1e-9 * std::max(1.0, std::abs(s.t(x))));
        }
    }
}

TEST_CASE("Newton sums recover the power sums of tau")
{
    for (auto [p, tau] : {std::pair{ModelParams{2, 1.0, 1.0, 1.0}, std::vector<cplx>{1.5, -1.5}},
                          std::pair{ModelParams{2, 1.0, 1.0, 1.0}, std::vector<cplx>{2.0, -0.7}},
                          std::pair{ModelParams{3, 1.0, 1.0, 1.0}, std::vector<cplx>{-2.0, 0.0, 2.0}},
                          std::pair{ModelParams{3, 1.0, 1.0, 1.0}, std::vector<cplx>{-1.2, 0.0, 1.2}}}) {
        const auto s = setup(p, tau);
        const auto ns = newton_sums_certified(s.sol, p.n_particles);
        const auto ex = power_sums(tau, p.n_particles);
        for (int k = 0; k < p.n_particles; ++k)
            CHECK(ns.values[k] == doctest::Approx(ex[k].real()).epsilon(1e-6).scale(1.0));
        CHECK(ns.tail_error < 1e-9);
        CHECK(ns.max_imag < 1e-9);
    }
}

TEST_CASE("grid guards")
{
    const ModelParams p{2, 1.0, 1.0, 1.0};
    HillZeros z;
    z.deltas = {1.0, -1.0};
    CHECK_THROWS_AS(solve_nlie(z, p, make_grid(5.0, 1.0 / 16.0), 1e-12), ValidationError);
    CHECK_THROWS_AS(solve_nlie(z, p, make_grid(30.0, 0.5), 1e-12), ValidationError);
    const auto sol = solve_nlie(z, p, default_grid(z, p), 1e-12);
    CHECK_THROWS_AS(ln_y_at(sol, cplx(0.0, 1.0)), DomainError);
}
