#include "toda/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "toda/errors.hpp"

namespace toda {

namespace {

constexpr double pi = std::numbers::pi;

// Godfrey's coefficients, g = 607/128; ~1e-15 relative over Re z >= 1/2.
constexpr double lanczos_g_shift = 5.2421875;  // g + 1/2
constexpr std::array<double, 15> lanczos_c = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4, .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,  -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4, .36899182659531622704e-5};

cplx lanczos_log_gamma(cplx x)
{
    cplx ser = lanczos_c[0];
    cplx y = x;
    for (std::size_t j = 1; j < lanczos_c.size(); ++j) {
        y += 1.0;
        ser += lanczos_c[j] / y;
    }
    const cplx t = x + lanczos_g_shift;
    return (x + 0.5) * std::log(t) - t + std::log(2.5066282746310005) + std::log(ser) -
           std::log(x);
}

// B_{2k} / (2k+1)!, k = 1..11
constexpr std::array<double, 11> bernoulli_over_factorial = {
    1.0 / 6.0 / 6.0,
    -1.0 / 30.0 / 120.0,
    1.0 / 42.0 / 5040.0,
    -1.0 / 30.0 / 362880.0,
    5.0 / 66.0 / 39916800.0,
    -691.0 / 2730.0 / 6227020800.0,
    7.0 / 6.0 / 1307674368000.0,
    -3617.0 / 510.0 / 355687428096000.0,
    43867.0 / 798.0 / 121645100408832000.0,
    -174611.0 / 330.0 / 51090942171709440000.0,
    854513.0 / 138.0 / 25852016738884976640000.0};

// Li2 on [-1, 0] via the Bernoulli series in u = -ln(1-x), |u| <= ln 2.
double dilog_near(double x)
{
    const double u = -std::log1p(-x);
    const double u2 = u * u;
    double term = u;
    double sum = u - 0.25 * u2;
    for (double c : bernoulli_over_factorial) {
        term *= u2;
        sum += c * term;
    }
    return sum;
}

// exp(a) - 1 without cancellation for small |a|
cplx expm1_complex(cplx a)
{
    const double s = std::sin(0.5 * a.imag());
    return {std::expm1(a.real()) * std::cos(a.imag()) - 2.0 * s * s,
            std::exp(a.real()) * std::sin(a.imag())};
}

}  // namespace

LogComplex::LogComplex(double lm, double ph) : log_mag(lm), phase(wrap_phase(ph)) {}

double wrap_phase(double phi)
{
    if (phi > -pi && phi <= pi) return phi;
    double r = std::remainder(phi, 2.0 * pi);
    if (r <= -pi) r += 2.0 * pi;
    return r;
}

LogComplex LogComplex::from_complex(cplx z)
{
    if (z == 0.0) throw DomainError("LogComplex: zero has no logarithm");
    return {std::log(std::abs(z)), std::arg(z)};
}

LogComplex LogComplex::from_log(cplx w) { return {w.real(), w.imag()}; }

cplx LogComplex::to_complex() const { return std::polar(std::exp(log_mag), phase); }

LogComplex& LogComplex::operator*=(const LogComplex& o)
{
    log_mag += o.log_mag;
    phase = wrap_phase(phase + o.phase);
    return *this;
}

LogComplex& LogComplex::operator/=(const LogComplex& o)
{
    log_mag -= o.log_mag;
    phase = wrap_phase(phase - o.phase);
    return *this;
}

LogComplex operator*(LogComplex a, const LogComplex& b) { return a *= b; }
LogComplex operator/(LogComplex a, const LogComplex& b) { return a /= b; }

cplx log_gamma(cplx z)
{
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real())) {
        std::ostringstream os;
        os << "log_gamma: pole of Gamma at z = " << z.real();
        throw DomainError(os.str());
    }
    if (z.real() >= 0.5) return lanczos_log_gamma(z);
    // Shift upward with ln Gamma(z) = ln Gamma(z+m) - sum ln(z+j); each ln(z+j) is
    // analytic in the same half-plane as z, so the principal branch is preserved.
    const int m = static_cast<int>(std::ceil(0.5 - z.real()));
    cplx acc = lanczos_log_gamma(z + static_cast<double>(m));
    for (int j = 0; j < m; ++j) acc -= std::log(z + static_cast<double>(j));
    return acc;
}

double dilog(double x)
{
    if (x > 0.0) throw DomainError("dilog: only x <= 0 is supported");
    if (x == 0.0) return 0.0;
    if (x >= -1.0) return dilog_near(x);
    const double l = std::log(-x);
    return -pi * pi / 6.0 - 0.5 * l * l - dilog_near(1.0 / x);
}

cplx varpi(double lambda, double hbar)
{
    if (!(hbar > 0.0)) throw DomainError("varpi: hbar must be positive");
    if (lambda == 0.0) return 0.0;
    const double sgn = lambda > 0 ? 1.0 : -1.0;
    auto f = [&](double s) { return sgn * log_gamma(cplx(1.0, sgn * s / hbar)); };
    using boost::math::quadrature::gauss_kronrod;
    // panels of width <= hbar keep each piece smooth; a hard tolerance would only
    // burn subdivisions at the rounding floor
    const double len = std::abs(lambda);
    const int panels = std::max(1, static_cast<int>(std::ceil(len / hbar)));
    cplx acc = 0.0;
    for (int k = 0; k < panels; ++k)
        acc += gauss_kronrod<double, 31>::integrate(f, len * k / panels, len * (k + 1) / panels, 6, 1e-14);
    return acc;
}

LogComplex log_sinh_scaled(cplx z)
{
    // sinh z = sign * e^{|x|}/2 * (1 - e^{-2 sign z})
    const bool pos = z.real() >= 0.0;
    const cplx w = pos ? z : -z;
    const cplx tail = -expm1_complex(-2.0 * w);
    if (std::abs(tail) < 1e-300) {
        std::ostringstream os;
        os << "log_sinh_scaled: z = " << z << " is at a zero of sinh";
        throw DomainError(os.str());
    }
    cplx lg = w - std::log(2.0) + std::log(tail);
    if (!pos) lg += cplx(0.0, pi);
    return LogComplex::from_log(lg);
}

}  // namespace toda
