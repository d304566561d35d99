#pragma once

#include <complex>

namespace toda {

using cplx = std::complex<double>;

// Nonzero complex number stored as exp(log_mag + i*phase), phase in (-pi, pi].
struct LogComplex {
    double log_mag = 0.0;
    double phase = 0.0;

    LogComplex() = default;
    LogComplex(double lm, double ph);

    static LogComplex from_complex(cplx z);
    // exp(w) for an arbitrary complex exponent w
    static LogComplex from_log(cplx w);

    cplx to_complex() const;
    cplx log() const { return {log_mag, phase}; }
    LogComplex conj() const { return {log_mag, -phase}; }
    LogComplex inverse() const { return {-log_mag, -phase}; }

    LogComplex& operator*=(const LogComplex& o);
    LogComplex& operator/=(const LogComplex& o);
};

LogComplex operator*(LogComplex a, const LogComplex& b);
LogComplex operator/(LogComplex a, const LogComplex& b);

// Canonical representative of an angle in (-pi, pi].
double wrap_phase(double phi);

// Principal branch of ln Gamma(z), analytic in C minus (-inf, 0].
cplx log_gamma(cplx z);

// Standard dilogarithm Li2(x) = -int_0^x ln(1-t)/t dt, restricted to x <= 0.
double dilog(double x);

// varpi(lambda) = int_0^lambda ln Gamma(1 + i s/hbar) ds.
cplx varpi(double lambda, double hbar);

// sinh(z) without overflow for large |Re z|.
LogComplex log_sinh_scaled(cplx z);

}  // namespace toda
