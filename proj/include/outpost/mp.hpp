#pragma once

// Extended-precision helpers on top of Boost.Multiprecision's MPFR backend.
// MPFR default precision is process-global, so everything here is serial.

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <complex>
#include <vector>

namespace outpost::mp {

using Real = boost::multiprecision::mpfr_float;

inline unsigned digits_for_bits(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

// Sets the default precision for newly created Real values; restores on exit.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits) : saved_(Real::default_precision()) {
    Real::default_precision(digits_for_bits(bits));
  }
  ~PrecisionScope() { Real::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

struct Complex {
  Real re;
  Real im;

  Complex() : re(0), im(0) {}
  Complex(const Real& r, const Real& i) : re(r), im(i) {}
  explicit Complex(std::complex<double> z) : re(z.real()), im(z.imag()) {}

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  std::complex<double> to_double() const {
    return {static_cast<double>(re), static_cast<double>(im)};
  }
};

inline Complex operator*(const Complex& a, const Complex& b) {
  return {Real(a.re * b.re - a.im * b.im), Real(a.re * b.im + a.im * b.re)};
}
inline Complex operator*(const Complex& a, const Real& s) { return {Real(a.re * s), Real(a.im * s)}; }
inline Complex operator+(const Complex& a, const Complex& b) { return {Real(a.re + b.re), Real(a.im + b.im)}; }
inline Complex operator-(const Complex& a, const Complex& b) { return {Real(a.re - b.re), Real(a.im - b.im)}; }
inline Complex conj(const Complex& a) { return {a.re, Real(-a.im)}; }
inline Real norm(const Complex& a) { return a.re * a.re + a.im * a.im; }

// a += b * conj(c), without temporaries beyond two scratch values.
void fma_conj(Complex& a, const Complex& b, const Complex& c, Real& t1, Real& t2);

// Gauss-Legendre rule on [-1, 1] at the current default precision.
struct GaussRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};
const GaussRule& gauss_legendre(unsigned m);

// Double-precision Gauss-Legendre rule on [-1, 1].
struct GaussRuleD {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRuleD& gauss_legendre_d(unsigned m);

}  // namespace outpost::mp
