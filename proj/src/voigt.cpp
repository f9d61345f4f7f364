#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "wgpair/error.hpp"
#include "wgpair/lossfit.hpp"

namespace wgpair {

namespace {

constexpr int kTerms = 36;

// Weideman (1994) rational series: w(z) = 2 p(Z) / (L - iz)^2 + 1/sqrt(pi) / (L - iz),
// Z = (L + iz) / (L - iz), with p's coefficients from a DFT of the weight.
struct Weideman {
  double l = 0.0;
  std::vector<double> a;  // a[1..N]

  Weideman() {
    const double pi = std::numbers::pi;
    const int m = 2 * kTerms;
    const int m2 = 2 * m;
    l = std::sqrt(kTerms / std::numbers::sqrt2);
    std::vector<double> f(m2, 0.0);
    for (int idx = 1; idx < m2; ++idx) {
      const double t = l * std::tan(0.5 * (idx - m) * pi / m);
      f[idx] = std::exp(-t * t) * (l * l + t * t);
    }
    a.assign(kTerms + 1, 0.0);
    for (int n = 1; n <= kTerms; ++n) {
      double re = 0.0;
      for (int j = 0; j < m2; ++j) re += f[(j + m) % m2] * std::cos(2.0 * pi * j * n / m2);
      a[n] = re / m2;
    }
  }
};

const Weideman& weideman() {
  static const Weideman w;
  return w;
}

}  // namespace

std::array<double, 2> faddeeva(double x, double y) {
  const std::complex<double> z(x, y);
  const std::complex<double> i(0.0, 1.0);
  if (x * x + y * y >= 225.0) {
    // Laplace continued fraction; converged to round-off for |z| >= 15.
    std::complex<double> t = z;
    for (int k = 20; k >= 1; --k) t = z - (0.5 * k) / t;
    const std::complex<double> r = i / (std::sqrt(std::numbers::pi) * t);
    return {r.real(), r.imag()};
  }
  const auto& w = weideman();
  const std::complex<double> den = w.l - i * z;
  const std::complex<double> big_z = (w.l + i * z) / den;
  std::complex<double> p = w.a[kTerms];
  for (int n = kTerms - 1; n >= 1; --n) p = p * big_z + w.a[n];
  const std::complex<double> r = 2.0 * p / (den * den) + (1.0 / std::sqrt(std::numbers::pi)) / den;
  return {r.real(), r.imag()};
}

double voigt(double lambda_nm, const VoigtParams& p) {
  if (p.sigma_nm < 0.0 || p.gamma_nm < 0.0) throw DomainError("voigt: widths must be non-negative");
  if (p.sigma_nm == 0.0 && p.gamma_nm == 0.0) throw DomainError("voigt: both widths are zero");
  const double x = lambda_nm - p.center_nm;
  if (p.gamma_nm == 0.0) return p.amplitude * std::exp(-0.5 * x * x / (p.sigma_nm * p.sigma_nm));
  if (p.sigma_nm == 0.0) return p.amplitude * p.gamma_nm * p.gamma_nm / (x * x + p.gamma_nm * p.gamma_nm);
  const double s = p.sigma_nm * std::numbers::sqrt2;
  const double y = p.gamma_nm / s;
  return p.amplitude * faddeeva(x / s, y)[0] / faddeeva(0.0, y)[0];
}

}  // namespace wgpair
