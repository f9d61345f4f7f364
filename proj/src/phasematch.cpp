#include "wgpair/phasematch.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

#include "wgpair/error.hpp"
#include "wgpair/units.hpp"

namespace wgpair {

namespace u = units;

MismatchEvaluator::MismatchEvaluator(const LayerStack& stack, const MaterialLibrary& library,
                                     const PhaseMatchOptions& options)
    : library_(library), options_(options) {
  // Any in-window wavelength will do; the mesh does not depend on it.
  base_ = build_grid(stack, library, 1550.0, options.policy);
}

ModeSolution MismatchEvaluator::fundamental_mode(double lambda_nm) const {
  auto grid = std::make_shared<const CrossSectionGrid>(at_wavelength(base_, library_, lambda_nm));
  return solve_fundamental(grid, Polarization::kTE, options_.solver);
}

ModeSolution MismatchEvaluator::second_harmonic_mode(double lambda_nm) const {
  auto grid = std::make_shared<const CrossSectionGrid>(at_wavelength(base_, library_, lambda_nm));
  return solve_fundamental(grid, Polarization::kTM, options_.solver);
}

MismatchSample MismatchEvaluator::operator()(double lambda_nm) const {
  MismatchSample s;
  s.lambda_nm = lambda_nm;
  s.n_te = fundamental_mode(lambda_nm).n_eff;
  s.n_tm_half = second_harmonic_mode(0.5 * lambda_nm).n_eff;
  s.delta = s.n_tm_half - s.n_te;
  return s;
}

std::vector<MismatchSample> MismatchEvaluator::scan(const std::vector<double>& lambdas_nm) const {
  std::vector<MismatchSample> out(lambdas_nm.size());
  const int threads = std::max(1, options_.threads);
  if (threads == 1) {
    for (std::size_t k = 0; k < lambdas_nm.size(); ++k) out[k] = (*this)(lambdas_nm[k]);
    return out;
  }
  // Strided shards; every solve is independent.
  std::vector<std::future<void>> jobs;
  for (int t = 0; t < threads; ++t) {
    jobs.push_back(std::async(std::launch::async, [&, t] {
      for (std::size_t k = t; k < lambdas_nm.size(); k += threads) out[k] = (*this)(lambdas_nm[k]);
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

PhaseMatchSearch find_root_in_window(const std::function<MismatchSample(double)>& mismatch,
                                     double lo, double hi, const PhaseMatchOptions& options) {
  if (!(hi > lo)) throw ConfigError("phase-matching window must have hi > lo");
  if (!(options.scan_step_nm > 0.0)) throw ConfigError("scan step must be positive");
  PhaseMatchSearch search;
  const int steps = static_cast<int>(std::ceil((hi - lo) / options.scan_step_nm - 1e-9));
  for (int k = 0; k <= steps; ++k) {
    const double lambda = std::min(lo + k * options.scan_step_nm, hi);
    search.scan.push_back(mismatch(lambda));
  }
  for (const auto& s : search.scan) {
    if (std::abs(s.delta) <= options.tolerance) {
      search.match = PhaseMatchResult{s.lambda_nm, s.delta, s.n_te, s.n_tm_half,
                                      s.lambda_nm, s.lambda_nm, 0};
      return search;
    }
  }

  std::size_t bracket = search.scan.size();
  for (std::size_t k = 0; k + 1 < search.scan.size(); ++k) {
    if ((search.scan[k].delta < 0.0) != (search.scan[k + 1].delta < 0.0)) {
      bracket = k;
      break;
    }
  }
  if (bracket == search.scan.size()) return search;

  // Illinois-modified regula falsi: secant speed, bisection robustness.
  MismatchSample a = search.scan[bracket];
  MismatchSample b = search.scan[bracket + 1];
  double fa = a.delta;
  double fb = b.delta;
  int side = 0;
  MismatchSample best = std::abs(fa) < std::abs(fb) ? a : b;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    double x = (a.lambda_nm * fb - b.lambda_nm * fa) / (fb - fa);
    if (!(x > a.lambda_nm && x < b.lambda_nm)) x = 0.5 * (a.lambda_nm + b.lambda_nm);
    const MismatchSample c = mismatch(x);
    if (std::abs(c.delta) < std::abs(best.delta)) best = c;
    if (std::abs(c.delta) <= options.tolerance) break;
    if ((c.delta < 0.0) == (fb < 0.0)) {
      b = c;
      fb = c.delta;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = c.delta;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
    if (b.lambda_nm - a.lambda_nm < 1e-9) break;
  }
  if (std::abs(best.delta) > options.tolerance) {
    throw SolverError("phase-matching refinement did not reach the tolerance", it,
                      std::abs(best.delta));
  }
  search.match = PhaseMatchResult{best.lambda_nm,
                                  best.delta,
                                  best.n_te,
                                  best.n_tm_half,
                                  search.scan[bracket].lambda_nm,
                                  search.scan[bracket + 1].lambda_nm,
                                  it + 1};
  return search;
}

PhaseMatchSearch find_phase_matching(const LayerStack& stack, const MaterialLibrary& library,
                                     double window_lo_nm, double window_hi_nm,
                                     const PhaseMatchOptions& options) {
  const MismatchEvaluator eval(stack, library, options);
  if (!(window_hi_nm > window_lo_nm)) throw ConfigError("phase-matching window must have hi > lo");
  // Coarse scan in parallel, then the serial refinement reuses it.
  const int steps =
      static_cast<int>(std::ceil((window_hi_nm - window_lo_nm) / options.scan_step_nm - 1e-9));
  std::vector<double> grid;
  for (int k = 0; k <= steps; ++k) grid.push_back(std::min(window_lo_nm + k * options.scan_step_nm, window_hi_nm));
  const auto coarse = eval.scan(grid);
  std::size_t next = 0;
  auto mismatch = [&](double lambda) {
    if (next < coarse.size() && coarse[next].lambda_nm == lambda) return coarse[next++];
    return eval(lambda);
  };
  return find_root_in_window(mismatch, window_lo_nm, window_hi_nm, options);
}

double gvd_from_index(const std::function<double(double lambda_nm)>& n_eff, double lambda_nm,
                      double rel_step) {
  const double c0 = u::speed_of_light.value;
  const double omega0 = 2.0 * std::numbers::pi * c0 / (lambda_nm * 1e-9);
  const double h = rel_step * omega0;
  double beta[5];
  for (int k = -2; k <= 2; ++k) {
    const double omega = omega0 + k * h;
    const double lambda = 2.0 * std::numbers::pi * c0 / omega * 1e9;
    beta[k + 2] = n_eff(lambda) * omega / c0;
  }
  return (-beta[4] + 16.0 * beta[3] - 30.0 * beta[2] + 16.0 * beta[1] - beta[0]) / (12.0 * h * h);
}

double gvd_at(const LayerStack& stack, const MaterialLibrary& library, double lambda_nm,
              Polarization polarization, const PhaseMatchOptions& options) {
  const CrossSectionGrid base = build_grid(stack, library, lambda_nm, options.policy);
  auto n_eff = [&](double lambda) {
    auto grid = std::make_shared<const CrossSectionGrid>(at_wavelength(base, library, lambda));
    return solve_fundamental(grid, polarization, options.solver).n_eff;
  };
  return gvd_from_index(n_eff, lambda_nm);
}

double sinc2_half_point() {
  static const double root = [] {
    auto f = [](double x) {
      const double s = std::sin(x) / x;
      return s * s - 0.5;
    };
    double lo = 1.0;
    double hi = 2.0;
    for (int k = 0; k < 200; ++k) {
      const double mid = 0.5 * (lo + hi);
      (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return root;
}

double bandwidth_law(double beta2_s2_per_m) {
  if (beta2_s2_per_m == 0.0 || !std::isfinite(beta2_s2_per_m)) {
    throw DomainError("bandwidth_law: beta2 == 0, bandwidth unbounded at this order");
  }
  const u::GroupVelocityDispersion beta2{std::abs(beta2_s2_per_m)};
  // FWHM * sqrt(L) = (1/pi) sqrt(2 x_half / |beta2|)
  const auto coefficient = (1.0 / std::numbers::pi) * u::sqrt(2.0 * sinc2_half_point() / beta2);
  static_assert(std::is_same_v<std::remove_const_t<decltype(coefficient)>, u::BandwidthCoefficient>);
  const u::BandwidthCoefficient thz_sqrt_mm = u::terahertz * u::SqrtLength{std::sqrt(1e-3)};
  return coefficient.in(thz_sqrt_mm);
}

double bandwidth_at_length(double coefficient_thz_sqrt_mm, double length_mm) {
  if (!(length_mm > 0.0)) throw DomainError("bandwidth_at_length: length must be positive");
  return coefficient_thz_sqrt_mm / std::sqrt(length_mm);
}

}  // namespace wgpair
