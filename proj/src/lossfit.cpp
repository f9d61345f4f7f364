#include "wgpair/lossfit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "wgpair/error.hpp"

namespace wgpair {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  return out;
}

double parse_number(const std::string& s, std::string_view source, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string(source) + ":" + std::to_string(line) + ": not a number: '" + s + "'");
  }
}

constexpr double kSameLambda = 1e-6;

}  // namespace

CutbackDataset parse_cutback_csv(std::string_view text, std::string_view source) {
  CutbackDataset data;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  int col_lambda = -1;
  int col_length = -1;
  int col_loss = -1;
  std::size_t columns = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty()) continue;
    if (s[0] == '#') {
      // "# key = value" metadata
      const auto eq = s.find('=');
      if (eq != std::string::npos) {
        const std::string key = trim(std::string_view(s).substr(1, eq - 1));
        const std::string value = trim(std::string_view(s).substr(eq + 1));
        if (key == "polarization") data.polarization = value;
        if (key == "cladding") data.cladding = value;
      }
      continue;
    }
    const auto cells = split_csv(s);
    if (col_lambda < 0) {
      for (std::size_t k = 0; k < cells.size(); ++k) {
        if (cells[k] == "lambda_nm") col_lambda = static_cast<int>(k);
        else if (cells[k] == "length_mm") col_length = static_cast<int>(k);
        else if (cells[k] == "loss_db") col_loss = static_cast<int>(k);
        else throw ConfigError(std::string(source) + ": unknown column '" + cells[k] + "'");
      }
      if (col_lambda < 0 || col_length < 0 || col_loss < 0) {
        throw ConfigError(std::string(source) + ": header must name lambda_nm, length_mm and loss_db");
      }
      columns = cells.size();
      continue;
    }
    if (cells.size() != columns) {
      throw ConfigError(std::string(source) + ":" + std::to_string(line) + ": expected " +
                        std::to_string(columns) + " columns");
    }
    CutbackEntry e{parse_number(cells[col_lambda], source, line), parse_number(cells[col_length], source, line),
                   parse_number(cells[col_loss], source, line)};
    if (!(e.lambda_nm > 0.0) || !(e.length_mm > 0.0)) {
      throw ConfigError(std::string(source) + ":" + std::to_string(line) + ": wavelength and length must be positive");
    }
    data.entries.push_back(e);
  }
  if (col_lambda < 0) throw ConfigError(std::string(source) + ": missing header");
  return data;
}

CutbackDataset load_cutback_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open cutback file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_cutback_csv(ss.str(), file.string());
}

std::vector<double> dataset_wavelengths(const CutbackDataset& data) {
  std::vector<double> out;
  for (const auto& e : data.entries) out.push_back(e.lambda_nm);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) <= kSameLambda; }),
            out.end());
  return out;
}

CutbackResult cutback_regression(const CutbackDataset& data, double lambda_nm) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& e : data.entries) {
    if (std::abs(e.lambda_nm - lambda_nm) <= kSameLambda) {
      x.push_back(e.length_mm);
      y.push_back(e.loss_db);
    }
  }
  const int n = static_cast<int>(x.size());
  const double mx = n ? std::accumulate(x.begin(), x.end(), 0.0) / n : 0.0;
  const double my = n ? std::accumulate(y.begin(), y.end(), 0.0) / n : 0.0;
  double sxx = 0.0;
  double sxy = 0.0;
  for (int k = 0; k < n; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (n < 2 || sxx <= 1e-12 * std::max(1.0, mx * mx)) {
    throw FitError("cutback regression needs at least two distinct lengths at " + std::to_string(lambda_nm) + " nm",
                   {}, 0.0);
  }
  const double slope = sxy / sxx;  // dB/mm
  const double intercept = my - slope * mx;
  double ssr = 0.0;
  for (int k = 0; k < n; ++k) {
    const double r = y[k] - intercept - slope * x[k];
    ssr += r * r;
  }
  const double s2 = n > 2 ? ssr / (n - 2) : 0.0;
  double sum_x2 = 0.0;
  for (double v : x) sum_x2 += v * v;

  CutbackResult r;
  r.lambda_nm = lambda_nm;
  r.points = n;
  r.propagation_db_per_cm = slope * 10.0;
  r.propagation_sigma = std::sqrt(s2 / sxx) * 10.0;
  r.coupling_db = intercept;
  r.coupling_sigma = std::sqrt(s2 * sum_x2 / (n * sxx));
  r.per_coupler_db = 0.5 * intercept;
  return r;
}

std::vector<LossSample> loss_spectrum(const CutbackDataset& data) {
  std::vector<LossSample> out;
  for (double lambda : dataset_wavelengths(data)) {
    out.push_back({lambda, cutback_regression(data, lambda).propagation_db_per_cm});
  }
  return out;
}

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                          const std::vector<double>& steps, int max_evaluations, int restarts, double tolerance) {
  const std::size_t n = x0.size();
  SimplexResult best;
  best.x = x0;
  best.value = f(x0);
  best.evaluations = 1;

  for (int round = 0; round <= restarts; ++round) {
    std::vector<std::vector<double>> pts(n + 1, best.x);
    std::vector<double> val(n + 1, best.value);
    for (std::size_t k = 0; k < n; ++k) {
      pts[k + 1][k] += steps[k];
      val[k + 1] = f(pts[k + 1]);
    }
    int evals = static_cast<int>(n);
    bool converged = false;
    std::vector<std::size_t> order(n + 1);
    while (evals < max_evaluations) {
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
      const auto& lo = pts[order[0]];
      double diameter = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t d = 0; d < n; ++d) diameter = std::max(diameter, std::abs(pts[order[k]][d] - lo[d]));
      }
      const double spread = val[order[n]] - val[order[0]];
      if (diameter <= tolerance * 1e2 || spread <= tolerance * std::abs(val[order[0]]) + 1e-300) {
        converged = true;
        break;
      }
      std::vector<double> centroid(n, 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[order[k]][d] / n;
      }
      const std::size_t worst = order[n];
      auto along = [&](double t) {
        std::vector<double> p(n);
        for (std::size_t d = 0; d < n; ++d) p[d] = centroid[d] + t * (pts[worst][d] - centroid[d]);
        return p;
      };
      const auto xr = along(-1.0);
      const double fr = f(xr);
      ++evals;
      if (fr < val[order[0]]) {
        const auto xe = along(-2.0);
        const double fe = f(xe);
        ++evals;
        if (fe < fr) {
          pts[worst] = xe;
          val[worst] = fe;
        } else {
          pts[worst] = xr;
          val[worst] = fr;
        }
      } else if (fr < val[order[n - 1]]) {
        pts[worst] = xr;
        val[worst] = fr;
      } else {
        const bool outside = fr < val[worst];
        const auto xc = along(outside ? -0.5 : 0.5);
        const double fc = f(xc);
        ++evals;
        if (fc < (outside ? fr : val[worst])) {
          pts[worst] = xc;
          val[worst] = fc;
        } else {
          for (std::size_t k = 1; k <= n; ++k) {
            auto& p = pts[order[k]];
            for (std::size_t d = 0; d < n; ++d) p[d] = lo[d] + 0.5 * (p[d] - lo[d]);
            val[order[k]] = f(p);
            ++evals;
          }
        }
      }
    }
    best.evaluations += evals;
    const auto it = std::min_element(val.begin(), val.end());
    const double previous = best.value;
    if (*it <= best.value) {
      best.value = *it;
      best.x = pts[it - val.begin()];
    }
    best.converged = converged;
    if (!converged) break;
    if (round > 0 && previous - best.value <= tolerance * std::abs(best.value) + 1e-300) break;
  }
  return best;
}

double LossDecomposition::baseline(double lambda_nm) const { return scattering_a * std::pow(lambda_nm, -4.0); }

double LossDecomposition::model(double lambda_nm) const {
  const double v = voigt.amplitude > 0.0 ? wgpair::voigt(lambda_nm, voigt) : 0.0;
  return baseline(lambda_nm) + v;
}

namespace {

struct VoigtTransform {
  double anchor = 0.0;  // centre stays below this wavelength

  VoigtParams decode(const std::vector<double>& p) const {
    return {anchor - std::exp(p[0]), std::exp(p[1]), p[2] * p[2], p[3] * p[3]};
  }
  std::vector<double> encode(const VoigtParams& v) const {
    return {std::log(std::max(anchor - v.center_nm, 1e-6)), std::log(v.sigma_nm), std::sqrt(v.gamma_nm),
            std::sqrt(v.amplitude)};
  }
};

double fit_scattering(const std::vector<LossSample>& s, const std::array<std::size_t, 4>& idx,
                      const std::function<double(double)>& subtract) {
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k : idx) {
    const double x = std::pow(s[k].lambda_nm, -4.0);
    sxy += x * (s[k].loss_db_per_cm - subtract(s[k].lambda_nm));
    sxx += x * x;
  }
  return std::max(0.0, sxy / sxx);
}

}  // namespace

LossDecomposition decompose_spectrum(std::vector<LossSample> s, const DecomposeOptions& opt) {
  if (s.size() < 8) throw FitError("decompose_spectrum: need at least 8 spectral points", {}, 0.0);
  for (const auto& p : s) {
    if (!(p.lambda_nm > 0.0) || !std::isfinite(p.loss_db_per_cm)) {
      throw FitError("decompose_spectrum: wavelengths must be positive and losses finite", {}, 0.0);
    }
  }
  std::sort(s.begin(), s.end(), [](const LossSample& a, const LossSample& b) { return a.lambda_nm < b.lambda_nm; });
  const std::size_t n = s.size();
  const std::array<std::size_t, 4> anchors{n - 4, n - 3, n - 2, n - 1};

  LossDecomposition fit;
  for (int k = 0; k < 4; ++k) fit.anchors_nm[k] = s[anchors[k]].lambda_nm;
  const VoigtTransform tf{fit.anchors_nm[0]};

  // Pass 0 baseline: plain fit to the anchors.
  fit.scattering_a = fit_scattering(s, anchors, [](double) { return 0.0; });

  std::vector<double> residual(n);
  auto update_residual = [&] {
    for (std::size_t k = 0; k < n; ++k) residual[k] = s[k].loss_db_per_cm - fit.baseline(s[k].lambda_nm);
  };
  update_residual();

  // Initial Voigt guess from the residual's steepest descent.
  double center = 0.0;
  if (opt.center_guess_nm) {
    center = *opt.center_guess_nm;
  } else {
    double steepest = 0.0;
    center = s.front().lambda_nm;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double g = (residual[k + 1] - residual[k]) / (s[k + 1].lambda_nm - s[k].lambda_nm);
      if (g < steepest) {
        steepest = g;
        center = 0.5 * (s[k].lambda_nm + s[k + 1].lambda_nm);
      }
    }
  }
  center = std::min(center, tf.anchor - 1.0);
  const double peak = std::max(*std::max_element(residual.begin(), residual.end()), 1e-12);
  VoigtParams v{center, opt.width_guess_nm, opt.width_guess_nm, peak};

  double norm = 0.0;
  for (const auto& p : s) norm += p.loss_db_per_cm * p.loss_db_per_cm;
  norm = std::max(norm, 1e-300);

  const std::vector<double> steps{0.5, 0.3, 0.5, 0.3 * std::sqrt(peak)};
  for (fit.passes = 1; fit.passes <= opt.max_passes; ++fit.passes) {
    auto objective = [&](const std::vector<double>& p) {
      const VoigtParams q = tf.decode(p);
      if (!(q.sigma_nm > 0.0) || !std::isfinite(q.sigma_nm)) return 1e300;
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double r = residual[k] - voigt(s[k].lambda_nm, q);
        acc += r * r;
      }
      return acc / norm;
    };
    const SimplexResult sr =
        nelder_mead(objective, tf.encode(v), steps, opt.max_evaluations, opt.restarts, opt.tolerance);
    fit.evaluations += sr.evaluations;
    if (!sr.converged) {
      const VoigtParams b = tf.decode(sr.x);
      throw FitError("decompose_spectrum: simplex did not converge",
                     {fit.scattering_a, b.center_nm, b.sigma_nm, b.gamma_nm, b.amplitude}, std::sqrt(sr.value * norm / n));
    }
    const VoigtParams next = tf.decode(sr.x);
    fit.voigt = next;
    const double a_prev = fit.scattering_a;
    fit.scattering_a = fit_scattering(s, anchors, [&](double l) { return voigt(l, next); });
    update_residual();

    auto rel = [](double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); };
    const double change = std::max({rel(fit.scattering_a, a_prev), rel(next.center_nm, v.center_nm),
                                    rel(next.sigma_nm, v.sigma_nm), rel(next.gamma_nm, v.gamma_nm),
                                    rel(next.amplitude, v.amplitude)});
    v = next;
    if (fit.passes > 1 && change <= 1e-10) break;
  }
  if (fit.passes > opt.max_passes) fit.passes = opt.max_passes;

  double ssr = 0.0;
  for (const auto& p : s) {
    const double r = p.loss_db_per_cm - fit.model(p.lambda_nm);
    ssr += r * r;
  }
  fit.residual_rms = std::sqrt(ssr / n);
  return fit;
}

std::optional<double> absorption_onset(const LossDecomposition& fit, double lo_nm, double hi_nm) {
  auto excess = [&](double l) { return fit.model(l) - 2.0 * fit.baseline(l); };
  const double step = 0.1;
  double prev = hi_nm;
  if (excess(prev) >= 0.0) return prev;
  for (double l = hi_nm - step; l >= lo_nm - 1e-12; l -= step) {
    if (excess(l) >= 0.0) {
      double a = l;
      double b = prev;
      for (int k = 0; k < 80; ++k) {
        const double m = 0.5 * (a + b);
        (excess(m) >= 0.0 ? a : b) = m;
      }
      return 0.5 * (a + b);
    }
    prev = l;
  }
  return std::nullopt;
}

}  // namespace wgpair
