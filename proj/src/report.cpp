#include "wgpair/report.hpp"

#include <cmath>
#include <cstdio>

namespace wgpair {

namespace {

// NaN and infinities are not JSON; report them as null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

const char* split_name(SplitModel s) {
  return s == SplitModel::kProbabilistic ? "probabilistic" : "deterministic";
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Json metadata(const std::string& subcommand, std::uint64_t seed) {
  return Json{{"tool", kToolName}, {"version", kToolVersion}, {"subcommand", subcommand}, {"seed", seed}};
}

Json error_json(const std::string& type, const std::string& message, int exit_code) {
  return Json{{"error", {{"type", type}, {"message", message}, {"exit_code", exit_code}}}};
}

Json to_json(const ModeSolution& m) {
  Json j{{"polarization", to_string(m.polarization)},
         {"lambda_nm", num(m.lambda_nm)},
         {"n_eff", num(m.n_eff)},
         {"residual", num(m.residual)},
         {"dominant_fraction", num(m.dominant_fraction())}};
  if (m.grid) j["grid"] = {{"nx", m.grid->nx()}, {"ny", m.grid->ny()}};
  return j;
}

Json to_json(const MismatchSample& s) {
  return Json{{"lambda_nm", num(s.lambda_nm)},
              {"n_te", num(s.n_te)},
              {"n_tm_half", num(s.n_tm_half)},
              {"delta_n", num(s.delta)}};
}

Json to_json(const PhaseMatchSearch& search) {
  Json scan = Json::array();
  for (const auto& s : search.scan) scan.push_back(to_json(s));
  Json j{{"scan", scan}};
  if (search.match) {
    const auto& m = *search.match;
    j["match"] = {{"lambda_pump_nm", num(m.lambda_pump_nm)},
                  {"lambda_sh_nm", num(0.5 * m.lambda_pump_nm)},
                  {"delta_n", num(m.delta_n)},
                  {"n_eff_fh", num(m.n_eff_match)},
                  {"n_eff_sh", num(m.n_eff_sh)},
                  {"bracket_nm", {num(m.bracket_lo_nm), num(m.bracket_hi_nm)}},
                  {"iterations", m.iterations}};
  } else {
    j["match"] = nullptr;
  }
  return j;
}

Json to_json(const OverlapResult& o) {
  Json c = Json::object();
  for (const auto& [name, v] : o.contributions) c[name] = num(v);
  return Json{{"gamma_per_volt", num(o.gamma_per_volt)}, {"contributions", c}};
}

Json to_json(const SpdcEfficiency& e) {
  return Json{{"normalized_per_mm1_5", num(e.normalized_per_mm32)}, {"pairs_per_pump_photon", num(e.total)}};
}

Json to_json(const BiphotonSpectrum& s) {
  return Json{{"center_thz", num(s.center_thz)},
              {"center_nm", num(s.center_nm)},
              {"fwhm_thz", num(s.fwhm_thz)},
              {"fwhm_nm", num(s.fwhm_nm)},
              {"band_fraction", num(s.band_fraction)},
              {"samples", s.points.size()}};
}

Json to_json(const DetectionSetup& d) {
  return Json{{"pump_power_internal_mw", num(d.pump_power_internal_mw)},
              {"pair_rate_per_mw", num(d.pair_rate_per_mw)},
              {"filter_transmission", num(d.filter_transmission)},
              {"splitter_ratio", num(d.splitter_ratio)},
              {"split", split_name(d.split)},
              {"eta_det1", num(d.eta_det1)},
              {"eta_det2", num(d.eta_det2)},
              {"biphoton_coupling", num(d.biphoton_coupling)},
              {"t_res_ps", num(d.t_res_ps)},
              {"dark_rate1_hz", num(d.dark_rate1_hz)},
              {"dark_rate2_hz", num(d.dark_rate2_hz)},
              {"duration_s", num(d.duration_s)},
              {"coincidence_half_window", num(d.coincidence_half_window)},
              {"shards", d.shards}};
}

Json to_json(const CountsRecord& c) {
  return Json{{"s1_hz", num(c.s1_hz)},
              {"s1_sigma", num(c.s1_sigma)},
              {"s2_hz", num(c.s2_hz)},
              {"s2_sigma", num(c.s2_sigma)},
              {"rcc_hz", num(c.rcc_hz)},
              {"rcc_sigma", num(c.rcc_sigma)},
              {"raw_coincidence_hz", num(c.raw_coincidence_hz)},
              {"accidentals_hz", num(c.accidentals_hz)},
              {"duration_s", num(c.duration_s)},
              {"singles1", c.singles1},
              {"singles2", c.singles2},
              {"raw_coincidences", c.raw_coincidences}};
}

Json to_json(const G2Histogram& h) {
  return Json{{"g2_zero", num(h.g2_zero)},
              {"g2_zero_sigma", num(h.g2_zero_sigma)},
              {"g2_tail", num(h.g2_tail)},
              {"g2_tail_sigma", num(h.g2_tail_sigma)},
              {"bins", h.counts.size()}};
}

Json to_json(const ExpectedCounts& e) {
  return Json{{"s1_hz", num(e.s1_hz)}, {"s2_hz", num(e.s2_hz)}, {"rcc_hz", num(e.rcc_hz)}, {"g2_zero", num(e.g2_zero)}};
}

Json to_json(const RateReconstruction& r) {
  return Json{{"generated_rate_hz", num(r.generated_rate_hz)},
              {"generated_rate_sigma", num(r.generated_rate_sigma)},
              {"pairs_per_pump_photon", num(r.eta_internal)},
              {"rate_per_mw", num(r.rate_per_mw)}};
}

Json to_json(const HeraldingEfficiency& h) {
  return Json{{"raw", num(h.raw)}, {"corrected", num(h.corrected)}};
}

Json to_json(const FransonResult& f) {
  Json settings = Json::array();
  for (const auto& s : f.settings) settings.push_back({{"phase", num(s.phase)}, {"peaks", s.peaks}});
  return Json{{"visibility", num(f.visibility)},
              {"visibility_sigma", num(f.visibility_sigma)},
              {"model_visibility", num(f.model_visibility)},
              {"expected_visibility", num(f.expected_visibility)},
              {"exceeds_classical_bound", f.exceeds_classical_bound},
              {"loophole_free", f.loophole_free},
              {"settings", settings},
              {"warnings", f.warnings}};
}

Json to_json(const CutbackResult& c) {
  return Json{{"lambda_nm", num(c.lambda_nm)},
              {"propagation_db_per_cm", num(c.propagation_db_per_cm)},
              {"propagation_sigma", num(c.propagation_sigma)},
              {"coupling_db", num(c.coupling_db)},
              {"coupling_sigma", num(c.coupling_sigma)},
              {"per_coupler_db", num(c.per_coupler_db)},
              {"points", c.points}};
}

Json to_json(const LossDecomposition& d) {
  return Json{{"scattering_a_db_per_cm_nm4", num(d.scattering_a)},
              {"voigt",
               {{"center_nm", num(d.voigt.center_nm)},
                {"sigma_nm", num(d.voigt.sigma_nm)},
                {"gamma_nm", num(d.voigt.gamma_nm)},
                {"amplitude_db_per_cm", num(d.voigt.amplitude)}}},
              {"residual_rms_db_per_cm", num(d.residual_rms)},
              {"anchors_nm", {num(d.anchors_nm[0]), num(d.anchors_nm[1]), num(d.anchors_nm[2]), num(d.anchors_nm[3])}},
              {"passes", d.passes},
              {"evaluations", d.evaluations}};
}

Json to_json(const ChannelGrid& g) {
  return Json{{"spacing_ghz", num(g.spacing_ghz)},
              {"passband_ghz", num(g.passband_ghz)},
              {"center_thz", num(g.center_thz)},
              {"spectrum_fwhm_thz", num(g.spectrum_fwhm_thz)},
              {"channels", g.channels},
              {"pair_channels", g.pair_channels},
              {"degenerate", g.degenerate}};
}

Json to_json(const BudgetResult& b) {
  return Json{{"required_pump_mw", num(b.required_pump_mw)},
              {"mu", num(b.mu)},
              {"per_channel_rate_hz", num(b.per_channel_rate_hz)},
              {"total_rate_hz", num(b.total_rate_hz)},
              {"usable_rate_hz", num(b.usable_rate_hz)},
              {"saturation_ghz_per_mw", num(b.saturation_ghz_per_mw)},
              {"grid", to_json(b.grid)}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_fields_csv(std::ostream& out, const ModeSolution& m) {
  out << "x_nm,y_nm,n,ex,ey\n";
  if (!m.grid) return;
  const auto& g = *m.grid;
  for (int i = 0; i < g.nx(); ++i) {
    for (int j = 0; j < g.ny(); ++j) {
      const int k = g.flat(i, j);
      out << format_number(g.x_center(i)) << ',' << format_number(g.y_center(j)) << ','
          << format_number(g.index(i, j)) << ',' << format_number(m.ex.empty() ? 0.0 : m.ex[k]) << ','
          << format_number(m.ey.empty() ? 0.0 : m.ey[k]) << '\n';
    }
  }
}

void write_scan_csv(std::ostream& out, const std::vector<MismatchSample>& scan) {
  out << "lambda_nm,n_te,n_tm_half,delta_n\n";
  for (const auto& s : scan) {
    out << format_number(s.lambda_nm) << ',' << format_number(s.n_te) << ',' << format_number(s.n_tm_half) << ','
        << format_number(s.delta) << '\n';
  }
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve, const std::string& x_name,
                     const std::string& y_name) {
  out << x_name << ',' << y_name << '\n';
  for (const auto& p : curve) out << format_number(p.x) << ',' << format_number(p.y) << '\n';
}

void write_spectrum_csv(std::ostream& out, const BiphotonSpectrum& s) {
  out << "detuning_thz,frequency_thz,lambda_nm,density\n";
  for (const auto& p : s.points) {
    out << format_number(p.detuning_thz) << ',' << format_number(p.frequency_thz) << ','
        << format_number(p.lambda_nm) << ',' << format_number(p.density) << '\n';
  }
}

void write_g2_csv(std::ostream& out, const G2Histogram& h) {
  out << "delay_lo_ps,delay_hi_ps,counts,g2\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    out << format_number(h.bin_edges_ps[b]) << ',' << format_number(h.bin_edges_ps[b + 1]) << ',' << h.counts[b]
        << ',' << format_number(b < h.g2.size() ? h.g2[b] : 0.0) << '\n';
  }
}

void write_franson_csv(std::ostream& out, const FransonResult& f) {
  out << "phase,delay_lo_ps,delay_hi_ps,counts\n";
  for (const auto& s : f.settings) {
    for (std::size_t b = 0; b < s.histogram.size(); ++b) {
      out << format_number(s.phase) << ',' << format_number(f.bin_edges_ps[b]) << ','
          << format_number(f.bin_edges_ps[b + 1]) << ',' << s.histogram[b] << '\n';
    }
  }
}

void write_loss_csv(std::ostream& out, const std::vector<CutbackResult>& rows, const LossDecomposition* fit) {
  out << "lambda_nm,propagation_db_per_cm,propagation_sigma,coupling_db,coupling_sigma";
  if (fit) out << ",baseline_db_per_cm,model_db_per_cm";
  out << '\n';
  for (const auto& r : rows) {
    out << format_number(r.lambda_nm) << ',' << format_number(r.propagation_db_per_cm) << ','
        << format_number(r.propagation_sigma) << ',' << format_number(r.coupling_db) << ','
        << format_number(r.coupling_sigma);
    if (fit) out << ',' << format_number(fit->baseline(r.lambda_nm)) << ',' << format_number(fit->model(r.lambda_nm));
    out << '\n';
  }
}

void write_channels_csv(std::ostream& out, const BudgetResult& b) {
  out << "index,center_thz,center_nm,flat_rate_hz,weighted_rate_hz\n";
  for (const auto& c : b.channels) {
    out << c.channel.index << ',' << format_number(c.channel.center_thz) << ','
        << format_number(c.channel.center_nm) << ',' << format_number(c.flat_rate_hz) << ','
        << format_number(c.weighted_rate_hz) << '\n';
  }
}

}  // namespace wgpair
