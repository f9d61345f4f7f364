#include <doctest.h>

#include <cmath>
#include <sstream>

#include "wgpair/report.hpp"

using namespace wgpair;

TEST_CASE("metadata carries no wall-clock fields") {
  const Json m = metadata("budget", 7);
  CHECK(m["tool"] == "wgpair");
  CHECK(m["subcommand"] == "budget");
  CHECK(m["seed"] == 7);
  for (const auto& [k, v] : m.items()) {
    CHECK(k.find("time") == std::string::npos);
    CHECK(k.find("date") == std::string::npos);
  }
  CHECK(dump(metadata("x", 1)) == dump(metadata("x", 1)));
}

TEST_CASE("error payload") {
  const Json e = error_json("config", "bad key", 2);
  CHECK(e["error"]["type"] == "config");
  CHECK(e["error"]["message"] == "bad key");
  CHECK(e["error"]["exit_code"] == 2);
  CHECK(dump(e).back() == '\n');
}

TEST_CASE("non-finite numbers become null") {
  ExpectedCounts e;
  e.g2_zero = std::nan("");
  e.s1_hz = INFINITY;
  const Json j = to_json(e);
  CHECK(j["g2_zero"].is_null());
  CHECK(j["s1_hz"].is_null());
  CHECK(j["s2_hz"] == 0.0);
}

TEST_CASE("CSV layouts") {
  std::ostringstream scan;
  write_scan_csv(scan, {{1600.0, 3.1, 3.2, 0.1}});
  CHECK(scan.str() == "lambda_nm,n_te,n_tm_half,delta_n\n1600,3.1,3.2,0.1\n");

  std::ostringstream curve;
  write_curve_csv(curve, {{1.0, 0.5}}, "lambda_nm", "relative_power");
  CHECK(curve.str() == "lambda_nm,relative_power\n1,0.5\n");

  G2Histogram h;
  h.bin_edges_ps = {-75, 75};
  h.counts = {12};
  h.g2 = {3.0};
  std::ostringstream g2;
  write_g2_csv(g2, h);
  CHECK(g2.str() == "delay_lo_ps,delay_hi_ps,counts,g2\n-75,75,12,3\n");

  std::ostringstream loss;
  write_loss_csv(loss, {CutbackResult{800, 5, 0.1, 4, 0.2, 2, 4}}, nullptr);
  CHECK(loss.str().rfind("lambda_nm,propagation_db_per_cm,propagation_sigma,coupling_db,coupling_sigma\n", 0) == 0);
  LossDecomposition fit;
  fit.scattering_a = 1e12;
  fit.voigt = {760, 15, 10, 1};
  std::ostringstream loss2;
  write_loss_csv(loss2, {CutbackResult{800, 5, 0.1, 4, 0.2, 2, 4}}, &fit);
  CHECK(loss2.str().find(",baseline_db_per_cm,model_db_per_cm\n") != std::string::npos);

  CHECK(format_number(0.1 + 0.2) == "0.3");
  CHECK(format_number(1.333e10) == "1.333e+10");
  CHECK(format_number(1.0 / 3.0) == "0.3333333333");
}
