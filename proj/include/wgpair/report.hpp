#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wgpair/conversion.hpp"
#include "wgpair/lossfit.hpp"
#include "wgpair/modesolver.hpp"
#include "wgpair/pairstats.hpp"
#include "wgpair/phasematch.hpp"
#include "wgpair/qkdbudget.hpp"

namespace wgpair {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "wgpair";
inline constexpr const char* kToolVersion = "0.1.0";

// Everything that is not a result goes here; no wall-clock fields so equal
// inputs give byte-identical files.
Json metadata(const std::string& subcommand, std::uint64_t seed);

// {"error": {"type", "message", "exit_code"}}
Json error_json(const std::string& type, const std::string& message, int exit_code);

Json to_json(const ModeSolution& mode);  // summary, no field arrays
Json to_json(const MismatchSample& s);
Json to_json(const PhaseMatchSearch& search);
Json to_json(const OverlapResult& overlap);
Json to_json(const SpdcEfficiency& e);
Json to_json(const BiphotonSpectrum& s);  // summary, no samples
Json to_json(const DetectionSetup& d);
Json to_json(const CountsRecord& c);
Json to_json(const G2Histogram& h);  // summary, no bins
Json to_json(const ExpectedCounts& e);
Json to_json(const RateReconstruction& r);
Json to_json(const HeraldingEfficiency& h);
Json to_json(const FransonResult& f);
Json to_json(const CutbackResult& c);
Json to_json(const LossDecomposition& d);
Json to_json(const ChannelGrid& g);
Json to_json(const BudgetResult& b);

std::string dump(const Json& j);

// CSV tables, header line first. Numbers use %.10g.
void write_fields_csv(std::ostream& out, const ModeSolution& mode);  // x_nm,y_nm,n,ex,ey
void write_scan_csv(std::ostream& out, const std::vector<MismatchSample>& scan);
void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve, const std::string& x_name,
                     const std::string& y_name);
void write_spectrum_csv(std::ostream& out, const BiphotonSpectrum& s);
void write_g2_csv(std::ostream& out, const G2Histogram& h);
void write_franson_csv(std::ostream& out, const FransonResult& f);
void write_loss_csv(std::ostream& out, const std::vector<CutbackResult>& rows, const LossDecomposition* fit);
void write_channels_csv(std::ostream& out, const BudgetResult& b);

std::string format_number(double v);

}  // namespace wgpair
