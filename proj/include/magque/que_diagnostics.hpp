#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "magque/eigensolver.hpp"
#include "magque/lattice_control.hpp"
#include "magque/quantization.hpp"

namespace magque {

struct DensityFourier {
  double lambda = 0.0;  // square root of the eigenvalue
  int k_max = 0;
  std::map<IVec2, cplx> nu_hat;

  /// max over 0 < |k|_inf <= k_max of |nu_hat|
  double max_nonzero() const;
};

/// Fourier coefficients of |u|^2 / ||u||^2 for |k|_inf <= k_max.
DensityFourier density_fourier(const GridWavefunction& u, int k_max, double lambda = 0.0);

/// (1/2 pi) int a_0(theta) dtheta over the unit circle.
cplx liouville_average(const BandLimitedSymbol& sym, int nodes = 2048);

/// |w_h(a) - Liouville average of a|
double phase_space_deviation(const BandLimitedSymbol& sym, const AmbiguityTable& tab);

struct RatePair {
  double lambda = 0.0;
  double m = 0.0;
};

struct RateFit {
  std::vector<RatePair> pairs;
  double slope = 0.0;
  double constant = 0.0;
  double residual = 0.0;  // rms of log residuals
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// Least squares for log m = log C + slope log lambda; needs 5 pairs spanning a factor min_span.
RateFit rate_fit(const std::vector<RatePair>& pairs, double min_span = 8.0);

struct DeviationRecord {
  double lambda = 0.0;
  std::string symbol;
  double value = 0.0;
};

struct SpectrumEntry {
  double eigenvalue = 0.0;
  double residual = 0.0;
  int cluster = 0;
};

struct ReportMeta {
  std::vector<FourierMode> field;
  Vec2 alpha{0.0, 0.0};
  int n = 0;
  double tol = 0.0;
};

struct QueReport {
  ReportMeta meta;
  std::vector<SpectrumEntry> spectrum;
  std::vector<DensityFourier> density;
  std::vector<DeviationRecord> deviations;
  std::optional<RateFit> rate;
  std::optional<ControlCertificate> control;
};

QueReport que_report(const ReportMeta& meta, const std::vector<EigenResult>& spectra,
                     std::vector<DensityFourier> densities, std::vector<DeviationRecord> deviations,
                     std::optional<RateFit> rate, std::optional<ControlCertificate> certificate);

nlohmann::json certificate_json(const ControlCertificate& cert);
ControlCertificate certificate_from_json(const nlohmann::json& j);
nlohmann::json report_json(const QueReport& report);
QueReport report_from_json(const nlohmann::json& j);
std::string serialize_report(const QueReport& report);
QueReport parse_report(const std::string& text);
/// FNV-1a of the serialized report.
std::uint64_t report_hash(const QueReport& report);

/// gnuplot-ready tables for each section.
std::string density_csv(const QueReport& report);
std::string deviations_csv(const QueReport& report);
std::string spectrum_csv(const QueReport& report);

}  // namespace magque
