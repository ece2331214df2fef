#include "magque/que_diagnostics.hpp"

#include <fftw3.h>

#include "fft_support.hpp"

#include <iomanip>
#include <sstream>

namespace magque {

using nlohmann::json;

double DensityFourier::max_nonzero() const {
  double m = 0.0;
  for (const auto& [k, v] : nu_hat)
    if (k != IVec2{0, 0}) m = std::max(m, std::abs(v));
  return m;
}

DensityFourier density_fourier(const GridWavefunction& u, int k_max, double lambda) {
  const int n = u.n();
  if (2 * k_max >= n) throw GridTooCoarse("wavevector window exceeds the grid Nyquist range");
  const std::size_t nn = std::size_t(n) * n;
  fftw_complex* in = fftw_alloc_complex(nn);
  fftw_complex* out = fftw_alloc_complex(nn);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_2d(n, n, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < nn; ++i) {
    in[i][0] = std::norm(u.values()[i]);
    in[i][1] = 0.0;
    total += in[i][0];
  }
  if (total == 0.0) {
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
    throw ZeroVector("density of the zero wavefunction");
  }
  fftw_execute(plan);
  DensityFourier d;
  d.lambda = lambda;
  d.k_max = k_max;
  for (int k1 = -k_max; k1 <= k_max; ++k1)
    for (int k2 = -k_max; k2 <= k_max; ++k2) {
      const std::size_t q = std::size_t((k1 + n) % n) * n + (k2 + n) % n;
      d.nu_hat[{k1, k2}] = cplx(out[q][0], out[q][1]) / total;
    }
  fftw_destroy_plan(plan);
  fftw_free(in);
  fftw_free(out);
  return d;
}

cplx liouville_average(const BandLimitedSymbol& sym, int nodes) {
  if (sym.xi_independent()) return sym.constant({0, 0});
  cplx acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double t = kTwoPi * i / nodes;
    acc += sym.mode({0, 0}, {std::cos(t), std::sin(t)});
  }
  return acc / double(nodes);
}

double phase_space_deviation(const BandLimitedSymbol& sym, const AmbiguityTable& tab) {
  if (!sym.xi_independent() && !(sym.xi_max() > 1.0)) {
    std::ostringstream os;
    os << "symbol support radius " << sym.xi_max() << " does not reach past the unit shell";
    throw ShellMismatch(os.str());
  }
  return std::abs(wigner_pair(sym, tab) - liouville_average(sym));
}

RateFit rate_fit(const std::vector<RatePair>& pairs, double min_span) {
  if (pairs.size() < 5) throw InsufficientSpan("need at least 5 pairs, got " + std::to_string(pairs.size()));
  RateFit f;
  f.pairs = pairs;
  f.lambda_min = pairs.front().lambda;
  f.lambda_max = pairs.front().lambda;
  for (const auto& p : pairs) {
    if (!(p.lambda > 0.0) || !(p.m > 0.0)) throw ValidationError("rate pairs must be positive");
    f.lambda_min = std::min(f.lambda_min, p.lambda);
    f.lambda_max = std::max(f.lambda_max, p.lambda);
  }
  if (f.lambda_max < min_span * f.lambda_min) {
    std::ostringstream os;
    os << "lambda spans a factor " << f.lambda_max / f.lambda_min << " < " << min_span;
    throw InsufficientSpan(os.str());
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(pairs.size());
  for (const auto& p : pairs) {
    const double x = std::log(p.lambda), y = std::log(p.m);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - f.slope * sx) / n;
  f.constant = std::exp(icpt);
  double r2 = 0.0;
  for (const auto& p : pairs) {
    const double e = std::log(p.m) - icpt - f.slope * std::log(p.lambda);
    r2 += e * e;
  }
  f.residual = std::sqrt(r2 / n);
  return f;
}

QueReport que_report(const ReportMeta& meta, const std::vector<EigenResult>& spectra,
                     std::vector<DensityFourier> densities, std::vector<DeviationRecord> deviations,
                     std::optional<RateFit> rate, std::optional<ControlCertificate> certificate) {
  QueReport r;
  r.meta = meta;
  for (const auto& s : spectra)
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
      r.spectrum.push_back({s.eigenvalues[i], i < s.residuals.size() ? s.residuals[i] : 0.0,
                            i < s.clusters.size() ? s.clusters[i] : 0});
  r.density = std::move(densities);
  r.deviations = std::move(deviations);
  r.rate = std::move(rate);
  r.control = std::move(certificate);
  return r;
}

json certificate_json(const ControlCertificate& cert) {
  json w = json::array();
  for (const auto& x : cert.witnesses)
    w.push_back({{"e", {x.lattice.e[0], x.lattice.e[1]}},
                 {"L", x.lattice.length()},
                 {"min", x.min_value},
                 {"argmin", {x.argmin[0], x.argmin[1]}},
                 {"lower_bound", x.lower_bound},
                 {"samples", x.samples}});
  return {{"verdict", cert.pass ? "pass" : "fail"},
          {"witnesses", w},
          {"lattices_checked", cert.lattices_checked},
          {"exact", cert.exact},
          {"mean_flux", cert.mean_flux}};
}

ControlCertificate certificate_from_json(const json& j) {
  ControlCertificate c;
  c.pass = j.at("verdict").get<std::string>() == "pass";
  c.lattices_checked = j.at("lattices_checked").get<int>();
  c.exact = j.value("exact", true);
  c.mean_flux = j.value("mean_flux", 0.0);
  for (const auto& w : j.at("witnesses")) {
    Witness x;
    x.lattice.e = {w.at("e")[0].get<int>(), w.at("e")[1].get<int>()};
    x.min_value = w.at("min").get<double>();
    x.argmin = {w.at("argmin")[0].get<double>(), w.at("argmin")[1].get<double>()};
    x.lower_bound = w.value("lower_bound", 0.0);
    x.samples = w.value("samples", 0);
    x.argmin_s = x.lattice.e[0] * x.argmin[0] + x.lattice.e[1] * x.argmin[1];
    c.witnesses.push_back(x);
  }
  return c;
}

json report_json(const QueReport& r) {
  json field = json::array();
  for (const auto& m : r.meta.field) field.push_back({m.k[0], m.k[1], m.c.real(), m.c.imag()});
  json spectrum = json::array();
  for (const auto& s : r.spectrum)
    spectrum.push_back({{"eigenvalue", s.eigenvalue}, {"residual", s.residual}, {"cluster", s.cluster}});
  json density = json::array();
  for (const auto& d : r.density) {
    json nu = json::array();
    for (const auto& [k, v] : d.nu_hat) nu.push_back({k[0], k[1], v.real(), v.imag()});
    density.push_back({{"lambda", d.lambda}, {"k_max", d.k_max}, {"nu_hat", nu}});
  }
  json dev = json::array();
  for (const auto& d : r.deviations)
    dev.push_back({{"lambda", d.lambda}, {"symbol", d.symbol}, {"value", d.value}});
  json out = {{"meta", {{"field", field},
                        {"alpha", {r.meta.alpha[0], r.meta.alpha[1]}},
                        {"N", r.meta.n},
                        {"tol", r.meta.tol}}},
              {"spectrum", spectrum},
              {"density", density},
              {"deviations", dev},
              {"rate", nullptr},
              {"control", nullptr}};
  if (r.rate) {
    json pairs = json::array();
    for (const auto& p : r.rate->pairs) pairs.push_back({p.lambda, p.m});
    out["rate"] = {{"slope", r.rate->slope},
                   {"constant", r.rate->constant},
                   {"residual", r.rate->residual},
                   {"window", {r.rate->lambda_min, r.rate->lambda_max}},
                   {"pairs", pairs}};
  }
  if (r.control) out["control"] = certificate_json(*r.control);
  return out;
}

QueReport report_from_json(const json& j) {
  QueReport r;
  const json& meta = j.at("meta");
  for (const auto& m : meta.at("field"))
    r.meta.field.push_back({{m[0].get<int>(), m[1].get<int>()}, {m[2].get<double>(), m[3].get<double>()}});
  r.meta.alpha = {meta.at("alpha")[0].get<double>(), meta.at("alpha")[1].get<double>()};
  r.meta.n = meta.at("N").get<int>();
  r.meta.tol = meta.at("tol").get<double>();
  for (const auto& s : j.at("spectrum"))
    r.spectrum.push_back({s.at("eigenvalue").get<double>(), s.at("residual").get<double>(),
                          s.at("cluster").get<int>()});
  for (const auto& d : j.at("density")) {
    DensityFourier df;
    df.lambda = d.at("lambda").get<double>();
    df.k_max = d.value("k_max", 0);
    for (const auto& v : d.at("nu_hat"))
      df.nu_hat[{v[0].get<int>(), v[1].get<int>()}] = {v[2].get<double>(), v[3].get<double>()};
    r.density.push_back(std::move(df));
  }
  for (const auto& d : j.at("deviations"))
    r.deviations.push_back({d.at("lambda").get<double>(), d.at("symbol").get<std::string>(),
                            d.at("value").get<double>()});
  if (j.contains("rate") && !j.at("rate").is_null()) {
    const json& rt = j.at("rate");
    RateFit f;
    f.slope = rt.at("slope").get<double>();
    f.constant = rt.at("constant").get<double>();
    f.residual = rt.at("residual").get<double>();
    f.lambda_min = rt.at("window")[0].get<double>();
    f.lambda_max = rt.at("window")[1].get<double>();
    for (const auto& p : rt.at("pairs")) f.pairs.push_back({p[0].get<double>(), p[1].get<double>()});
    r.rate = f;
  }
  if (j.contains("control") && !j.at("control").is_null()) r.control = certificate_from_json(j.at("control"));
  return r;
}

std::string serialize_report(const QueReport& report) { return report_json(report).dump(2) + "\n"; }

QueReport parse_report(const std::string& text) {
  try {
    return report_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
}

std::uint64_t report_hash(const QueReport& report) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : serialize_report(report)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::ostringstream csv_stream() {
  std::ostringstream os;
  os << std::setprecision(17);
  return os;
}

}  // namespace

std::string density_csv(const QueReport& report) {
  auto os = csv_stream();
  os << "lambda,k1,k2,re,im\n";
  for (const auto& d : report.density)
    for (const auto& [k, v] : d.nu_hat)
      os << d.lambda << ',' << k[0] << ',' << k[1] << ',' << v.real() << ',' << v.imag() << '\n';
  return os.str();
}

std::string deviations_csv(const QueReport& report) {
  auto os = csv_stream();
  os << "lambda,symbol,value\n";
  for (const auto& d : report.deviations) os << d.lambda << ',' << d.symbol << ',' << d.value << '\n';
  return os.str();
}

std::string spectrum_csv(const QueReport& report) {
  auto os = csv_stream();
  os << "index,eigenvalue,residual,cluster_id\n";
  for (std::size_t i = 0; i < report.spectrum.size(); ++i)
    os << i << ',' << report.spectrum[i].eigenvalue << ',' << report.spectrum[i].residual << ','
       << report.spectrum[i].cluster << '\n';
  return os.str();
}

}  // namespace magque
