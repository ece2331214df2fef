#include "magque/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "magque/classical.hpp"
#include "magque/eigensolver.hpp"
#include "magque/oracle_landau.hpp"
#include "magque/que_diagnostics.hpp"
#include "magque/wavefunction_io.hpp"

namespace magque {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::ostringstream table_stream() {
  std::ostringstream os;
  os << std::setprecision(17);
  return os;
}

std::string out_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

SolverOptions solver_options(const RunConfig& cfg) {
  SolverOptions o;
  o.seed = cfg.solver.seed;
  o.block_size = cfg.solver.block;
  return o;
}

EigenResult solve(const SparseHermitianOperator& h, const RunConfig& cfg) {
  if (cfg.solver.sigma) return window_eigenpairs(h, *cfg.solver.sigma, cfg.solver.k, cfg.solver.tol, solver_options(cfg));
  return lowest_eigenpairs(h, cfg.solver.k, cfg.solver.tol, solver_options(cfg));
}

std::vector<FourierMode> field_list(const RunConfig& cfg) { return cfg.magnetic_field().series().list(); }

bool constant_field(const MagneticField& b) {
  for (const auto& [k, c] : b.series().modes())
    if (k != IVec2{0, 0}) return false;
  return true;
}

double oracle_residual(const SparseHermitianOperator& h, const GridWavefunction& u, double lambda) {
  GridWavefunction r = h.apply(u);
  r -= cplx(lambda) * u;
  return r.norm() / lambda;
}

int cmd_spectrum(const RunConfig& cfg, const RunOptions& opts, const std::string& dir, std::ostream& out) {
  const auto h = assemble(cfg.gauge(), cfg.scalar_potential(), cfg.n);
  const EigenResult res = solve(h, cfg);
  QueReport rep;
  for (std::size_t i = 0; i < res.eigenvalues.size(); ++i)
    rep.spectrum.push_back({res.eigenvalues[i], res.residuals[i], res.clusters[i]});
  atomic_write(out_path(dir, "spectrum.csv"), spectrum_csv(rep));
  if (opts.vectors)
    for (std::size_t i = 0; i < res.eigenvectors.size(); ++i)
      write_wavefunction(out_path(dir, "eigvec_" + std::to_string(i) + ".mtwf"), res.eigenvectors[i]);
  out << res.target.describe() << ": " << res.eigenvalues.size() << " eigenpairs, " << res.matvecs
      << " matvecs\n";
  return 0;
}

struct Eigenfunction {
  double energy;
  double residual;
  int cluster;
  GridWavefunction u;
};

std::vector<Eigenfunction> scan_functions(const RunConfig& cfg, const SparseHermitianOperator& h) {
  std::vector<Eigenfunction> fs;
  if (cfg.diagnostics.source == "oracle") {
    const MagneticField b = cfg.magnetic_field();
    if (!constant_field(b) || !cfg.potential.empty())
      throw ValidationError("diagnostics.source: the oracle needs a constant field and no potential");
    std::vector<int> levels = cfg.diagnostics.levels;
    if (levels.empty())
      for (int j = 1; j <= cfg.oracle.levels; ++j) levels.push_back(j);
    for (int j : levels) {
      const double lambda = (2.0 * j - 1.0) * b.mean();
      GridWavefunction u = landau_eigenfunction(b.mean(), cfg.alpha, j, 0, cfg.n);
      const double r = oracle_residual(h, u, lambda);
      fs.push_back({lambda, r, j - 1, std::move(u)});
    }
    return fs;
  }
  EigenResult res = solve(h, cfg);
  for (std::size_t i = 0; i < res.eigenvalues.size(); ++i)
    fs.push_back({res.eigenvalues[i], res.residuals[i], res.clusters[i], std::move(res.eigenvectors[i])});
  return fs;
}

int cmd_que_scan(const RunConfig& cfg, const RunOptions& opts, const std::string& dir, std::ostream& out,
                 std::ostream& err) {
  const auto h = assemble(cfg.gauge(), cfg.scalar_potential(), cfg.n);
  const auto fs = scan_functions(cfg, h);
  QueReport rep;
  rep.meta = {field_list(cfg), cfg.alpha, cfg.n, cfg.solver.tol};
  std::vector<RatePair> pairs;
  for (const auto& f : fs) {
    rep.spectrum.push_back({f.energy, f.residual, f.cluster});
    const double lambda = std::sqrt(std::max(f.energy, 0.0));
    DensityFourier d = density_fourier(f.u, cfg.diagnostics.k, lambda);
    if (lambda > 0) pairs.push_back({lambda, d.max_nonzero()});
    rep.density.push_back(std::move(d));
    for (const auto& name : cfg.diagnostics.symbols) {
      const double hh = cfg.quantization.h ? *cfg.quantization.h : 1.0 / lambda;
      const BandLimitedSymbol sym = cfg.symbol(name, hh);
      const double step = 1.0 / (cfg.n * hh);
      int j = cfg.quantization.j;
      if (j == 0) j = sym.xi_independent() ? 1 : choose_zeta_cutoff(sym, step, 1e-8, 4 * cfg.n);
      if (!sym.xi_independent()) {
        const double tail = zeta_tail(sym, step, j);
        if (tail > 1e-8) err << "warning: " << name << " at lambda " << lambda << ": zeta tail " << tail
                             << " beyond J = " << j << "\n";
      }
      const AmbiguityTable tab =
          ambiguity_table(f.u, hh, std::max(cfg.quantization.k_sym, sym.k_sym()), j, opts.threads);
      rep.deviations.push_back({lambda, name, phase_space_deviation(sym, tab)});
    }
  }
  bool positive = !pairs.empty();
  for (const auto& p : pairs) positive = positive && p.m > 0;
  if (positive) {
    try {
      rep.rate = rate_fit(pairs, cfg.diagnostics.min_span);
    } catch (const InsufficientSpan& e) {
      err << "rate fit skipped: " << e.detail() << "\n";
    }
  }
  if (cfg.magnetic_field().mean() > 0) rep.control = certify_control(cfg.magnetic_field(), cfg.control.density);
  atomic_write(out_path(dir, "report.json"), serialize_report(rep));
  atomic_write(out_path(dir, "density.csv"), density_csv(rep));
  atomic_write(out_path(dir, "deviations.csv"), deviations_csv(rep));
  atomic_write(out_path(dir, "spectrum.csv"), spectrum_csv(rep));
  out << "que-scan: " << fs.size() << " eigenfunctions";
  if (rep.rate) out << ", slope " << rep.rate->slope;
  out << "\n";
  return 0;
}

int cmd_control_check(const RunConfig& cfg, const RunOptions& opts, const std::string& dir, std::ostream& out) {
  const MagneticField b = cfg.magnetic_field();
  const ControlCertificate cert = certify_control(b, cfg.control.density);
  json j = certificate_json(cert);
  json crit = json::array();
  for (const auto& w : cert.witnesses) {
    if (w.lower_bound > 0) continue;
    json pts = json::array();
    for (const auto& x : critical_geodesics(b, w.lattice)) pts.push_back({x[0], x[1]});
    crit.push_back({{"e", {w.lattice.e[0], w.lattice.e[1]}}, {"anchors", pts}});
  }
  j["critical_geodesics"] = crit;
  atomic_write(out_path(dir, "certificate.json"), j.dump(2) + "\n");
  if (cfg.control.samples > 0) {
    const auto starts = control_samples(cfg.control.samples, cfg.control.r0, cfg.solver.seed);
    const ControlTimeReport rep = control_time_check(b, {cfg.control.center, cfg.control.radius}, cfg.control.t0,
                                                     cfg.control.r0, starts, cfg.control.bins, opts.threads);
    json t = {{"samples", rep.samples}, {"hits", rep.hits},       {"fraction", rep.fraction},
              {"t0", rep.t0},           {"r0", rep.r0},           {"histogram", rep.histogram},
              {"first_hit_times", rep.first_hit_times}};
    atomic_write(out_path(dir, "control_time.json"), t.dump(2) + "\n");
    out << "control time: " << rep.hits << "/" << rep.samples << " hit within t0\n";
  }
  out << "control: " << (cert.pass ? "pass" : "fail") << " (" << cert.lattices_checked << " lattices)\n";
  for (const auto& w : cert.witnesses)
    out << "  e = (" << w.lattice.e[0] << ", " << w.lattice.e[1] << ") min " << w.min_value << " at ("
        << w.argmin[0] << ", " << w.argmin[1] << ")\n";
  return (!cert.pass && opts.expect_pass) ? 2 : 0;
}

int cmd_classical(const RunConfig& cfg, const std::string& dir, std::ostream& out) {
  const auto& c = cfg.classical;
  auto os = table_stream();
  if (c.kind == "x_lambda") {
    const auto avg = directional_average(cfg.magnetic_field(), make_sublattice(c.lattice));
    const LambdaOrbit o = integrate_x_lambda(avg, c.sign, c.s0, c.eta0, c.t_end, c.dt, c.stride);
    os << "t,s,eta\n";
    for (std::size_t i = 0; i < o.times.size(); ++i) os << o.times[i] << ',' << o.s[i] << ',' << o.eta[i] << '\n';
    atomic_write(out_path(dir, "orbit.csv"), os.str());
    out << "x_lambda orbit: " << o.times.size() << " samples, energy drift " << o.energy_drift << "\n";
    return 0;
  }
  const PhasePoint p0{c.x0, c.xi0};
  OrbitSample orbit;
  if (c.kind == "magnetic") {
    orbit = integrate_magnetic(cfg.magnetic_field(), p0, c.t_end, c.dt, c.stride);
  } else if (c.kind == "geodesic") {
    orbit = integrate_geodesic(p0, c.t_end, std::max(1, int(std::ceil(c.t_end / (c.dt * c.stride)))));
  } else {
    const MagneticField b = cfg.magnetic_field();
    if (!constant_field(b)) throw ValidationError("classical.kind: cyclotron needs a constant field");
    const long steps = std::lround(c.t_end / c.dt);
    for (long i = 0; i <= steps; i += c.stride) {
      const double t = std::min(c.t_end, i * c.dt);
      PhasePoint p = cyclotron_exact(b.mean(), p0, t);
      p.x = wrap_torus(p.x);
      orbit.times.push_back(t);
      orbit.points.push_back(p);
    }
  }
  os << "t,x1,x2,xi1,xi2\n";
  for (std::size_t i = 0; i < orbit.times.size(); ++i) {
    const auto& p = orbit.points[i];
    os << orbit.times[i] << ',' << p.x[0] << ',' << p.x[1] << ',' << p.xi[0] << ',' << p.xi[1] << '\n';
  }
  atomic_write(out_path(dir, "orbit.csv"), os.str());
  out << c.kind << " orbit: " << orbit.times.size() << " samples\n";
  return 0;
}

std::string meta_path(const std::string& table) {
  fs::path p(table);
  p.replace_extension(".json");
  return p.string();
}

int cmd_ambiguity(const RunConfig& cfg, const RunOptions& opts, const std::string& dir, std::ostream& out) {
  GridWavefunction u;
  double energy = 0.0;
  if (!opts.input.empty()) {
    u = read_wavefunction(opts.input);
    u.normalize();
    const auto h = assemble(cfg.gauge(), cfg.scalar_potential(), u.n(), {u.origin(), std::nullopt});
    energy = h.apply(u).inner(u).real();
  } else {
    RunConfig c = cfg;
    c.solver.k = std::max(c.solver.k, c.quantization.index + 1);
    const auto h = assemble(c.gauge(), c.scalar_potential(), c.n);
    EigenResult res = solve(h, c);
    u = res.eigenvectors.at(c.quantization.index);
    energy = res.eigenvalues.at(c.quantization.index);
  }
  if (cfg.quantization.j == 0) throw ValidationError("quantization.j: ambiguity needs an explicit J");
  const double hh = cfg.quantization.h ? *cfg.quantization.h : 1.0 / std::sqrt(energy);
  const AmbiguityTable tab = ambiguity_table(u, hh, cfg.quantization.k_sym, cfg.quantization.j, opts.threads);
  auto os = table_stream();
  os << "eta1,eta2,zeta1,zeta2,re,im\n";
  const double dz = tab.zeta_step();
  for (int k1 = -tab.k_sym; k1 <= tab.k_sym; ++k1)
    for (int k2 = -tab.k_sym; k2 <= tab.k_sym; ++k2)
      for (int s1 = -tab.j; s1 <= tab.j; ++s1)
        for (int s2 = -tab.j; s2 <= tab.j; ++s2) {
          const cplx v = tab.at({k1, k2}, {s1, s2});
          os << kTwoPi * k1 << ',' << kTwoPi * k2 << ',' << s1 * dz << ',' << s2 * dz << ',' << v.real() << ','
             << v.imag() << '\n';
        }
  const std::string csv = out_path(dir, "ambiguity.csv");
  atomic_write(csv, os.str());
  json meta = {{"h", tab.h}, {"N", tab.n}, {"k_sym", tab.k_sym}, {"J", tab.j}, {"energy", energy}};
  atomic_write(meta_path(csv), meta.dump(2) + "\n");
  out << "ambiguity table: h = " << hh << ", " << tab.values.size() << " entries\n";
  return 0;
}

AmbiguityTable load_table(const std::string& csv_path) {
  AmbiguityTable tab;
  json meta;
  try {
    meta = json::parse(read_file(meta_path(csv_path)));
    tab.h = meta.at("h").get<double>();
    tab.n = meta.at("N").get<int>();
    tab.k_sym = meta.at("k_sym").get<int>();
    tab.j = meta.at("J").get<int>();
  } catch (const json::exception& e) {
    throw FormatError(meta_path(csv_path) + ": " + e.what());
  }
  tab.values.assign(std::size_t(tab.side_k()) * tab.side_k() * tab.side_s() * tab.side_s(), cplx(0.0));
  std::istringstream in(read_file(csv_path));
  std::string line;
  std::getline(in, line);
  if (line != "eta1,eta2,zeta1,zeta2,re,im") throw FormatError(csv_path + ": unexpected header");
  const double dz = tab.zeta_step();
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double f[6];
    char comma;
    for (int i = 0; i < 6; ++i)
      if (!(ls >> f[i]) || (i < 5 && !(ls >> comma))) throw FormatError(csv_path + ": malformed row " + line);
    const IVec2 k{int(std::lround(f[0] / kTwoPi)), int(std::lround(f[1] / kTwoPi))};
    const IVec2 s{int(std::lround(f[2] / dz)), int(std::lround(f[3] / dz))};
    if (inorm_inf(k) > tab.k_sym || inorm_inf(s) > tab.j) throw FormatError(csv_path + ": row outside the table");
    tab.at(k, s) = {f[4], f[5]};
    ++rows;
  }
  if (rows != tab.values.size()) throw FormatError(csv_path + ": incomplete table");
  return tab;
}

int cmd_pair(const RunConfig& cfg, const RunOptions& opts, const std::string& dir, std::ostream& out) {
  if (opts.table.empty()) throw ValidationError("--table: required for pair");
  if (opts.symbol.empty()) throw ValidationError("--symbol: required for pair");
  const AmbiguityTable tab = load_table(opts.table);
  const BandLimitedSymbol sym = cfg.symbol(opts.symbol, tab.h);
  const cplx w = wigner_pair(sym, tab);
  const cplx avg = liouville_average(sym);
  json j = {{"symbol", opts.symbol},
            {"h", tab.h},
            {"value", {w.real(), w.imag()}},
            {"liouville", {avg.real(), avg.imag()}},
            {"deviation", std::abs(w - avg)}};
  atomic_write(out_path(dir, "pair_" + opts.symbol + ".json"), j.dump(2) + "\n");
  auto os = table_stream();
  os << opts.symbol << ": " << w.real() << (w.imag() < 0 ? " - " : " + ") << std::abs(w.imag()) << "i\n";
  out << os.str();
  return 0;
}

int cmd_oracle_check(const RunConfig& cfg, const std::string& dir, std::ostream& out) {
  const MagneticField b = cfg.magnetic_field();
  if (!constant_field(b) || !cfg.potential.empty())
    throw ValidationError("field.modes: oracle-check needs a constant field and no potential");
  const LandauSpec spec = landau_spectrum(b.mean(), cfg.alpha, cfg.oracle.levels);
  const auto h = assemble(cfg.gauge(), cfg.scalar_potential(), cfg.n);
  const EigenResult res = lowest_eigenpairs(h, spec.phi * cfg.oracle.levels, cfg.solver.tol, solver_options(cfg));
  bool ok = true;
  auto csv = table_stream();
  csv << "index,level,computed,exact,rel_error,cluster_id\n";
  out << "  idx level        computed           exact     rel_error cluster\n";
  for (std::size_t i = 0; i < res.eigenvalues.size(); ++i) {
    const int level = int(i) / spec.phi + 1;
    const double exact = spec.levels[level - 1].lambda;
    const double rel = std::abs(res.eigenvalues[i] - exact) / exact;
    const bool cluster_ok = res.clusters[i] == level - 1;
    ok = ok && rel < cfg.oracle.rel_tol && cluster_ok;
    csv << i << ',' << level << ',' << res.eigenvalues[i] << ',' << exact << ',' << rel << ',' << res.clusters[i]
        << '\n';
    out << std::setw(5) << i << std::setw(6) << level << std::setw(16) << std::setprecision(10) << res.eigenvalues[i]
        << std::setw(16) << exact << std::setw(14) << std::setprecision(3) << rel << std::setw(8) << res.clusters[i]
        << (rel < cfg.oracle.rel_tol && cluster_ok ? "" : "  MISMATCH") << "\n";
  }
  auto fcsv = table_stream();
  fcsv << "level,p,residual\n";
  for (const auto& lv : spec.levels)
    for (int p = 0; p < spec.phi; ++p) {
      const double r = oracle_residual(h, landau_eigenfunction(spec.b, cfg.alpha, lv.j, p, cfg.n), lv.lambda);
      ok = ok && r < cfg.oracle.rel_tol;
      fcsv << lv.j << ',' << p << ',' << r << '\n';
    }
  atomic_write(out_path(dir, "oracle.csv"), csv.str());
  atomic_write(out_path(dir, "oracle_functions.csv"), fcsv.str());
  out << "oracle-check: " << (ok ? "pass" : "fail") << "\n";
  return ok ? 0 : 2;
}

}  // namespace

int run(const std::string& subcommand, const RunConfig& cfg, const RunOptions& opts, std::ostream& out,
        std::ostream& err) {
  const std::string dir = opts.out_dir.empty() ? cfg.output_dir : opts.out_dir;
  try {
    if (opts.threads < 1) throw ValidationError("--threads: must be at least 1");
    if (subcommand == "spectrum") return cmd_spectrum(cfg, opts, dir, out);
    if (subcommand == "que-scan") return cmd_que_scan(cfg, opts, dir, out, err);
    if (subcommand == "control-check") return cmd_control_check(cfg, opts, dir, out);
    if (subcommand == "classical") return cmd_classical(cfg, dir, out);
    if (subcommand == "ambiguity") return cmd_ambiguity(cfg, opts, dir, out);
    if (subcommand == "pair") return cmd_pair(cfg, opts, dir, out);
    if (subcommand == "oracle-check") return cmd_oracle_check(cfg, dir, out);
    err << "unknown subcommand '" << subcommand << "'\n";
    return 1;
  } catch (const std::exception& e) {
    err << subcommand << ": " << e.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Magnetic Laplacian eigenfunction experiments on the flat torus"};
  app.require_subcommand(1);
  std::string config_path;
  RunOptions opts;
  std::optional<int> n, k;
  std::optional<double> sigma, tol;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out_dir, "output directory (overrides output.dir)");
    sub->add_option("--threads", opts.threads, "worker threads for table and flow scans");
    sub->add_option("--n", n, "grid size");
    sub->add_option("--k", k, "number of eigenpairs");
    sub->add_option("--sigma", sigma, "window centre");
    sub->add_option("--tol", tol, "relative residual tolerance");
  };
  for (const char* name : {"spectrum", "que-scan", "control-check", "classical", "ambiguity", "pair", "oracle-check"})
    add_common(app.add_subcommand(name));
  app.get_subcommand("spectrum")->add_flag("--vectors", opts.vectors, "also write eigenvectors");
  app.get_subcommand("control-check")->add_flag("--expect-pass", opts.expect_pass, "exit 2 on a failing verdict");
  app.get_subcommand("ambiguity")->add_option("--input", opts.input, "wavefunction file")->check(CLI::ExistingFile);
  app.get_subcommand("pair")->add_option("--table", opts.table, "ambiguity CSV")->required();
  app.get_subcommand("pair")->add_option("--symbol", opts.symbol, "symbol name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  const std::string sub = app.get_subcommands().front()->get_name();
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
    if (n) {
      if (*n < 8 || *n % 2) throw ValidationError("--n: must be even and at least 8");
      cfg.n = *n;
    }
    if (k) {
      if (*k < 1) throw ValidationError("--k: must be at least 1");
      cfg.solver.k = *k;
    }
    if (sigma) {
      if (!(*sigma >= 0) || !std::isfinite(*sigma)) throw ValidationError("--sigma: must be finite and non-negative");
      cfg.solver.sigma = *sigma;
    }
    if (tol) {
      if (!(*tol > 0)) throw ValidationError("--tol: must be positive");
      cfg.solver.tol = *tol;
    }
  } catch (const std::exception& e) {
    err << config_path << ": " << e.what() << "\n";
    return 1;
  }
  return run(sub, cfg, opts, out, err);
}

}  // namespace magque
