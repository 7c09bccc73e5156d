#pragma once

// Batch experiments behind the command line tool. Each command reads a
// resolved ExperimentConfig, writes one report to a stream and returns an
// exit code (0 ok, 2 config, 3 non-convergence, 4 I/O). Reports embed the
// config; the only line that differs between identical runs is the
// timestamp ("# generated:" in CSV, "generated_at" in JSON).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <ctime>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "huplab/detail/format.hpp"
#include "huplab/errors.hpp"
#include "huplab/escape.hpp"
#include "huplab/gaussmap.hpp"
#include "huplab/hyperbola_ft.hpp"
#include "huplab/operators.hpp"
#include "huplab/parallel.hpp"
#include "huplab/separation.hpp"
#include "huplab/spectrum.hpp"
#include "huplab/ulam.hpp"

namespace huplab {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNonConvergence = 3, kExitIo = 4 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string command;
  int p = 1;
  int q = 1;
  double beta = 1.0;
  std::vector<double> betas;            // spectrum-scan; resolved from beta / range when empty
  std::optional<double> beta_min, beta_max;
  std::optional<int> beta_steps;
  std::vector<std::int64_t> n_bins{256};
  std::int64_t J = 200;
  std::int64_t n_steps = 20;
  std::int64_t N = 50;
  double tolerance = 1e-10;
  std::uint64_t seed = 20240607;
  std::string method = "exact-intervals";
  std::int64_t samples = 1'000'000;
  double min_piece = 1e-8;
  std::string measure = "singular-pair";  // singular-pair | gaussian | zero | atoms
  std::vector<HyperbolaAtom> atoms;
  std::int64_t k = 1;
  std::int64_t m = 1;
  std::int64_t functions = 100;           // identity-check
  std::int64_t points = 10000;            // identity-check
  std::vector<cplx> z{{0.0, 1.0}, {1.0, 2.0}};  // poisson-check
  std::string output = "-";
  std::string format;                     // csv | json; empty = command default
};

// ---------------------------------------------------------------------------
// Config <-> JSON
// ---------------------------------------------------------------------------

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["command"] = c.command;
  j["p"] = c.p;
  j["q"] = c.q;
  j["beta"] = c.beta;
  j["betas"] = c.betas;
  j["n_bins"] = c.n_bins;
  j["J"] = c.J;
  j["n_steps"] = c.n_steps;
  j["N"] = c.N;
  j["tolerance"] = c.tolerance;
  j["seed"] = c.seed;
  j["method"] = c.method;
  j["samples"] = c.samples;
  j["min_piece"] = c.min_piece;
  j["measure"] = c.measure;
  auto atoms = nlohmann::json::array();
  for (const auto& a : c.atoms) atoms.push_back({{"t", a.t}, {"re", a.weight.real()}, {"im", a.weight.imag()}});
  j["atoms"] = atoms;
  j["k"] = c.k;
  j["m"] = c.m;
  j["functions"] = c.functions;
  j["points"] = c.points;
  auto zs = nlohmann::json::array();
  for (const auto& z : c.z) zs.push_back({z.real(), z.imag()});
  j["z"] = zs;
  j["output"] = c.output;
  j["format"] = c.format;
  return j;
}

namespace detail {

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace detail

// Fields absent from the JSON keep their current values.
inline void apply_json(ExperimentConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  using detail::read_field;
  read_field(j, "command", c.command);
  read_field(j, "p", c.p);
  read_field(j, "q", c.q);
  read_field(j, "beta", c.beta);
  read_field(j, "betas", c.betas);
  if (j.contains("beta_min")) c.beta_min = j.at("beta_min").get<double>();
  if (j.contains("beta_max")) c.beta_max = j.at("beta_max").get<double>();
  if (j.contains("beta_steps")) c.beta_steps = j.at("beta_steps").get<int>();
  if (j.contains("n_bins")) {
    if (j.at("n_bins").is_array()) read_field(j, "n_bins", c.n_bins);
    else c.n_bins = {j.at("n_bins").get<std::int64_t>()};
  }
  read_field(j, "J", c.J);
  read_field(j, "n_steps", c.n_steps);
  read_field(j, "N", c.N);
  read_field(j, "tolerance", c.tolerance);
  read_field(j, "seed", c.seed);
  read_field(j, "method", c.method);
  read_field(j, "samples", c.samples);
  read_field(j, "min_piece", c.min_piece);
  read_field(j, "measure", c.measure);
  if (j.contains("atoms")) {
    c.atoms.clear();
    for (const auto& a : j.at("atoms"))
      c.atoms.push_back({a.at("t").get<double>(), {a.value("re", 0.0), a.value("im", 0.0)}});
  }
  read_field(j, "k", c.k);
  read_field(j, "m", c.m);
  read_field(j, "functions", c.functions);
  read_field(j, "points", c.points);
  if (j.contains("z")) {
    c.z.clear();
    for (const auto& z : j.at("z")) c.z.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
  }
  read_field(j, "output", c.output);
  read_field(j, "format", c.format);
}

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"spectrum-scan", "escape", "cross-residual",
                                              "separate", "identity-check", "poisson-check"};
  return names;
}

// Fills derived fields and checks documented bounds.
inline void resolve_config(ExperimentConfig& c) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), c.command) == names.end())
    throw ConfigError("unknown command '" + c.command + "'");
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(c.p >= 1 && c.p <= 1000, "p must be in [1, 1000]");
  require(std::isfinite(c.beta) && c.beta > 0.0, "beta must be positive and finite");
  require(c.J >= 2 && c.J <= 100'000'000, "J must be in [2, 1e8]");
  require(c.n_steps >= 1 && c.n_steps <= 200, "n_steps must be in [1, 200]");
  require(c.N >= 0 && c.N <= 1'000'000, "N must be in [0, 1e6]");
  require(c.tolerance > 0.0 && c.tolerance < 1.0, "tolerance must be in (0, 1)");
  require(c.samples >= 1, "samples must be positive");
  require(c.min_piece > 0.0, "min_piece must be positive");
  require(c.k != 0 && c.m != 0, "k and m must be nonzero");
  require(c.functions >= 1 && c.points >= 1, "functions and points must be positive");
  require(c.method == "exact-intervals" || c.method == "monte-carlo",
          "method must be exact-intervals or monte-carlo");
  for (auto n : c.n_bins) require(n >= 2 && n <= 1'000'000, "n_bins entries must be in [2, 1e6]");
  for (auto z : c.z) require(z.imag() > 0.0, "poisson-check points need Im z > 0");

  if (c.command == "spectrum-scan" && c.betas.empty()) {
    if (c.beta_steps) {
      require(*c.beta_steps >= 0, "beta_steps must be >= 0");
      require(c.beta_min.has_value() && c.beta_max.has_value(), "beta range needs beta_min and beta_max");
      for (int i = 0; i < *c.beta_steps; ++i) {
        const double t = *c.beta_steps == 1 ? 0.0 : static_cast<double>(i) / (*c.beta_steps - 1);
        c.betas.push_back(*c.beta_min + t * (*c.beta_max - *c.beta_min));
      }
    } else {
      c.betas = {c.beta};
    }
  }
  for (double b : c.betas) require(std::isfinite(b) && b > 0.0, "betas must be positive");

  if (c.format.empty()) {
    const bool csv = c.command == "spectrum-scan" || c.command == "escape";
    c.format = csv ? "csv" : "json";
  }
  require(c.format == "csv" || c.format == "json", "format must be csv or json");
  if (c.format == "csv")
    require(c.command == "spectrum-scan" || c.command == "escape" || c.command == "cross-residual",
            c.command + " only writes json");
  if (c.command == "cross-residual") {
    require(c.measure == "singular-pair" || c.measure == "gaussian" || c.measure == "zero" || c.measure == "atoms",
            "measure must be singular-pair, gaussian, zero or atoms");
    if (c.measure == "atoms")
      for (const auto& a : c.atoms) require(a.t != 0.0 && std::isfinite(a.t), "atoms need t != 0");
  }
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace detail {

inline void csv_preamble(std::ostream& os, const ExperimentConfig& c) {
  os << "# huplab " << c.command << '\n';
  os << "# config: " << config_to_json(c).dump() << '\n';
  os << "# generated: " << utc_timestamp() << '\n';
}

inline nlohmann::json json_preamble(const ExperimentConfig& c) {
  nlohmann::json j;
  j["command"] = c.command;
  j["config"] = config_to_json(c);
  j["generated_at"] = utc_timestamp();
  return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// spectrum-scan
// ---------------------------------------------------------------------------

struct SpectrumRow {
  double beta;
  std::int64_t n_bins;
  std::int64_t J;
  double spectral_radius = NAN;
  cplx second_eigenvalue{NAN, 0.0};
  double tail_bound = NAN;
  double edge_mass = NAN;
  std::string method;
  std::string status = "ok";
};

inline std::vector<SpectrumRow> run_spectrum_scan(const ExperimentConfig& c) {
  std::vector<SpectrumRow> rows;
  for (double b : c.betas)
    for (auto n : c.n_bins) rows.push_back({b, n, c.J});
  parallel_for(rows.size(), [&](std::size_t i) {
    auto& r = rows[i];
    try {
      const UlamMatrix m = ulam_assemble(static_cast<std::size_t>(r.n_bins), MapParams(c.p, r.beta), r.J);
      r.tail_bound = m.tail_mass_bound;
      SpectrumOptions opt;
      opt.seed = c.seed;
      const SpectrumReport s = spectral_top(m, 2, opt);
      r.spectral_radius = s.spectral_radius;
      if (s.eigenvalues.size() > 1) r.second_eigenvalue = s.eigenvalues[1];
      r.edge_mass = edge_mass_fraction(s.leading_vector, m.grid());
      r.method = to_string(s.method);
    } catch (const ConvergenceError& e) {
      r.status = "nonconvergent";
      r.spectral_radius = std::abs(e.best_estimate());
    }
  });
  return rows;
}

inline int cmd_spectrum_scan(const ExperimentConfig& c, std::ostream& os) {
  using detail::format_double;
  const auto rows = run_spectrum_scan(c);
  bool failed = false;
  if (c.format == "csv") {
    detail::csv_preamble(os, c);
    os << "beta,n_bins,J,spectral_radius,second_eigenvalue,second_eigenvalue_im,tail_bound,edge_mass,method,status\n";
    for (const auto& r : rows) {
      os << format_double(r.beta) << ',' << r.n_bins << ',' << r.J << ',' << format_double(r.spectral_radius)
         << ',' << format_double(r.second_eigenvalue.real()) << ',' << format_double(r.second_eigenvalue.imag())
         << ',' << format_double(r.tail_bound) << ',' << format_double(r.edge_mass) << ',' << r.method << ','
         << r.status << '\n';
      failed |= r.status != "ok";
    }
  } else {
    auto j = detail::json_preamble(c);
    auto arr = nlohmann::json::array();
    for (const auto& r : rows) {
      arr.push_back({{"beta", r.beta}, {"n_bins", r.n_bins}, {"J", r.J}, {"spectral_radius", r.spectral_radius},
                     {"second_eigenvalue", to_json(r.second_eigenvalue)}, {"tail_bound", r.tail_bound},
                     {"edge_mass", r.edge_mass}, {"method", r.method}, {"status", r.status}});
      failed |= r.status != "ok";
    }
    j["rows"] = arr;
    os << j.dump(2) << '\n';
  }
  return failed ? kExitNonConvergence : kExitOk;
}

// ---------------------------------------------------------------------------
// escape
// ---------------------------------------------------------------------------

inline int cmd_escape(const ExperimentConfig& c, std::ostream& os) {
  using detail::format_double;
  EscapeOptions opt;
  opt.method = c.method == "monte-carlo" ? EscapeMethod::monte_carlo : EscapeMethod::exact_intervals;
  opt.min_piece = c.min_piece;
  opt.samples = static_cast<std::size_t>(c.samples);
  opt.seed = c.seed;
  const auto rows = escape_profile(static_cast<std::size_t>(c.n_steps), MapParams(c.p, c.beta), opt);
  if (c.format == "csv") {
    detail::csv_preamble(os, c);
    os << "n,measure,error_bound\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
      os << i + 1 << ',' << format_double(rows[i].measure) << ',' << format_double(rows[i].error_bound) << '\n';
  } else {
    auto j = detail::json_preamble(c);
    auto arr = nlohmann::json::array();
    for (std::size_t i = 0; i < rows.size(); ++i)
      arr.push_back({{"n", i + 1}, {"measure", rows[i].measure}, {"error_bound", rows[i].error_bound}});
    j["rows"] = arr;
    os << j.dump(2) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// cross-residual
// ---------------------------------------------------------------------------

inline int cmd_cross_residual(const ExperimentConfig& c, std::ostream& os) {
  HyperbolaMeasure mu = HyperbolaMeasure::zero();
  nlohmann::json described{{"kind", c.measure}};
  bool degenerate = false;
  if (c.measure == "gaussian") {
    mu = HyperbolaMeasure::gaussian();
  } else if (c.measure == "atoms") {
    mu = HyperbolaMeasure::from_atoms(c.atoms);
  } else if (c.measure == "singular-pair") {
    const auto pair = singular_pair(c.p, c.beta, c.k, c.m);
    if (!pair) {
      described["pair"] = "none";
    } else {
      mu = pair_measure(*pair);
      degenerate = pair->degenerate;
      described["pair"] = {{"u0", pair->u0}, {"v0", pair->v0}, {"k", c.k}, {"m", c.m}};
    }
  }
  const LatticeCross cross(c.p, c.q, c.beta, c.N);
  const CrossReport rep = ft_on_cross(mu, cross, c.tolerance);
  const bool zero = mu.kind() == HyperbolaMeasure::Kind::atoms && mu.atoms().empty();
  // Machine-precision phases over |n| <= N leave residuals of order N * 1e-15.
  const double vanish = 1e-12 + 10.0 * c.tolerance;
  const std::string verdict = zero ? "zero-measure" : rep.max_modulus < vanish ? "annihilating" : "non-vanishing";

  if (c.format == "csv") {
    detail::csv_preamble(os, c);
    write_cross_csv(os, rep);
    return kExitOk;
  }
  auto j = detail::json_preamble(c);
  j["measure"] = described;
  j["degenerate"] = degenerate;
  j["cross"] = {{"p", cross.p()}, {"q", cross.q()}, {"beta", cross.beta()}, {"N", cross.window()},
                {"points", rep.rows.size()}};
  auto arr = nlohmann::json::array();
  for (const auto& r : rep.rows)
    arr.push_back({{"axis", std::string(1, r.point.axis)}, {"index", r.point.index}, {"xi1", r.point.xi1},
                   {"xi2", r.point.xi2}, {"re", r.value.real()}, {"im", r.value.imag()},
                   {"abs", std::abs(r.value)}, {"quad_error", r.quad_error}});
  j["residuals"] = arr;
  j["max_modulus"] = rep.max_modulus;
  j["vanishing_threshold"] = vanish;
  j["verdict"] = verdict;
  os << j.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// separate
// ---------------------------------------------------------------------------

inline int cmd_separate(const ExperimentConfig& c, std::ostream& os) {
  auto j = detail::json_preamble(c);
  j["report"] = separation_report(c.p, c.beta, c.N, std::max(c.tolerance, 1e-12));
  os << j.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// identity-check: T_beta S = C_beta^2 and I - T_beta S = (I + C_beta)(I - C_beta)
// ---------------------------------------------------------------------------

// Random complex piecewise-linear function on (-p, p].
class PiecewiseLinear {
 public:
  PiecewiseLinear(std::vector<double> knots, std::vector<cplx> values)
      : knots_(std::move(knots)), values_(std::move(values)) {}

  static PiecewiseLinear random(std::mt19937_64& rng, double p, std::size_t pieces) {
    std::uniform_real_distribution<double> pos(-p, p), val(-1.0, 1.0);
    std::vector<double> knots{-p, p};
    for (std::size_t i = 1; i < pieces; ++i) knots.push_back(pos(rng));
    std::sort(knots.begin(), knots.end());
    std::vector<cplx> values;
    for (std::size_t i = 0; i < knots.size(); ++i) values.emplace_back(val(rng), val(rng));
    return {std::move(knots), std::move(values)};
  }

  cplx operator()(double x) const {
    if (x <= knots_.front() || x > knots_.back()) return {};
    const auto it = std::lower_bound(knots_.begin(), knots_.end(), x);
    const auto i = static_cast<std::size_t>(it - knots_.begin());
    const double t = (x - knots_[i - 1]) / (knots_[i] - knots_[i - 1]);
    return values_[i - 1] + t * (values_[i] - values_[i - 1]);
  }

 private:
  std::vector<double> knots_;
  std::vector<cplx> values_;
};

// Uniform points in (-p, p] that stay clear of branch endpoints.
inline std::vector<double> random_safe_points(std::mt19937_64& rng, const MapParams& params, std::size_t count) {
  std::uniform_real_distribution<double> pos(-params.pd(), params.pd());
  std::vector<double> pts;
  pts.reserve(count);
  while (pts.size() < count) {
    const double x = pos(rng);
    if (params.in_domain(x) && !near_branch_endpoint(x, params, 1e-9) &&
        !(params.in_window(x) && near_branch_endpoint(gauss_u(x, params), params, 1e-9)))
      pts.push_back(x);
  }
  return pts;
}

struct IdentityCheck {
  double ts_residual = 0.0;
  double factorization_residual = 0.0;
};

inline IdentityCheck run_identity_check(const MapParams& params, std::size_t functions, std::size_t points,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto pts = random_safe_points(rng, params, points);
  std::vector<PiecewiseLinear> fns;
  for (std::size_t i = 0; i < functions; ++i) fns.push_back(PiecewiseLinear::random(rng, params.pd(), 8));
  std::vector<IdentityCheck> per(functions);
  parallel_for(functions, [&](std::size_t i) {
    per[i].ts_residual = ts_koopman_residual(fns[i], pts, params);
    per[i].factorization_residual = factorization_residual(fns[i], pts, params);
  });
  IdentityCheck out;
  for (const auto& r : per) {
    out.ts_residual = std::max(out.ts_residual, r.ts_residual);
    out.factorization_residual = std::max(out.factorization_residual, r.factorization_residual);
  }
  return out;
}

inline int cmd_identity_check(const ExperimentConfig& c, std::ostream& os) {
  const auto r = run_identity_check(MapParams(c.p, c.beta), static_cast<std::size_t>(c.functions),
                                    static_cast<std::size_t>(c.points), c.seed);
  auto j = detail::json_preamble(c);
  const double tol = 1e-12;
  j["ts_equals_koopman_squared"] = {{"max_residual", r.ts_residual}, {"tolerance", tol},
                                    {"pass", r.ts_residual < tol}};
  j["factorization"] = {{"max_residual", r.factorization_residual}, {"tolerance", tol},
                        {"pass", r.factorization_residual < tol}};
  os << j.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// poisson-check
// ---------------------------------------------------------------------------

inline int cmd_poisson_check(const ExperimentConfig& c, std::ostream& os) {
  const double tol = 1e-6;
  const std::int64_t window = std::min<std::int64_t>(c.N, 3);
  struct Row {
    std::string family;
    std::int64_t n;
    cplx z, poisson, closed;
    double error;
  };
  std::vector<Row> rows;
  for (const cplx& z : c.z)
    for (std::int64_t n = -window; n <= window; ++n) {
      rows.push_back({"ep", n, z, {}, {}, 0.0});
      rows.push_back({"ebeta", n, z, {}, {}, 0.0});
    }
  bool failed = false;
  std::vector<char> nonconv(rows.size(), 0);
  parallel_for(rows.size(), [&](std::size_t i) {
    auto& r = rows[i];
    const bool ep = r.family == "ep";
    const BoundaryData data = ep ? BoundaryData::ep(r.n, c.p) : BoundaryData::ebeta(r.n, c.beta);
    r.closed = ep ? ext_ep(r.n, c.p, r.z) : ext_ebeta(r.n, c.beta, r.z);
    try {
      const auto v = poisson_extend(data, r.z, std::min(c.tolerance * 10.0, 1e-8));
      r.poisson = v.value;
      r.error = v.error;
    } catch (const ConvergenceError& e) {
      r.poisson = e.best_estimate();
      r.error = e.residual();
      nonconv[i] = 1;
    }
  });
  auto j = detail::json_preamble(c);
  auto arr = nlohmann::json::array();
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double diff = std::abs(r.poisson - r.closed);
    worst = std::max(worst, diff);
    failed |= nonconv[i] != 0;
    arr.push_back({{"family", r.family}, {"n", r.n}, {"z", to_json(r.z)}, {"poisson", to_json(r.poisson)},
                   {"case_split", to_json(r.closed)}, {"difference", diff}, {"quad_error", r.error}});
  }
  j["rows"] = arr;
  j["max_difference"] = worst;
  j["tolerance"] = tol;
  j["pass"] = worst < tol && !failed;
  os << j.dump(2) << '\n';
  return failed ? kExitNonConvergence : kExitOk;
}

inline int run_command(const ExperimentConfig& c, std::ostream& os) {
  if (c.command == "spectrum-scan") return cmd_spectrum_scan(c, os);
  if (c.command == "escape") return cmd_escape(c, os);
  if (c.command == "cross-residual") return cmd_cross_residual(c, os);
  if (c.command == "separate") return cmd_separate(c, os);
  if (c.command == "identity-check") return cmd_identity_check(c, os);
  if (c.command == "poisson-check") return cmd_poisson_check(c, os);
  throw ConfigError("unknown command '" + c.command + "'");
}

}  // namespace huplab
