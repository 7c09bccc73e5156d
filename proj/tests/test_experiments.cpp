#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "huplab/detail/format.hpp"
#include "huplab/experiments.hpp"

using namespace huplab;

namespace {

ExperimentConfig make(const std::string& command) {
  ExperimentConfig c;
  c.command = command;
  return c;
}

std::string run(ExperimentConfig c, int* rc = nullptr) {
  resolve_config(c);
  std::ostringstream os;
  const int code = run_command(c, os);
  if (rc) *rc = code;
  return os.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> out;
  for (auto& l : lines(csv))
    if (!l.empty() && l[0] != '#') out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string f; std::getline(is, f, ',');) out.push_back(f);
  return out;
}

std::string strip_timestamps(const std::string& s) {
  std::string out;
  for (auto& l : lines(s))
    if (l.rfind("# generated:", 0) != 0 && l.find("\"generated_at\"") == std::string::npos) out += l + '\n';
  return out;
}

}  // namespace

TEST(Format, SeventeenDigitsRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 2.0 * std::log(2.0) - 1.0, 1e-300, -7.5e22}) {
    const std::string s = detail::format_double(v);
    EXPECT_EQ(detail::parse_double(s), v) << s;
    EXPECT_EQ(s.find(','), std::string::npos);
  }
  EXPECT_EQ(detail::format_double(1.0), "1");
  EXPECT_THROW(detail::parse_double("abc"), std::invalid_argument);
}

TEST(Config, JsonAndValidation) {
  ExperimentConfig c;
  apply_json(c, nlohmann::json::parse(R"({"command":"escape","p":2,"beta":0.75,"n_steps":5,"seed":9})"));
  EXPECT_EQ(c.p, 2);
  EXPECT_EQ(c.seed, 9u);
  resolve_config(c);
  EXPECT_EQ(c.format, "csv");
  const auto j = config_to_json(c);
  ExperimentConfig d;
  apply_json(d, j);
  EXPECT_EQ(config_to_json(d), j);

  auto bad = [](const char* text) {
    ExperimentConfig e;
    apply_json(e, nlohmann::json::parse(text));
    resolve_config(e);
  };
  EXPECT_THROW(bad(R"({"command":"nope"})"), ConfigError);
  EXPECT_THROW(bad(R"({"command":"escape","p":0})"), ConfigError);
  EXPECT_THROW(bad(R"({"command":"escape","beta":-1})"), ConfigError);
  EXPECT_THROW(bad(R"({"command":"escape","method":"guess"})"), ConfigError);
  EXPECT_THROW(bad(R"({"command":"separate","format":"csv"})"), ConfigError);
  EXPECT_THROW(bad(R"({"command":"spectrum-scan","beta_steps":3})"), ConfigError);
  EXPECT_THROW(bad(R"({"command":"escape","p":"one"})"), ConfigError);
}

TEST(Config, BetaRange) {
  auto c = make("spectrum-scan");
  c.beta_min = 0.5;
  c.beta_max = 2.0;
  c.beta_steps = 4;
  resolve_config(c);
  ASSERT_EQ(c.betas.size(), 4u);
  EXPECT_EQ(c.betas.front(), 0.5);
  EXPECT_EQ(c.betas.back(), 2.0);
}

TEST(SpectrumScan, TwoBinRow) {
  auto c = make("spectrum-scan");
  c.n_bins = {2};
  const auto rows = data_rows(run(c));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "beta,n_bins,J,spectral_radius,second_eigenvalue,second_eigenvalue_im,tail_bound,edge_mass,method,status");
  const auto f = split(rows[1]);
  EXPECT_NEAR(detail::parse_double(f[3]), 1.0, 1e-12);
  EXPECT_NEAR(detail::parse_double(f[4]), 2.0 * std::log(2.0) - 1.0, 1e-12);
  EXPECT_EQ(f[9], "ok");
}

TEST(SpectrumScan, EmptyRangeIsHeaderOnly) {
  auto c = make("spectrum-scan");
  c.beta_min = 1.0;
  c.beta_max = 2.0;
  c.beta_steps = 0;
  int rc = -1;
  const auto rows = data_rows(run(c, &rc));
  EXPECT_EQ(rc, 0);
  EXPECT_EQ(rows.size(), 1u);
}

TEST(SpectrumScan, RowsInParameterOrderAndRadiiGrow) {
  auto c = make("spectrum-scan");
  c.p = 2;
  c.betas = {0.5, 1.0, 1.5, 2.0};
  c.n_bins = {256, 64};
  const auto rows = data_rows(run(c));
  ASSERT_EQ(rows.size(), 9u);
  double last = 0.0;
  for (std::size_t i = 1; i < rows.size(); i += 2) {
    const auto f = split(rows[i]);
    EXPECT_EQ(detail::parse_double(f[0]), c.betas[(i - 1) / 2]);
    EXPECT_EQ(f[1], "256");
    EXPECT_EQ(split(rows[i + 1])[1], "64");
    const double r = detail::parse_double(f[3]);
    EXPECT_GT(r, last);
    last = r;
  }
  EXPECT_NEAR(last, 1.0, 1e-9);
}

TEST(Escape, Columns) {
  auto c = make("escape");
  c.beta = 0.5;
  const auto rows = data_rows(run(c));
  ASSERT_EQ(rows.size(), 21u);
  EXPECT_EQ(rows[0], "n,measure,error_bound");
  EXPECT_EQ(split(rows[1])[1], "1");
  double last = INFINITY;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double v = detail::parse_double(split(rows[i])[1]);
    EXPECT_LT(v, last);
    last = v;
  }
  c.beta = 1.0;
  c.n_steps = 3;
  const auto full = data_rows(run(c));
  for (std::size_t i = 1; i < full.size(); ++i) EXPECT_EQ(split(full[i])[1], "2");
}

TEST(CrossResidual, Verdicts) {
  auto c = make("cross-residual");
  c.p = 2;
  c.beta = 1.0;
  c.N = 100;
  auto j = nlohmann::json::parse(run(c));
  EXPECT_EQ(j["verdict"], "annihilating");
  EXPECT_LT(j["max_modulus"].get<double>(), 1e-12);
  EXPECT_EQ(j["config"]["seed"], c.seed);
  c.measure = "gaussian";
  c.N = 4;
  j = nlohmann::json::parse(run(c));
  EXPECT_EQ(j["verdict"], "non-vanishing");
  c.measure = "zero";
  j = nlohmann::json::parse(run(c));
  EXPECT_EQ(j["verdict"], "zero-measure");
  EXPECT_EQ(j["max_modulus"].get<double>(), 0.0);
  c.measure = "atoms";
  c.atoms = {{1.0, 1.0}};
  j = nlohmann::json::parse(run(c));
  EXPECT_EQ(j["verdict"], "non-vanishing");
}

TEST(Separate, Examples) {
  auto c = make("separate");
  c.p = 1;
  c.beta = 2.0;
  auto j = nlohmann::json::parse(run(c))["report"];
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_NEAR(j["solution"]["z1"]["re"].get<double>(), 1.0, 1e-15);
  EXPECT_NEAR(j["solution"]["z1"]["im"].get<double>(), 1.0, 1e-15);
  c.p = 3;
  EXPECT_EQ(nlohmann::json::parse(run(c))["report"]["solution"], "none");
  c.p = 2;
  c.beta = 4.0;
  j = nlohmann::json::parse(run(c))["report"];
  EXPECT_NEAR(j["solution"]["z1"]["re"].get<double>(), 2.0, 1e-15);
  EXPECT_NEAR(j["solution"]["z1"]["im"].get<double>(), 2.0, 1e-15);
}

TEST(IdentityAndPoisson, Pass) {
  auto c = make("identity-check");
  c.beta = 0.6;
  c.functions = 10;
  c.points = 2000;
  auto j = nlohmann::json::parse(run(c));
  EXPECT_TRUE(j["ts_equals_koopman_squared"]["pass"].get<bool>());
  EXPECT_TRUE(j["factorization"]["pass"].get<bool>());
  auto d = make("poisson-check");
  d.p = 2;
  j = nlohmann::json::parse(run(d));
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(j["rows"].size(), 2u * 7u * 2u);
}

TEST(Determinism, RepeatableAndThreadIndependent) {
  auto a = make("spectrum-scan");
  a.betas = {0.4, 0.9};
  a.n_bins = {64, 128};
  auto b = make("identity-check");
  b.functions = 8;
  b.points = 500;
  auto e = make("escape");
  e.method = "monte-carlo";
  e.samples = 20000;
  e.beta = 0.5;
  for (auto& c : {a, b, e}) {
    setenv("HUPLAB_THREADS", "1", 1);
    const auto one = strip_timestamps(run(c));
    setenv("HUPLAB_THREADS", "4", 1);
    const auto four = strip_timestamps(run(c));
    unsetenv("HUPLAB_THREADS");
    EXPECT_EQ(one, four) << c.command;
    EXPECT_EQ(strip_timestamps(run(c)), one) << c.command;
  }
}
