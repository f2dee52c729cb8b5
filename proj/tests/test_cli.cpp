#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "support/reference.hpp"
#include "tvreg/cli.hpp"
#include "tvreg/error.hpp"

using namespace tvreg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("tvreg_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

std::string read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tvreg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::main(static_cast<int>(argv.size()), argv.data());
}

Dataset draw(Design design, std::size_t n, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.design = design;
  spec.n = n;
  spec.seed = seed;
  return simulate(spec).first;
}

std::vector<std::vector<std::string>> rows(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  std::stringstream lines(csv);
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(',', start);
      fields.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    out.push_back(fields);
  }
  return out;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("csv ingestion: series and datasets") {
  const auto series = cli::parse_csv("date,value\n2020-01-02,1.5\n2020-01-03,1.6\n");
  REQUIRE(std::holds_alternative<std::vector<double>>(series));
  CHECK(std::get<std::vector<double>>(series) == std::vector<double>{1.5, 1.6});

  const auto crlf = cli::parse_csv("date,value\r\n2020-01-02,1.5\r\n2020-01-03,1.6\r\n\r\n");
  CHECK(std::get<std::vector<double>>(crlf) == std::vector<double>{1.5, 1.6});

  const auto data = cli::parse_csv("y,x1,x2\n1,2,3\n4,5,6e-1\n");
  REQUIRE(std::holds_alternative<Dataset>(data));
  const Dataset& d = std::get<Dataset>(data);
  CHECK(d.size() == 2);
  CHECK(d.dim() == 2);
  CHECK(d.y(1) == 4.0);
  CHECK(d.row(1)[1] == 0.6);
}

TEST_CASE("csv ingestion: errors carry positions") {
  auto expect_parse = [](const std::string& text, std::size_t line, std::size_t column) {
    try {
      cli::parse_csv(text);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == line);
      CHECK(e.column() == column);
    }
  };
  expect_parse("date,value\n1.5,abc\n", 2, 2);
  expect_parse("y,x1\n1,2\n3,\n", 3, 2);
  expect_parse("y,x1\n1,2\n\n3,4\n", 3, 1);
  expect_parse("y,x1\n1,2,3\n", 2, 3);
  expect_parse("y,x1\n1,nan\n", 2, 2);
  expect_parse("a,b\n1,2\n", 1, 1);
  try {
    cli::parse_csv("");
    FAIL("expected EmptyFile");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("EmptyFile") != std::string::npos);
  }
  CHECK_THROWS_AS(cli::parse_csv("y,x1\n"), ParseError);
  CHECK_THROWS_AS(cli::ingest_csv("/nonexistent/file.csv"), ConfigError);
}

TEST_CASE("rate files are differenced") {
  TempDir dir;
  std::string text = "date,value\n";
  for (int i = 0; i < 5257; ++i) text += "d" + std::to_string(i) + "," + cli::format_double(5.0 + 0.001 * i) + "\n";
  write(dir.file("rates.csv"), text);
  const Dataset data = cli::load_dataset(dir.file("rates.csv"));
  CHECK(data.size() == 5256);
  CHECK(data.row(0)[0] == 5.0);
  CHECK(data.y(0) == doctest::Approx(0.001));
}

TEST_CASE("shortest round-trip formatting") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int r = 0; r < 20000; ++r) {
    const std::uint64_t b = bits(rng);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    REQUIRE(same_bits(std::strtod(cli::format_double(v).c_str(), nullptr), v));
  }
  CHECK(cli::format_double(0.1) == "0.1");
  CHECK(cli::format_double(2.0) == "2");
  CHECK(cli::format_double(-0.0) == "-0");
}

TEST_CASE("datasets survive a csv round trip") {
  std::mt19937_64 rng(17);
  for (int r = 0; r < 20; ++r) {
    const Dataset data = ref::random_dataset(rng, 50 + r, 1 + r % 3);
    const auto back = cli::parse_csv(cli::dataset_to_csv(data));
    CHECK(std::get<Dataset>(back) == data);
  }
  const std::vector<double> series{1.0, 2.5, 1e-300, -3.25};
  CHECK(std::get<std::vector<double>>(cli::parse_csv(cli::series_to_csv(series))) == series);
}

TEST_CASE("select: exported data reproduces the in-memory report") {
  TempDir dir;
  const Dataset data = draw(Design::A, 400, 12);
  write(dir.file("a.csv"), cli::dataset_to_csv(data));
  cli::RunConfig config;
  config.input_path = dir.file("a.csv");
  config.region_x = std::vector<Interval>{{-2.0, 2.0}};

  const Region region = cli::resolve_region(config, data);
  const auto [c_mem, mem] = select_tau_cv(data, region, default_bandwidths(data), CvPlan{}, epanechnikov());
  CHECK(cli::cmd_select(config) == cli::report_to_csv(mem));
  config.format = cli::Format::Json;
  const std::string json_text = cli::cmd_select(config);
  CHECK(json_text == cli::report_to_json(mem, region));

  const auto doc = nlohmann::json::parse(json_text);
  CHECK(doc["chosen"] == std::string(to_string(mem.chosen)));
  CHECK(same_bits(doc["tau"].get<double>(), mem.tau));
  CHECK(same_bits(doc["cv"]["c_hat"].get<double>(), c_mem));
  CHECK(same_bits(doc["bandwidths"]["h_I"].get<double>(), mem.bandwidths.h_I));
  for (std::size_t m = 0; m < 4; ++m) {
    CHECK(same_bits(doc["models"][m]["gic"].get<double>(), mem.models[m].gic));
    CHECK(same_bits(doc["models"][m]["df"].get<double>(), mem.models[m].df));
  }

  const auto table = rows(cli::report_to_csv(mem));
  REQUIRE(table.size() == 5);
  CHECK(table[0] == std::vector<std::string>{"model", "log_rss_over_n", "df", "gic", "selected"});
  for (std::size_t m = 0; m < 4; ++m) CHECK(same_bits(std::stod(table[m + 1][3]), mem.models[m].gic));
}

TEST_CASE("select: noise-free linear data") {
  TempDir dir;
  std::string text = "y,x1\n";
  for (int i = 0; i < 200; ++i) {
    const double x = std::sin(0.7 * i) * 2;
    text += cli::format_double(2 + 3 * x) + "," + cli::format_double(x) + "\n";
  }
  write(dir.file("lin.csv"), text);
  cli::RunConfig config;
  config.input_path = dir.file("lin.csv");
  const auto table = rows(cli::cmd_select(config));
  CHECK(table[4][0] == "IV");
  CHECK(table[4][2] == "2");
  CHECK(table[4][4] == "1");
  config.intercept = false;
  CHECK(rows(cli::cmd_select(config))[4][2] == "1");
}

TEST_CASE("study output") {
  cli::RunConfig config;
  config.command = cli::Command::Study;
  config.designs = {Design::B};
  config.sizes = {250};
  config.noise = {1.0};
  config.replications = 5;
  const std::string first = cli::cmd_study(config);
  const auto table = rows(first);
  REQUIRE(table.size() == 2);
  CHECK(table[0].front() == "n");
  CHECK(table[1][0] == "250");
  CHECK(table[1][1] == "b");
  CHECK(table[1][3] == "5");
  CHECK(table[1][4] == "20150601");
  CHECK(cli::cmd_study(config) == first);

  config.format = cli::Format::Json;
  const auto doc = nlohmann::json::parse(cli::cmd_study(config));
  CHECK(doc["cells"].size() == 1);
  CHECK(doc["base_seed"] == 20150601);

  config.full_scale = true;
  config.replications.reset();
  config.designs.clear();
  config.sizes.clear();
  config.noise.clear();
  const StudyGrid grid = cli::resolve_grid(config);
  CHECK(grid.replications == 1000);
  CHECK(grid.sample_sizes.back() == 2000);
}

TEST_CASE("fit exports") {
  TempDir dir;
  cli::RunConfig config;
  config.command = cli::Command::Fit;

  std::mt19937_64 rng(1);
  const Dataset base = ref::random_dataset(rng, 300, 1);
  write(dir.file("const.csv"), cli::dataset_to_csv(base.with_y(std::vector<double>(300, 1.75))));
  config.input_path = dir.file("const.csv");
  config.grid_x = {cli::Axis{-1.0, 1.0, 5}};
  config.grid_t = cli::Axis{0.25, 0.75, 4};
  for (ModelKind kind : {ModelKind::I, ModelKind::II, ModelKind::IV}) {
    config.model = kind;
    const auto table = rows(cli::cmd_fit(config));
    REQUIRE(table.size() == 21);
    CHECK(table[0] == std::vector<std::string>{"u1", "t", "m_hat"});
    for (std::size_t r = 1; r < table.size(); ++r) CHECK(std::stod(table[r][2]) == doctest::Approx(1.75).epsilon(1e-12));
  }

  config.model = ModelKind::I;
  config.region_x = std::vector<Interval>{{-1.0, 1.0}};
  config.grid_x = {cli::Axis{3.0, 4.0, 3}};
  for (const auto& row : rows(cli::cmd_fit(config))) {
    if (row[0] == "u1") continue;
    CHECK(row[2].empty());
  }

  GeneratorSpec spec;
  spec.design = Design::C;
  spec.n = 2000;
  spec.seed = 31;
  write(dir.file("c.csv"), cli::dataset_to_csv(simulate(spec).first));
  config.input_path = dir.file("c.csv");
  config.region_x.reset();
  config.model = ModelKind::III;
  config.grid_t = cli::Axis{0.2, 0.8, 61};
  const auto table = rows(cli::cmd_fit(config));
  REQUIRE(table[0] == std::vector<std::string>{"t", "beta0", "beta1"});
  std::vector<double> est, truth;
  for (std::size_t r = 1; r < table.size(); ++r) {
    const double t = std::stod(table[r][0]);
    est.push_back(std::stod(table[r][2]));
    truth.push_back(4 * std::cos(2 * std::numbers::pi * t));
  }
  double me = 0, mt = 0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    me += est[i];
    mt += truth[i];
  }
  me /= static_cast<double>(est.size());
  mt /= static_cast<double>(est.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    sxy += (est[i] - me) * (truth[i] - mt);
    sxx += (est[i] - me) * (est[i] - me);
    syy += (truth[i] - mt) * (truth[i] - mt);
  }
  CHECK(sxy / std::sqrt(sxx * syy) > 0.9);
}

TEST_CASE("bandwidth report") {
  cli::RunConfig config;
  config.n = 5256;
  config.iqr = std::vector<double>{3.419};
  const auto table = rows(cli::cmd_bandwidths(config));
  auto value = [&](const std::string& key) {
    for (const auto& row : table)
      if (row[0] == key) return std::stod(row[1]);
    FAIL("missing " << key);
    return 0.0;
  };
  CHECK(value("df_I") == doctest::Approx(69.54).epsilon(5e-4));
  CHECK(value("df_II") == doctest::Approx(11.10).epsilon(5e-4));
  CHECK(value("df_III") == doctest::Approx(22.19).epsilon(5e-4));
  CHECK(value("df_IV") == 2.0);
  CHECK(value("h_I") == doctest::Approx(0.820).epsilon(0.005));
  CHECK(value("tau") == doctest::Approx(0.00903).epsilon(1e-3));
  config.iqr.reset();
  CHECK_THROWS_AS(cli::cmd_bandwidths(config), ConfigError);
}

TEST_CASE("command line and exit codes") {
  TempDir dir;
  const std::string sim = dir.file("sim.csv");
  CHECK(run_cli({"simulate", "--designs", "d", "--sizes", "300", "--seed", "5", "--output", sim}) == 0);
  CHECK(std::get<Dataset>(cli::ingest_csv(sim)).size() == 300);
  const std::string out = dir.file("report.json");
  CHECK(run_cli({"select", "--input", sim, "--format", "json", "--region-x=-2:2", "--region-t", "0.2:0.8",
                 "--cv-folds", "5", "--c-grid", "0.1,0.4", "--intercept", "on", "--output", out}) == 0);
  CHECK(nlohmann::json::parse(read(out))["cv"]["c_grid"].size() == 2);
  CHECK(run_cli({"bandwidths", "--n", "1024", "--iqr", "1", "--output", dir.file("bw.csv")}) == 0);

  const std::string rates = dir.file("rates.csv");
  CHECK(run_cli({"simulate", "--designs", "diffusion", "--sizes", "600", "--output", rates}) == 0);
  CHECK(run_cli({"select", "--input", rates, "--output", dir.file("rates_report.csv")}) == 0);
  CHECK(run_cli({"fit", "--input", rates, "--model", "II", "--output", dir.file("fit.csv")}) == 0);

  write(dir.file("bad.csv"), "y,x1\n1,2\n3,oops\n");
  CHECK(run_cli({"select", "--input", dir.file("bad.csv")}) == cli::kParseError);
  write(dir.file("empty.csv"), "");
  CHECK(run_cli({"select", "--input", dir.file("empty.csv")}) == cli::kParseError);

  std::string collinear = "y,x1,x2\n";
  for (int i = 0; i < 120; ++i)
    collinear += std::to_string(i % 5) + "," + std::to_string(i % 11) + "," + std::to_string(2 * (i % 11)) + "\n";
  write(dir.file("collinear.csv"), collinear);
  CHECK(run_cli({"select", "--input", dir.file("collinear.csv"), "--output", dir.file("x.csv")}) ==
        cli::kNumericalError);

  CHECK(run_cli({"select", "--input", dir.file("missing.csv")}) == cli::kConfigError);
  CHECK(run_cli({"select", "--input", sim, "--region-x", "3:1"}) == cli::kConfigError);
  CHECK(run_cli({"select", "--input", sim, "--cv-folds", "1"}) == cli::kConfigError);
  CHECK(run_cli({"select", "--input", sim, "--c-grid", "0.1,-2"}) == cli::kConfigError);
  CHECK(run_cli({"study", "--sizes", "50"}) == cli::kConfigError);
  CHECK(run_cli({"study", "--noise", "0"}) == cli::kConfigError);
  CHECK(run_cli({"select", "--input", sim, "--intercept", "maybe"}) == cli::kConfigError);
  CHECK(run_cli({"select"}) == cli::kConfigError);
  CHECK(run_cli({"unknown"}) == cli::kConfigError);
  CHECK(run_cli({"simulate", "--designs", "q"}) == cli::kConfigError);
}
