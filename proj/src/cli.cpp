#include "tvreg/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tvreg/error.hpp"
#include "tvreg/parallel.hpp"

namespace tvreg::cli {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

double parse_config_double(std::string_view s, const char* what) {
  if (auto v = to_double(s)) return *v;
  throw ConfigError(std::string("cannot parse ") + what + " '" + std::string(s) + "'");
}

Interval parse_interval(std::string_view s) {
  const auto parts = split(s, ':');
  if (parts.size() != 2) throw ConfigError("interval must be lo:hi, got '" + std::string(s) + "'");
  Interval iv{parse_config_double(parts[0], "interval bound"), parse_config_double(parts[1], "interval bound")};
  if (!(iv.lo < iv.hi)) throw ConfigError("interval must satisfy lo < hi, got '" + std::string(s) + "'");
  return iv;
}

Axis parse_axis(std::string_view s) {
  const auto parts = split(s, ':');
  if (parts.size() != 3) throw ConfigError("lattice must be lo:hi:count, got '" + std::string(s) + "'");
  Axis axis;
  axis.lo = parse_config_double(parts[0], "lattice bound");
  axis.hi = parse_config_double(parts[1], "lattice bound");
  const double count = parse_config_double(parts[2], "lattice count");
  if (!(count >= 1.0) || count != std::floor(count)) throw ConfigError("lattice count must be a positive integer");
  axis.count = static_cast<std::size_t>(count);
  if (axis.count > 1 && !(axis.lo < axis.hi)) throw ConfigError("lattice must satisfy lo < hi");
  return axis;
}

std::vector<double> parse_double_list(std::string_view s, const char* what) {
  std::vector<double> out;
  for (auto part : split(s, ',')) out.push_back(parse_config_double(part, what));
  return out;
}

void write_output(const RunConfig& config, const std::string& text) {
  if (!config.output_path) {
    std::cout << text;
    return;
  }
  std::ofstream out(*config.output_path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + *config.output_path + "'");
  out << text;
  if (!out) throw ConfigError("failed writing output file '" + *config.output_path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open input file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json plan_to_json(const BandwidthPlan& plan) {
  return json{{"n", plan.n},
              {"d", plan.d},
              {"b_I", plan.b_I},
              {"h_I", plan.h_I},
              {"h_II", plan.h_II},
              {"b_III", plan.b_III},
              {"c_b_I", plan.constants.c_b_I},
              {"c_h_I", plan.constants.c_h_I},
              {"c_h_II", plan.constants.c_h_II},
              {"c_b_III", plan.constants.c_b_III},
              {"iqr", plan.iqr}};
}

json region_to_json(const Region& region) {
  json box = json::array();
  for (const auto& iv : region.x_box) box.push_back({iv.lo, iv.hi});
  return json{{"x", box}, {"t", {region.t_interval.lo, region.t_interval.hi}}};
}

std::string missing_or(std::optional<double> v) { return v ? format_double(*v) : std::string(); }

}  // namespace

std::vector<double> Axis::points() const {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

// ------------------------------------------------------------------- CSV

Ingested parse_csv(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw ParseError(1, 1, "EmptyFile: no header row");

  std::string_view header = trim(lines[0]);
  if (header.size() >= 3 && static_cast<unsigned char>(header[0]) == 0xEF) header.remove_prefix(3);
  const auto columns = split(header, ',');
  const bool series = trim(columns[0]) == "date";
  if (series) {
    if (columns.size() != 2 || trim(columns[1]) != "value")
      throw ParseError(1, 1, "series header must be 'date,value'");
  } else if (trim(columns[0]) != "y" || columns.size() < 2) {
    throw ParseError(1, 1, "header must be 'date,value' or 'y,x1,...,xd'");
  }
  if (lines.size() < 2) throw ParseError(1, 1, "EmptyFile: header without data rows");

  const std::size_t width = columns.size();
  std::vector<double> values;
  std::vector<double> y, x;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const std::size_t line_no = l + 1;
    if (trim(lines[l]).empty()) throw ParseError(line_no, 1, "empty row");
    const auto fields = split(lines[l], ',');
    if (fields.size() != width)
      throw ParseError(line_no, std::min(fields.size(), width) + 1,
                       "expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));
    for (std::size_t c = series ? 1 : 0; c < width; ++c) {
      if (trim(fields[c]).empty()) throw ParseError(line_no, c + 1, "empty value field");
      const auto v = to_double(fields[c]);
      if (!v) throw ParseError(line_no, c + 1, "not a number: '" + std::string(trim(fields[c])) + "'");
      if (!std::isfinite(*v)) throw ParseError(line_no, c + 1, "non-finite value");
      if (series)
        values.push_back(*v);
      else if (c == 0)
        y.push_back(*v);
      else
        x.push_back(*v);
    }
  }
  if (series) return values;
  return Dataset(std::move(y), std::move(x), width - 1);
}

Ingested ingest_csv(const std::string& path) { return parse_csv(read_file(path)); }

Dataset load_dataset(const std::string& path) {
  Ingested in = ingest_csv(path);
  if (auto* series = std::get_if<std::vector<double>>(&in)) return difference_rates(*series);
  return std::get<Dataset>(std::move(in));
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string dataset_to_csv(const Dataset& data) {
  std::string out = "y";
  for (std::size_t k = 0; k < data.dim(); ++k) out += ",x" + std::to_string(k + 1);
  out += '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += format_double(data.y(i));
    for (double v : data.row(i)) out += ',' + format_double(v);
    out += '\n';
  }
  return out;
}

std::string series_to_csv(std::span<const double> series) {
  std::string out = "date,value\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    out += std::to_string(i) + ',' + format_double(series[i]) + '\n';
  return out;
}

// ------------------------------------------------------------- reports

std::string report_to_csv(const SelectionReport& report) {
  std::string out = "model,log_rss_over_n,df,gic,selected\n";
  for (const ModelScore& s : report.models) {
    out += std::string(to_string(s.kind)) + ',' + format_double(s.log_rss_over_n) + ',' +
           format_double(s.df) + ',' + format_double(s.gic) + ',' + (s.kind == report.chosen ? "1" : "0") +
           '\n';
  }
  return out;
}

std::string report_to_json(const SelectionReport& report, const Region& region) {
  json models = json::array();
  for (const ModelScore& s : report.models)
    models.push_back({{"model", to_string(s.kind)},
                      {"rss", s.rss},
                      {"n_used", s.n_used},
                      {"log_rss_over_n", s.log_rss_over_n},
                      {"df", s.df},
                      {"gic", s.gic}});
  json doc{{"chosen", to_string(report.chosen)},
           {"n", report.n},
           {"d_eff", report.d_eff},
           {"tau", report.tau},
           {"models", models},
           {"bandwidths", plan_to_json(report.bandwidths)},
           {"region", region_to_json(region)}};
  if (report.c_hat) {
    json folds = json::array();
    for (const CvFold& f : report.folds) {
      json fallbacks = json::object();
      for (ModelKind kind : kAllModels)
        fallbacks[std::string(to_string(kind))] = f.fallbacks[static_cast<std::size_t>(kind)];
      folds.push_back({{"held_out", f.held_out}, {"scored", f.scored}, {"n_train", f.n_train},
                       {"fallbacks", fallbacks}});
    }
    json choices = json::array();
    for (const auto& row : report.cv_choices) {
      json r = json::array();
      for (ModelKind kind : row) r.push_back(to_string(kind));
      choices.push_back(r);
    }
    doc["cv"] = {{"c_hat", *report.c_hat},
                 {"c_grid", report.c_grid},
                 {"scores", report.cv_scores},
                 {"choices", choices},
                 {"folds", folds}};
  }
  return doc.dump(2) + '\n';
}

std::string study_to_csv(const std::vector<CellResult>& cells, const StudyGrid& grid) {
  std::string out =
      "n,design,phi,replications,base_seed,failures,snr_median,p_I,p_II,p_III,p_IV,within_budget\n";
  for (const CellResult& c : cells) {
    out += std::to_string(c.n) + ',' + std::string(to_string(c.design)) + ',' + format_double(c.phi) + ',' +
           std::to_string(c.replications) + ',' + std::to_string(grid.base_seed) + ',' +
           std::to_string(c.failures) + ',' + format_double(c.snr_median);
    for (double p : c.proportions) out += ',' + format_double(p);
    out += c.within_failure_budget ? ",1\n" : ",0\n";
  }
  return out;
}

std::string study_to_json(const std::vector<CellResult>& cells, const StudyGrid& grid) {
  json rows = json::array();
  for (const CellResult& c : cells) {
    json props = json::object();
    for (ModelKind kind : kAllModels) props[std::string(to_string(kind))] = c.proportion(kind);
    rows.push_back({{"n", c.n},
                    {"design", to_string(c.design)},
                    {"phi", c.phi},
                    {"replications", c.replications},
                    {"failures", c.failures},
                    {"snr_median", c.snr_median},
                    {"proportions", props},
                    {"within_budget", c.within_failure_budget}});
  }
  json doc{{"base_seed", grid.base_seed},
           {"replications", grid.replications},
           {"cv", {{"k_folds", grid.cv.k_folds},
                   {"c_grid", grid.cv.c_grid},
                   {"fold_style", grid.cv.fold_style == FoldStyle::Interleaved ? "interleaved" : "contiguous"}}},
           {"region", region_to_json(grid.region)},
           {"cells", rows}};
  return doc.dump(2) + '\n';
}

// ---------------------------------------------------------- resolution

Region resolve_region(const RunConfig& config, const Dataset& data) {
  Region region;
  if (config.region_t) region.t_interval = *config.region_t;
  if (config.region_x) {
    region.x_box = *config.region_x;
  } else {
    std::vector<double> column(data.size());
    for (std::size_t k = 0; k < data.dim(); ++k) {
      for (std::size_t i = 0; i < data.size(); ++i) column[i] = data.row(i)[k];
      region.x_box.push_back({quantile(column, 0.025), quantile(column, 0.975)});
    }
  }
  region.validate(data.dim());
  return region;
}

BandwidthPlan resolve_plan(const RunConfig& config, const Dataset& data) {
  BandwidthPlan plan = default_bandwidths(data);
  if (config.bandwidth_constants) plan = make_plan(plan.n, plan.d, *config.bandwidth_constants, plan.iqr);
  return plan;
}

CvPlan resolve_cv(const RunConfig& config) {
  CvPlan cv;
  if (config.cv_folds) cv.k_folds = *config.cv_folds;
  if (config.c_grid) cv.c_grid = *config.c_grid;
  cv.fold_style = config.fold_style;
  cv.validate();
  return cv;
}

StudyGrid resolve_grid(const RunConfig& config) {
  StudyGrid grid = config.full_scale ? full_scale_grid() : desk_scale_grid();
  if (!config.designs.empty()) grid.designs = config.designs;
  if (!config.sizes.empty()) grid.sample_sizes = config.sizes;
  if (!config.noise.empty()) grid.noise_levels = config.noise;
  if (config.replications) grid.replications = *config.replications;
  grid.base_seed = config.seed;
  grid.cv = resolve_cv(config);
  if (config.region_x) grid.region.x_box = *config.region_x;
  if (config.region_t) grid.region.t_interval = *config.region_t;
  grid.validate();
  return grid;
}

// ------------------------------------------------------------ commands

std::string cmd_simulate(const RunConfig& config) {
  if (config.designs.size() > 1 || config.sizes.size() > 1 || config.noise.size() > 1)
    throw ConfigError("simulate takes a single design, size and noise level");
  const Design design = config.designs.empty() ? Design::A : config.designs.front();
  const std::size_t n = config.sizes.empty() ? 1000 : config.sizes.front();
  const double phi = config.noise.empty() ? 1.0 : config.noise.front();
  switch (design) {
    case Design::Diffusion:
      return series_to_csv(simulate_rates(n, phi, config.seed));
    case Design::AR: {
      if (!(phi > 0.0)) throw ConfigError("noise level phi must be positive");
      const SurfaceFn m = [](std::span<const double> x, double t) { return (0.2 + 0.3 * t) * x[0]; };
      const SurfaceFn sigma = [phi](std::span<const double>, double) { return phi; };
      return dataset_to_csv(simulate_ar(n, m, sigma, 1, config.seed));
    }
    default: {
      GeneratorSpec spec;
      spec.design = design;
      spec.n = n;
      spec.phi = phi;
      spec.seed = config.seed;
      return dataset_to_csv(simulate(spec).first);
    }
  }
}

std::string cmd_study(const RunConfig& config, bool* within_budget) {
  const StudyGrid grid = resolve_grid(config);
  const auto cells = run_grid(grid);
  if (within_budget) {
    *within_budget = true;
    for (const auto& c : cells) *within_budget = *within_budget && c.within_failure_budget;
  }
  return config.format == Format::Json ? study_to_json(cells, grid) : study_to_csv(cells, grid);
}

std::string cmd_select(const RunConfig& config) {
  if (!config.input_path) throw ConfigError("select needs --input");
  const Dataset data = load_dataset(*config.input_path);
  const Region region = resolve_region(config, data);
  const BandwidthPlan plan = resolve_plan(config, data);
  const auto [c_hat, report] = select_tau_cv(data, region, plan, resolve_cv(config), epanechnikov(),
                                             config.intercept);
  return config.format == Format::Json ? report_to_json(report, region) : report_to_csv(report);
}

std::string cmd_fit(const RunConfig& config) {
  if (!config.input_path) throw ConfigError("fit needs --input");
  const Dataset data = load_dataset(*config.input_path);
  const Region region = resolve_region(config, data);
  const BandwidthPlan plan = resolve_plan(config, data);
  const Kernel1D k = epanechnikov();
  const std::size_t d = data.dim();

  const std::vector<double> times =
      config.grid_t ? config.grid_t->points() : Axis{region.t_interval.lo, region.t_interval.hi, 61}.points();

  std::string out;
  if (config.model == ModelKind::III) {
    const VaryingCoefficientEstimator est(data, plan.b_III, k, config.intercept);
    out = "t";
    if (config.intercept) out += ",beta0";
    for (std::size_t j = 0; j < d; ++j) out += ",beta" + std::to_string(j + 1);
    out += '\n';
    std::vector<std::optional<std::vector<double>>> rows(times.size());
    parallel_for(times.size(), [&](std::size_t r) {
      if (!region.contains_t(times[r])) return;
      try {
        rows[r] = est.coefficients(times[r]);
      } catch (const NumericalError&) {
      }
    });
    for (std::size_t r = 0; r < times.size(); ++r) {
      out += format_double(times[r]);
      for (std::size_t j = 0; j < est.parameters(); ++j)
        out += ',' + (rows[r] ? format_double((*rows[r])[j]) : std::string());
      out += '\n';
    }
    return out;
  }

  if (config.grid_x.size() != d && !(config.grid_x.empty()))
    throw ConfigError("--grid-x needs one lo:hi:count axis per predictor");
  std::vector<std::vector<double>> axes;
  for (std::size_t j = 0; j < d; ++j)
    axes.push_back(config.grid_x.empty() ? Axis{region.x_box[j].lo, region.x_box[j].hi, 41}.points()
                                         : config.grid_x[j].points());

  // Lattice in row-major order: predictors vary slowest, then time.
  std::vector<std::vector<double>> lattice(1);
  for (const auto& axis : axes) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : lattice)
      for (double v : axis) {
        next.push_back(prefix);
        next.back().push_back(v);
      }
    lattice = std::move(next);
  }

  std::optional<TimeVaryingKernelEstimator> model_i;
  std::optional<NadarayaWatsonEstimator> model_ii;
  std::optional<LinearEstimator> model_iv;
  if (config.model == ModelKind::I) model_i.emplace(data, plan.b_I, plan.h_I, k);
  if (config.model == ModelKind::II) model_ii.emplace(data, plan.h_II, k);
  if (config.model == ModelKind::IV) model_iv.emplace(data, config.intercept);

  const std::size_t total = lattice.size() * times.size();
  std::vector<std::optional<double>> values(total);
  parallel_for(total, [&](std::size_t p) {
    const auto& u = lattice[p / times.size()];
    const double t = times[p % times.size()];
    if (!region.contains_x(u) || !region.contains_t(t)) return;
    try {
      if (model_i) values[p] = model_i->regression(u, t);
      if (model_ii) values[p] = model_ii->regression(u);
      if (model_iv) values[p] = model_iv->predict(u);
    } catch (const NumericalError&) {
    }
  });

  for (std::size_t j = 0; j < d; ++j) out += "u" + std::to_string(j + 1) + ',';
  out += "t,m_hat\n";
  for (std::size_t p = 0; p < total; ++p) {
    for (double v : lattice[p / times.size()]) out += format_double(v) + ',';
    out += format_double(times[p % times.size()]) + ',' + missing_or(values[p]) + '\n';
  }
  return out;
}

std::string cmd_bandwidths(const RunConfig& config) {
  BandwidthPlan plan;
  if (config.input_path) {
    plan = resolve_plan(config, load_dataset(*config.input_path));
  } else {
    if (!config.n || !config.iqr) throw ConfigError("bandwidths needs --input or both --n and --iqr");
    BandwidthConstants constants;
    double volume = 1.0;
    for (double q : *config.iqr) volume *= q;
    constants.c_h_I = constants.c_h_II = volume;
    if (config.bandwidth_constants) constants = *config.bandwidth_constants;
    plan = make_plan(*config.n, config.iqr->size(), constants, *config.iqr);
  }
  const std::size_t d_eff = plan.d + (config.intercept ? 1 : 0);
  const double c = config.c_grid && config.c_grid->size() == 1 ? config.c_grid->front() : 1.0;
  const double tau = tau_schedule(static_cast<double>(plan.n), plan.d, c);

  if (config.format == Format::Json) {
    json df = json::object();
    for (ModelKind kind : kAllModels) df[std::string(to_string(kind))] = model_df(kind, plan, d_eff);
    json doc{{"bandwidths", plan_to_json(plan)}, {"d_eff", d_eff}, {"df", df}, {"c", c}, {"tau", tau}};
    return doc.dump(2) + '\n';
  }
  std::string out = "quantity,value\n";
  auto row = [&out](const std::string& key, double v) { out += key + ',' + format_double(v) + '\n'; };
  row("n", static_cast<double>(plan.n));
  row("d", static_cast<double>(plan.d));
  row("b_I", plan.b_I);
  row("h_I", plan.h_I);
  row("h_II", plan.h_II);
  row("b_III", plan.b_III);
  for (std::size_t k = 0; k < plan.iqr.size(); ++k) row("iqr" + std::to_string(k + 1), plan.iqr[k]);
  for (ModelKind kind : kAllModels) row("df_" + std::string(to_string(kind)), model_df(kind, plan, d_eff));
  row("c", c);
  row("tau", tau);
  return out;
}

int run(const RunConfig& config) {
  try {
    std::string text;
    bool ok = true;
    switch (config.command) {
      case Command::Simulate:
        text = cmd_simulate(config);
        break;
      case Command::Study:
        text = cmd_study(config, &ok);
        break;
      case Command::Select:
        text = cmd_select(config);
        break;
      case Command::Fit:
        text = cmd_fit(config);
        break;
      case Command::Bandwidths:
        text = cmd_bandwidths(config);
        break;
    }
    write_output(config, text);
    if (!ok) {
      std::cerr << "error: at least one study cell exceeded its failure budget\n";
      return kNumericalError;
    }
    return kSuccess;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.category()) {
      case ErrorCategory::Parse:
        return kParseError;
      case ErrorCategory::Numerical:
        return kNumericalError;
      case ErrorCategory::Config:
        return kConfigError;
    }
    return kConfigError;
  }
}

int main(int argc, const char* const* argv) {
  CLI::App app{"Time-varying regression: estimation, model selection and simulation"};
  app.require_subcommand(1);

  RunConfig config;
  std::string format = "csv", region_x, region_t, c_grid, designs, sizes, noise, grid_x, grid_t, iqr,
              constants, intercept = "on", fold_style = "interleaved", model = "I";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--output", config.output_path, "Output file (default: stdout)");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", config.seed, "Base random seed");
  };
  auto add_model_options = [&](CLI::App* sub) {
    sub->add_option("--input", config.input_path, "CSV input (date,value or y,x1..xd)")->required();
    sub->add_option("--region-x", region_x, "Predictor box lo:hi[,lo:hi...]");
    sub->add_option("--region-t", region_t, "Time interval lo:hi");
    sub->add_option("--intercept", intercept, "Fit an intercept in models III/IV")
        ->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--bandwidth-constants", constants, "c_b(I),c_h(I),c_h(II),c_b(III)");
  };
  auto add_cv = [&](CLI::App* sub) {
    sub->add_option("--cv-folds", config.cv_folds, "Number of CV folds");
    sub->add_option("--c-grid", c_grid, "Penalty constants v1,v2,...");
    sub->add_option("--fold-style", fold_style, "CV fold layout")
        ->check(CLI::IsMember({"interleaved", "contiguous"}));
  };

  auto* simulate_cmd = app.add_subcommand("simulate", "Generate a synthetic dataset or rate series");
  add_common(simulate_cmd);
  simulate_cmd->add_option("--designs", designs, "One of a,b,c,d,ar,diffusion");
  simulate_cmd->add_option("--sizes", sizes, "Sample size");
  simulate_cmd->add_option("--noise", noise, "Noise level phi");

  auto* study_cmd = app.add_subcommand("study", "Monte-Carlo model-selection study");
  add_common(study_cmd);
  add_cv(study_cmd);
  study_cmd->add_option("--designs", designs, "Designs a,b,c,d");
  study_cmd->add_option("--sizes", sizes, "Sample sizes n1,n2,...");
  study_cmd->add_option("--noise", noise, "Noise levels phi1,...");
  study_cmd->add_option("--replications", config.replications, "Replications per cell");
  study_cmd->add_option("--region-x", region_x, "Predictor interval lo:hi");
  study_cmd->add_option("--region-t", region_t, "Time interval lo:hi");
  study_cmd->add_flag("--full-scale", config.full_scale, "n up to 2000, phi in {1,2,3}, R = 1000");

  auto* select_cmd = app.add_subcommand("select", "Cross-validated GIC model selection");
  add_common(select_cmd);
  add_model_options(select_cmd);
  add_cv(select_cmd);

  auto* fit_cmd = app.add_subcommand("fit", "Evaluate a fitted model on a lattice");
  add_common(fit_cmd);
  add_model_options(fit_cmd);
  fit_cmd->add_option("--model", model, "I, II, III or IV");
  fit_cmd->add_option("--grid-x", grid_x, "Predictor lattice lo:hi:count[,lo:hi:count...]");
  fit_cmd->add_option("--grid-t", grid_t, "Time lattice lo:hi:count");

  auto* bandwidths_cmd = app.add_subcommand("bandwidths", "Rule-of-thumb bandwidths and model complexities");
  add_common(bandwidths_cmd);
  bandwidths_cmd->add_option("--input", config.input_path, "CSV input");
  bandwidths_cmd->add_option("--n", config.n, "Sample size (without --input)");
  bandwidths_cmd->add_option("--iqr", iqr, "Interquartile ranges (without --input)");
  bandwidths_cmd->add_option("--intercept", intercept, "Count an intercept in d_eff")
      ->check(CLI::IsMember({"on", "off"}));
  bandwidths_cmd->add_option("--bandwidth-constants", constants, "c_b(I),c_h(I),c_h(II),c_b(III)");
  bandwidths_cmd->add_option("--c-grid", c_grid, "Penalty constant for the reported tau");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    if (*simulate_cmd) config.command = Command::Simulate;
    if (*study_cmd) config.command = Command::Study;
    if (*select_cmd) config.command = Command::Select;
    if (*fit_cmd) config.command = Command::Fit;
    if (*bandwidths_cmd) config.command = Command::Bandwidths;

    config.format = format == "json" ? Format::Json : Format::Csv;
    config.intercept = intercept == "on";
    config.fold_style = fold_style == "contiguous" ? FoldStyle::ContiguousBlocks : FoldStyle::Interleaved;
    config.model = parse_model_kind(model);
    if (!region_x.empty()) {
      std::vector<Interval> box;
      for (auto part : split(region_x, ',')) box.push_back(parse_interval(part));
      config.region_x = box;
    }
    if (!region_t.empty()) config.region_t = parse_interval(region_t);
    if (!c_grid.empty()) config.c_grid = parse_double_list(c_grid, "penalty constant");
    for (auto part : split(designs, ','))
      if (!trim(part).empty()) config.designs.push_back(parse_design(trim(part)));
    for (double v : sizes.empty() ? std::vector<double>{} : parse_double_list(sizes, "sample size")) {
      if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("sample sizes must be positive integers");
      config.sizes.push_back(static_cast<std::size_t>(v));
    }
    if (!noise.empty()) config.noise = parse_double_list(noise, "noise level");
    if (!grid_x.empty())
      for (auto part : split(grid_x, ',')) config.grid_x.push_back(parse_axis(part));
    if (!grid_t.empty()) config.grid_t = parse_axis(grid_t);
    if (!iqr.empty()) config.iqr = parse_double_list(iqr, "interquartile range");
    if (!constants.empty()) {
      const auto c = parse_double_list(constants, "bandwidth constant");
      if (c.size() != 4) throw ConfigError("--bandwidth-constants needs four values");
      config.bandwidth_constants = BandwidthConstants{c[0], c[1], c[2], c[3]};
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.category() == ErrorCategory::Parse ? kParseError : kConfigError;
  }
  return run(config);
}

}  // namespace tvreg::cli
