#include "tvreg/sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>
#include <string>

#include "tvreg/error.hpp"
#include "tvreg/parallel.hpp"
#include "tvreg/rng.hpp"

namespace tvreg {
namespace {

struct CellKey {
  Design design;
  std::size_t n;
  double phi;
};

struct ReplicationOutcome {
  std::optional<ModelKind> chosen;  // empty on failure
  double snr = 0.0;
};

ReplicationOutcome run_replication(const CellKey& cell, std::uint64_t seed, const CvPlan& cv,
                                   const Region& region) {
  GeneratorSpec spec;
  spec.design = cell.design;
  spec.n = cell.n;
  spec.phi = cell.phi;
  spec.seed = seed;
  ReplicationOutcome out;
  try {
    const auto [data, truth] = simulate(spec);
    out.snr = snr(data, truth);
    const BandwidthPlan plan = default_bandwidths(data);
    out.chosen = select_tau_cv(data, region, plan, cv, epanechnikov(), true).second.chosen;
  } catch (const NumericalError&) {
    out.chosen.reset();
  }
  return out;
}

CellResult summarize(const CellKey& cell, std::span<const ReplicationOutcome> outcomes) {
  CellResult result;
  result.design = cell.design;
  result.n = cell.n;
  result.phi = cell.phi;
  result.replications = outcomes.size();
  std::vector<double> snrs;
  for (const auto& o : outcomes) {
    if (!o.chosen) {
      ++result.failures;
      continue;
    }
    ++result.counts[static_cast<std::size_t>(*o.chosen)];
    snrs.push_back(o.snr);
  }
  const std::size_t ok = outcomes.size() - result.failures;
  for (std::size_t m = 0; m < 4; ++m)
    result.proportions[m] = ok ? static_cast<double>(result.counts[m]) / static_cast<double>(ok) : 0.0;
  if (!snrs.empty()) {
    std::sort(snrs.begin(), snrs.end());
    const std::size_t mid = snrs.size() / 2;
    result.snr_median = snrs.size() % 2 ? snrs[mid] : 0.5 * (snrs[mid - 1] + snrs[mid]);
  }
  result.within_failure_budget =
      static_cast<double>(result.failures) <= 0.05 * static_cast<double>(result.replications);
  return result;
}

std::vector<CellResult> run_cells(const std::vector<CellKey>& cells, std::size_t replications,
                                  std::uint64_t base_seed, const CvPlan& cv, const Region& region) {
  std::vector<ReplicationOutcome> outcomes(cells.size() * replications);
  parallel_for(outcomes.size(), [&](std::size_t job) {
    const CellKey& cell = cells[job / replications];
    const std::size_t r = job % replications;
    outcomes[job] = run_replication(
        cell, replication_seed(base_seed, cell.design, cell.n, cell.phi, r), cv, region);
  });
  std::vector<CellResult> results;
  results.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c)
    results.push_back(summarize(cells[c], std::span(outcomes).subspan(c * replications, replications)));
  return results;
}

}  // namespace

void StudyGrid::validate() const {
  if (replications < 1) throw ConfigError("study needs at least one replication");
  if (designs.empty() || sample_sizes.empty() || noise_levels.empty())
    throw ConfigError("study grid has an empty axis");
  for (Design d : designs)
    if (d != Design::A && d != Design::B && d != Design::C && d != Design::D)
      throw ConfigError("study designs must be among a-d");
  for (std::size_t n : sample_sizes)
    if (n < 100) throw ConfigError("study sample sizes must be at least 100");
  for (double phi : noise_levels)
    if (!(phi > 0.0)) throw ConfigError("noise levels must be positive");
  cv.validate();
  region.validate(1);
}

StudyGrid desk_scale_grid() { return StudyGrid{}; }

StudyGrid full_scale_grid() {
  StudyGrid grid;
  grid.sample_sizes = {250, 500, 1000, 2000};
  grid.noise_levels = {1.0, 2.0, 3.0};
  grid.replications = 1000;
  return grid;
}

std::uint64_t replication_seed(std::uint64_t base_seed, Design design, std::size_t n, double phi,
                               std::size_t r) {
  return derive_seed(base_seed, {static_cast<std::uint64_t>(StreamRole::Replication),
                                 static_cast<std::uint64_t>(design), n,
                                 std::bit_cast<std::uint64_t>(phi), r});
}

double snr(const Dataset& data, const TrueModel& truth) {
  double signal = 0.0, noise = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double m = truth.m(data.row(i), data.time(i));
    const double e = data.y(i) - m;
    signal += m * m;
    noise += e * e;
  }
  if (!(noise > 0.0)) throw NumericalError("ZeroNoise: signal-to-noise ratio undefined without noise");
  return std::sqrt(signal / noise);
}

CellResult run_cell(Design design, std::size_t n, double phi, std::size_t replications,
                    std::uint64_t base_seed, const CvPlan& cv, const Region& region) {
  StudyGrid grid;
  grid.designs = {design};
  grid.sample_sizes = {n};
  grid.noise_levels = {phi};
  grid.replications = replications;
  grid.cv = cv;
  grid.region = region;
  grid.validate();
  CellResult result = run_cells({CellKey{design, n, phi}}, replications, base_seed, cv, region).front();
  if (!result.within_failure_budget)
    throw NumericalError("cell (" + std::string(to_string(design)) + ", n=" + std::to_string(n) +
                         ") failed in " + std::to_string(result.failures) + " of " +
                         std::to_string(replications) + " replications");
  return result;
}

std::vector<CellResult> run_grid(const StudyGrid& grid) {
  grid.validate();
  std::vector<CellKey> cells;
  for (std::size_t n : grid.sample_sizes)
    for (Design design : grid.designs)
      for (double phi : grid.noise_levels) cells.push_back({design, n, phi});
  return run_cells(cells, grid.replications, grid.base_seed, grid.cv, grid.region);
}

}  // namespace tvreg
