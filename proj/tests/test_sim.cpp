#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tvreg/cli.hpp"
#include "tvreg/error.hpp"
#include "tvreg/parallel.hpp"
#include "tvreg/sim.hpp"

using namespace tvreg;

namespace {

StudyGrid small_grid() {
  StudyGrid grid;
  grid.designs = {Design::A, Design::D};
  grid.sample_sizes = {250};
  grid.noise_levels = {1.0, 2.0};
  grid.replications = 12;
  grid.base_seed = 404;
  return grid;
}

double median_snr(Design design, std::size_t n, double phi, int replications) {
  std::vector<double> values;
  for (int r = 0; r < replications; ++r) {
    GeneratorSpec spec;
    spec.design = design;
    spec.n = n;
    spec.phi = phi;
    spec.seed = replication_seed(20150601, design, n, phi, static_cast<std::size_t>(r));
    const auto [data, truth] = simulate(spec);
    values.push_back(snr(data, truth));
  }
  std::sort(values.begin(), values.end());
  return 0.5 * (values[values.size() / 2 - 1] + values[values.size() / 2]);
}

}  // namespace

TEST_CASE("grid presets and validation") {
  const StudyGrid desk = desk_scale_grid();
  CHECK(desk.replications == 200);
  CHECK(desk.sample_sizes == std::vector<std::size_t>{250, 500, 1000});
  CHECK(desk.noise_levels == std::vector<double>{1.0, 2.0});
  CHECK(desk.region.x_box[0].lo == -2.0);
  CHECK(desk.region.t_interval.hi == 0.8);
  const StudyGrid full = full_scale_grid();
  CHECK(full.replications == 1000);
  CHECK(full.sample_sizes.back() == 2000);
  CHECK(full.noise_levels.back() == 3.0);

  StudyGrid bad = small_grid();
  bad.replications = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = small_grid();
  bad.sample_sizes = {99};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = small_grid();
  bad.designs = {Design::AR};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("replication seeds are distinct") {
  std::vector<std::uint64_t> seeds;
  for (Design d : {Design::A, Design::B})
    for (std::size_t n : {250u, 500u})
      for (double phi : {1.0, 2.0})
        for (std::size_t r = 0; r < 50; ++r) seeds.push_back(replication_seed(1, d, n, phi, r));
  std::sort(seeds.begin(), seeds.end());
  CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
  CHECK(replication_seed(1, Design::A, 250, 1.0, 3) != replication_seed(2, Design::A, 250, 1.0, 3));
}

TEST_CASE("signal-to-noise ratio") {
  const Dataset data({1.0, -1.0, 2.0}, {0.0, 0.0, 0.0}, 1);
  TrueModel zero{[](std::span<const double>, double) { return 0.0; },
                 [](std::span<const double>, double) { return 1.0; }, ModelKind::IV};
  CHECK(snr(data, zero) == 0.0);
  TrueModel exact{[](std::span<const double>, double t) { return t < 0.5 ? 1.0 : (t < 0.9 ? -1.0 : 2.0); },
                  zero.sigma, ModelKind::I};
  CHECK_THROWS_AS(snr(data, exact), NumericalError);

  CHECK(median_snr(Design::A, 1000, 1.0, 200) == doctest::Approx(4.29).epsilon(0.15 / 4.29));
  CHECK(median_snr(Design::D, 1000, 1.0, 200) == doctest::Approx(5.42).epsilon(0.25 / 5.42));
  for (Design d : {Design::A, Design::B, Design::C, Design::D}) {
    const double ratio = median_snr(d, 1000, 2.0, 200) / median_snr(d, 1000, 1.0, 200);
    CAPTURE(static_cast<int>(d));
    CHECK(ratio >= 0.45);
    CHECK(ratio <= 0.55);
  }
}

TEST_CASE("cells: bookkeeping and single replications") {
  const CellResult one = run_cell(Design::C, 250, 1.0, 1, 9, CvPlan{}, desk_scale_grid().region);
  CHECK(one.replications == 1);
  double total = 0;
  int unit = 0;
  for (double p : one.proportions) {
    total += p;
    unit += p == 1.0;
  }
  CHECK(total == 1.0);
  CHECK(unit == 1);

  const StudyGrid grid = small_grid();
  const auto cells = run_grid(grid);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].design == Design::A);
  CHECK(cells[0].phi == 1.0);
  CHECK(cells[1].phi == 2.0);
  CHECK(cells[2].design == Design::D);
  for (const CellResult& c : cells) {
    const std::size_t ok = c.replications - c.failures;
    double total_p = 0;
    std::size_t total_c = 0;
    for (std::size_t m = 0; m < 4; ++m) {
      total_p += c.proportions[m];
      total_c += c.counts[m];
      CHECK(c.proportions[m] * static_cast<double>(ok) == doctest::Approx(static_cast<double>(c.counts[m])));
    }
    CHECK(total_c == ok);
    CHECK(total_p == doctest::Approx(1.0));
    CHECK(c.snr_median >= 0.0);
  }

  StudyGrid single = grid;
  single.designs = {Design::D};
  single.noise_levels = {2.0};
  const auto alone = run_grid(single);
  const CellResult direct = run_cell(Design::D, 250, 2.0, grid.replications, grid.base_seed, grid.cv, grid.region);
  REQUIRE(alone.size() == 1);
  CHECK(alone[0].counts == direct.counts);
  CHECK(alone[0].snr_median == direct.snr_median);
  CHECK(alone[0].counts == cells[3].counts);
}

TEST_CASE("study output is independent of the worker count") {
  const StudyGrid grid = small_grid();
  std::string serial, parallel;
  {
    ScopedWorkers one(1);
    serial = cli::study_to_csv(run_grid(grid), grid);
  }
  {
    ScopedWorkers four(4);
    parallel = cli::study_to_csv(run_grid(grid), grid);
  }
  CHECK(serial == parallel);
  CHECK(cli::study_to_csv(run_grid(grid), grid) == serial);
}

TEST_CASE("cell selection frequencies") {
  const Region region = desk_scale_grid().region;
  const CellResult a = run_cell(Design::A, 500, 1.0, 200, 20150601, CvPlan{}, region);
  CHECK(a.proportion(ModelKind::I) >= 0.90);
  const CellResult c = run_cell(Design::C, 250, 3.0, 200, 20150601, CvPlan{}, region);
  CHECK(c.proportion(ModelKind::III) >= 0.90);
}

TEST_CASE("small-sample diagonal proportions") {
  StudyGrid grid = desk_scale_grid();
  grid.sample_sizes = {250};
  const auto cells = run_grid(grid);
  const std::array<ModelKind, 4> targets{ModelKind::I, ModelKind::II, ModelKind::III, ModelKind::IV};
  for (const CellResult& cell : cells) {
    CAPTURE(static_cast<int>(cell.design));
    CAPTURE(cell.phi);
    CHECK(cell.within_failure_budget);
    CHECK(cell.proportion(targets[static_cast<std::size_t>(cell.design)]) >= 0.80);
  }
}
