#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tvreg/locstat.hpp"
#include "tvreg/select.hpp"
#include "tvreg/smooth.hpp"

namespace tvreg {

struct StudyGrid {
  std::vector<Design> designs{Design::A, Design::B, Design::C, Design::D};
  std::vector<std::size_t> sample_sizes{250, 500, 1000};
  std::vector<double> noise_levels{1.0, 2.0};
  std::size_t replications = 200;
  std::uint64_t base_seed = 20150601;
  CvPlan cv;
  Region region{{{-2.0, 2.0}}, {0.2, 0.8}};

  /// Throws ConfigError unless R >= 1, every n >= 100, designs are a-d and phi > 0.
  void validate() const;
};

/// The desk-scale study: designs a-d, n in {250, 500, 1000}, phi in {1, 2}, R = 200.
StudyGrid desk_scale_grid();
/// The full study: n in {250, 500, 1000, 2000}, phi in {1, 2, 3}, R = 1000.
StudyGrid full_scale_grid();

struct CellResult {
  Design design = Design::A;
  std::size_t n = 0;
  double phi = 1.0;
  std::size_t replications = 0;
  std::array<std::size_t, 4> counts{};     // selections per ModelKind
  std::array<double, 4> proportions{};     // counts / successful replications
  double snr_median = 0.0;
  std::size_t failures = 0;
  bool within_failure_budget = true;       // failures <= 5% of replications

  double proportion(ModelKind kind) const { return proportions[static_cast<std::size_t>(kind)]; }
};

/// Seed of replication r of a cell; independent of evaluation order.
std::uint64_t replication_seed(std::uint64_t base_seed, Design design, std::size_t n, double phi,
                               std::size_t r);

/// {sum m(x_i, i/n)^2 / sum e_i^2}^{1/2} with e_i = y_i - m(x_i, i/n).
/// Throws NumericalError (ZeroNoise) if every e_i is zero.
double snr(const Dataset& data, const TrueModel& truth);

/// Simulates R replications, each tuned by cross-validation and selected by
/// GIC. Throws NumericalError if more than 5% of the replications fail.
CellResult run_cell(Design design, std::size_t n, double phi, std::size_t replications,
                    std::uint64_t base_seed, const CvPlan& cv, const Region& region);

/// All cells ordered by (n, design, phi). Cells over the failure budget are
/// returned with within_failure_budget = false rather than thrown.
std::vector<CellResult> run_grid(const StudyGrid& grid);

}  // namespace tvreg
