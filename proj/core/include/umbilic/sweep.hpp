#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "umbilic/equilibrium.hpp"
#include "umbilic/plant.hpp"
#include "umbilic/simulation.hpp"

namespace umbilic {

/// One swept parameter. Entries sharing an `axis` vary together index by
/// index; distinct axes span a grid with the lowest axis outermost.
///
/// `path` is "params.<name>" or "input".
struct VaryEntry {
  std::string path;
  double from = 0.0;
  double to = 0.0;
  double step = 1.0;
  int axis = 0;

  /// floor((to - from) / step + 1e-9) + 1. The endpoint is included when the
  /// range is an integer number of steps.
  std::size_t count() const;
  /// from + i * step.
  double value(std::size_t i) const;

  bool operator==(const VaryEntry&) const = default;
};

struct ConvergenceCriteria {
  double tol = 1e-3;
  /// Window as a fraction of solver.t_end.
  double window_fraction = 0.1;

  bool operator==(const ConvergenceCriteria&) const = default;
};

struct EquilibriumSearch {
  /// Empty means [-10, 10] in every coordinate.
  std::vector<Interval> box;
  int grid_n = 9;
  double tol = 1e-10;
};

struct SweepSpec {
  std::string name;
  std::string description;
  std::vector<std::string> notes;
  PlantParams base_params = PlantParams::nominal(PlantFamily::integrators);
  std::vector<ControllerSpec> controllers;
  double input_level = 0.0;
  std::vector<VaryEntry> vary;
  Eigen::VectorXd x0;
  SolverConfig solver;
  ConvergenceCriteria convergence;
  EquilibriumSearch search;

  PlantFamily family() const noexcept { return base_params.family(); }

  /// Throws std::invalid_argument for a bad path, a zero step, an empty range,
  /// jointly varied entries with unequal counts, or an x0 of the wrong size.
  void validate() const;

  /// Number of runs: the product over axes of the axis count.
  std::size_t run_count() const;

  /// Parameter assignment of run `index`, one (path, value) per vary entry.
  std::vector<std::pair<std::string, double>> assignment(std::size_t index) const;

  /// Plant parameters and input level of run `index`. Not validated, so a
  /// substituted T = 0 surfaces when the system is built.
  std::pair<PlantParams, double> resolve(std::size_t index) const;

  /// The system of run `index`; throws what ClosedLoopSystem::build throws.
  ClosedLoopSystem system(std::size_t index) const;
};

/// Equilibria a run is judged against: closed forms when the system has them,
/// otherwise the numeric finder over spec.search.
std::vector<Equilibrium> candidate_equilibria(const ClosedLoopSystem& system,
                                              const EquilibriumSearch& search);

struct RunRecord {
  std::size_t index = 0;
  std::vector<std::pair<std::string, double>> values;
  /// Non-empty when the run raised; the remaining fields are then unset.
  std::string error;
  std::vector<Equilibrium> equilibria;
  Verdict verdict;
  Trajectory trajectory;

  bool errored() const noexcept { return !error.empty(); }
  /// The equilibrium the run converged to, if any.
  const Equilibrium* attractor() const noexcept;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<RunRecord> runs;  // sweep-index order
};

/// Executes every run, `threads` at a time (0 = hardware concurrency). The
/// output does not depend on the thread count.
SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 0);

/// Single run of a sweep.
RunRecord run_one(const SweepSpec& spec, std::size_t index);

struct SummaryRow {
  std::size_t index = 0;
  std::vector<std::pair<std::string, double>> values;
  std::string verdict;  // converged | diverged | undecided | error
  std::optional<std::size_t> attractor;  // index into SweepSummary::attractors
  std::optional<double> settle_time;
  Eigen::VectorXd final_state;
  std::string error;
};

struct AttractorSummary {
  Eigen::VectorXd state;
  std::optional<std::string> formula_id;
  std::size_t runs = 0;
};

struct SweepSummary {
  std::string scenario;
  std::vector<SummaryRow> rows;
  std::vector<AttractorSummary> attractors;
  std::size_t converged = 0;
  std::size_t diverged = 0;
  std::size_t undecided = 0;
  std::size_t errored = 0;
  /// converged / runs.
  double stable_fraction = 0.0;
};

/// Attractors closer than this (max-norm, relative to 1 + |state|) are merged.
inline constexpr double kAttractorMergeRadius = 1e-6;

SweepSummary summarize(const SweepResult& result);

/// Horizon and sampling chosen from the spectra of the runs' equilibria:
///   stable attractor at distance D from x0, slowest rate r:
///       T = max(10, ln(D / tol) + 5) / r
///   no stable equilibrium, fastest growth rate g:
///       T = ln(divergence_norm / tol) / g
/// t_end is the maximum over runs clamped to [10, 1e5]. Samples are spaced so a
/// run stores at most `max_rows` rows; `step` keeps step * spectral radius <= 0.1
/// for the fixed-step method.
struct HorizonPlan {
  double t_end = 10.0;
  double step = 1e-2;
  int record_every = 1;
};

inline constexpr std::size_t kDefaultMaxRows = 2001;

HorizonPlan plan_horizon(const SweepSpec& spec, std::size_t max_rows = kDefaultMaxRows);

/// Writes plan_horizon's result into spec.solver.
void apply_horizon(SweepSpec& spec, std::size_t max_rows = kDefaultMaxRows);

/// Lattice search for submarine gains (k1, k2, k3).
///
/// Keeps gains for which every run of `spec` has exactly one eigenvalue-stable
/// equilibrium, ranks them by the worst slowest decay rate over the runs
/// (descending, lattice order breaking ties), and returns the first whose
/// simulation from spec.x0 converges to that equilibrium in every run.
struct GainLattice {
  std::vector<double> k1{0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
  double k2_from = -1.0, k2_to = 1.0, k2_step = 0.05;
  double k3_from = -2.0, k3_to = 1.0, k3_step = 0.05;
};

struct GainSearchResult {
  Gains gains{};
  double worst_rate = 0.0;
  std::size_t eigen_feasible = 0;  // lattice points passing the eigenvalue filter
  std::size_t simulated = 0;       // candidates simulated, including the winner
};

/// Throws std::invalid_argument when spec is not a submarine sweep, and
/// std::runtime_error when no lattice point passes.
GainSearchResult search_submarine_gains(const SweepSpec& spec, const GainLattice& lattice = {});

}  // namespace umbilic
