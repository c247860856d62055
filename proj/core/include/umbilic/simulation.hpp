#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "umbilic/equilibrium.hpp"
#include "umbilic/plant.hpp"

namespace umbilic {

enum class SolverMethod { rk4_fixed, rk45_adaptive };

std::string_view to_string(SolverMethod m) noexcept;
SolverMethod solver_method_from_string(std::string_view name);

/// Samples are recorded every `step * record_every` seconds (and at t_end).
/// rk4_fixed advances by `step`; rk45_adaptive chooses its own steps between
/// samples and lands on each sample time exactly.
struct SolverConfig {
  SolverMethod method = SolverMethod::rk45_adaptive;
  double step = 1e-2;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double t_end = 10.0;
  double divergence_norm = 1e6;
  int record_every = 1;

  /// Throws std::invalid_argument when an invariant does not hold.
  void validate() const;
  double sample_interval() const noexcept { return step * record_every; }

  bool operator==(const SolverConfig&) const = default;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> output;
  /// Set when integration stopped at the divergence norm or a non-finite value.
  bool diverged = false;

  std::size_t size() const noexcept { return times.size(); }
  double duration() const noexcept { return times.empty() ? 0.0 : times.back() - times.front(); }
};

/// Integrates from t=0 to config.t_end. Stops early, with `diverged` set, at
/// the first state whose max-norm reaches divergence_norm (that state is kept)
/// or at a non-finite state (dropped). Deterministic for fixed inputs.
Trajectory integrate(const ClosedLoopSystem& system, const Eigen::VectorXd& x0,
                     const SolverConfig& config);

enum class VerdictKind { converged, diverged, undecided };
std::string_view to_string(VerdictKind k) noexcept;

struct Verdict {
  VerdictKind kind = VerdictKind::undecided;
  std::optional<std::size_t> equilibrium_index;
  Eigen::VectorXd final_state;
  /// Earliest sample time after which the state stays within tol of the attractor.
  std::optional<double> settle_time;
};

/// Converged to candidate i when every sample in the final `window` seconds is
/// within `tol` (max-norm) of it; the first such candidate wins. Diverged when
/// the trajectory was truncated. Undecided otherwise.
Verdict detect_convergence(const Trajectory& trajectory, const std::vector<Equilibrium>& candidates,
                           double tol, double window);

}  // namespace umbilic
