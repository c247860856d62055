#pragma once

#include <string>

#include "umbilic/sweep.hpp"

namespace umbilic {

/// Overlay of every run of a sweep: a phase portrait (x1, x2) for the
/// second-order families, y(t) for the third-order ones. Equilibria are marked
/// (filled when stable, hollow otherwise); diverged runs are clipped to the
/// frame set by the bounded runs.
std::string render_svg(const SweepResult& result);

}  // namespace umbilic
