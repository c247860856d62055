#include "umbilic/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace umbilic {

namespace {

constexpr double kWidth = 720.0, kHeight = 540.0;
constexpr double kLeft = 80.0, kRight = 20.0, kTop = 40.0, kBottom = 60.0;
constexpr std::size_t kMaxPoints = 1000;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v, const char* f = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Bounds {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;

  void add(double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  bool valid() const { return x0 <= x1 && y0 <= y1; }
  void pad() {
    auto widen = [](double& lo, double& hi) {
      const double span = hi - lo;
      const double m = span > 0.0 ? 0.05 * span : std::max(1.0, std::abs(lo)) * 0.05;
      lo -= m;
      hi += m;
    };
    widen(x0, x1);
    widen(y0, y1);
  }
  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

}  // namespace

std::string render_svg(const SweepResult& result) {
  const bool phase = dimension(result.spec.family()) == 2;
  auto point = [&](const Trajectory& t, std::size_t i) -> std::pair<double, double> {
    if (phase) return {t.states[i][0], t.states[i][1]};
    return {t.times[i], t.output[i]};
  };

  Bounds b;
  bool any_bounded = false;
  for (const auto& run : result.runs) any_bounded = any_bounded || (!run.errored() && !run.trajectory.diverged);
  for (const auto& run : result.runs) {
    if (run.errored() || (any_bounded && run.trajectory.diverged)) continue;
    for (std::size_t i = 0; i < run.trajectory.size(); ++i) {
      const auto [x, y] = point(run.trajectory, i);
      b.add(x, y);
    }
  }
  if (!b.valid()) b = Bounds{-1.0, 1.0, -1.0, 1.0};
  b.pad();

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - b.x0) / (b.x1 - b.x0) * pw; };
  auto sy = [&](double y) { return kTop + (b.y1 - y) / (b.y1 - b.y0) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth, "%.0f") +
       "\" height=\"" + fmt(kHeight, "%.0f") + "\" viewBox=\"0 0 " + fmt(kWidth, "%.0f") + " " +
       fmt(kHeight, "%.0f") + "\">\n";
  s += "<defs><clipPath id=\"plot\"><rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) +
       "\" width=\"" + fmt(pw) + "\" height=\"" + fmt(ph) + "\"/></clipPath></defs>\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"16\">" + result.spec.name + "</text>\n";
  s += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(pw) +
       "\" height=\"" + fmt(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

  // Ticks at the frame corners and midpoints.
  for (int i = 0; i <= 4; ++i) {
    const double fx = b.x0 + (b.x1 - b.x0) * i / 4.0;
    const double fy = b.y0 + (b.y1 - b.y0) * i / 4.0;
    s += "<text x=\"" + fmt(sx(fx)) + "\" y=\"" + fmt(kTop + ph + 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
         fmt(fx, "%.4g") + "</text>\n";
    s += "<text x=\"" + fmt(kLeft - 6) + "\" y=\"" + fmt(sy(fy) + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(fy, "%.4g") +
         "</text>\n";
  }
  const std::string xlabel = phase ? "x1" : "t";
  const std::string ylabel = phase ? "x2" : "y";
  s += "<text x=\"" + fmt(kLeft + pw / 2) + "\" y=\"" + fmt(kHeight - 16) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + xlabel +
       "</text>\n";
  s += "<text x=\"16\" y=\"" + fmt(kTop + ph / 2) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 " +
       fmt(kTop + ph / 2) + ")\">" + ylabel + "</text>\n";

  s += "<g clip-path=\"url(#plot)\" fill=\"none\" stroke-width=\"1.2\">\n";
  std::size_t colour = 0;
  for (const auto& run : result.runs) {
    if (run.errored() || run.trajectory.size() == 0) continue;
    const auto n = run.trajectory.size();
    const std::size_t stride = std::max<std::size_t>(1, (n + kMaxPoints - 1) / kMaxPoints);
    std::string pts;
    for (std::size_t i = 0; i < n; i += stride) {
      const auto [x, y] = point(run.trajectory, i);
      pts += fmt(sx(x)) + "," + fmt(sy(y)) + " ";
    }
    if ((n - 1) % stride != 0) {
      const auto [x, y] = point(run.trajectory, n - 1);
      pts += fmt(sx(x)) + "," + fmt(sy(y));
    }
    s += "<polyline stroke=\"" + std::string(kPalette[colour++ % std::size(kPalette)]) +
         "\" points=\"" + pts + "\"/>\n";
  }
  s += "</g>\n";

  // Equilibria: distinct states across runs.
  std::vector<std::pair<Eigen::VectorXd, bool>> marks;
  for (const auto& run : result.runs) {
    for (const auto& eq : run.equilibria) {
      const bool seen = std::any_of(marks.begin(), marks.end(), [&](const auto& m) {
        return (m.first - eq.state).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + eq.state.cwiseAbs().maxCoeff());
      });
      if (!seen) marks.emplace_back(eq.state, eq.stable());
    }
  }
  s += "<g stroke=\"black\">\n";
  for (const auto& [state, stable] : marks) {
    if (phase) {
      if (!b.contains(state[0], state[1])) continue;
      s += "<circle cx=\"" + fmt(sx(state[0])) + "\" cy=\"" + fmt(sy(state[1])) +
           "\" r=\"4\" fill=\"" + (stable ? "black" : "white") + "\"/>\n";
    } else {
      const double y = state[2];
      if (!(y >= b.y0 && y <= b.y1)) continue;
      s += "<line x1=\"" + fmt(kLeft) + "\" x2=\"" + fmt(kLeft + pw) + "\" y1=\"" + fmt(sy(y)) +
           "\" y2=\"" + fmt(sy(y)) + "\" stroke-dasharray=\"" + (stable ? "6,3" : "2,4") +
           "\" stroke-width=\"0.8\"/>\n";
    }
  }
  s += "</g>\n</svg>\n";
  return s;
}

}  // namespace umbilic
