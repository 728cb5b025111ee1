#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace lmbd {

struct NelderMeadOptions {
  double initial_step = 0.5;
  /// Stop when every vertex lies within this distance of the best one.
  double x_tolerance = 1e-10;
  /// ... or when the vertex values agree to this relative spread.
  double f_tolerance = 1e-15;
  int max_iterations = 5000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Minimises f: R^d -> R with the standard simplex moves (reflect 1,
/// expand 2, contract 1/2, shrink 1/2).
template <class F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0, const NelderMeadOptions& opt = {}) {
  const std::size_t d = x0.size();
  std::vector<std::vector<double>> simplex(d + 1, x0);
  for (std::size_t i = 0; i < d; ++i) simplex[i + 1][i] += opt.initial_step;
  std::vector<double> values(d + 1);
  for (std::size_t i = 0; i <= d; ++i) values[i] = f(simplex[i]);

  auto along = [&](const std::vector<double>& from, const std::vector<double>& to, double t) {
    std::vector<double> out(d);
    for (std::size_t k = 0; k < d; ++k) out[k] = from[k] + t * (to[k] - from[k]);
    return out;
  };

  NelderMeadResult res;
  std::vector<std::size_t> order(d + 1);
  for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    const auto& best = simplex[order.front()];
    const std::size_t worst = order.back();

    double diameter = 0.0;
    for (const auto& v : simplex) {
      double dist = 0.0;
      for (std::size_t k = 0; k < d; ++k) dist = std::max(dist, std::abs(v[k] - best[k]));
      diameter = std::max(diameter, dist);
    }
    const double spread = values[worst] - values[order.front()];
    if (diameter < opt.x_tolerance || spread <= opt.f_tolerance * (1.0 + std::abs(values[order.front()]))) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k) centroid[k] += simplex[order[i]][k] / static_cast<double>(d);

    const auto reflected = along(centroid, simplex[worst], -1.0);
    const double fr = f(reflected);
    if (fr < values[order.front()]) {
      const auto expanded = along(centroid, simplex[worst], -2.0);
      const double fe = f(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[order[d - 1]]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const auto contracted = along(centroid, outside ? reflected : simplex[worst], 0.5);
    const double fc = f(contracted);
    if (fc < std::min(fr, values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    const auto anchor = simplex[order.front()];
    for (std::size_t i = 1; i <= d; ++i) {
      simplex[order[i]] = along(anchor, simplex[order[i]], 0.5);
      values[order[i]] = f(simplex[order[i]]);
    }
  }

  const auto best = std::min_element(values.begin(), values.end()) - values.begin();
  res.x = simplex[static_cast<std::size_t>(best)];
  res.value = values[static_cast<std::size_t>(best)];
  return res;
}

}  // namespace lmbd
