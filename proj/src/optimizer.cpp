#include "rlmpc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rlmpc/error.hpp"

namespace rlmpc {

namespace {

void project(std::vector<double>& p, const Box& b) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::clamp(p[i], b.lower[i], b.upper[i]);
  }
}

}  // namespace

OptimizerResult minimize(const std::function<double(std::span<const double>)>& objective,
                         std::span<const double> init, const Box& bounds,
                         const OptimizerSettings& settings) {
  const std::size_t n = init.size();
  if (n == 0) throw InvalidInput("minimize: empty initial point");
  if (bounds.lower.size() != n || bounds.upper.size() != n) {
    throw InvalidInput("minimize: bounds dimension mismatch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (bounds.lower[i] > bounds.upper[i]) throw InvalidConfig("minimize: lower > upper");
  }

  const int max_evals =
      settings.max_evaluations > 0 ? settings.max_evaluations : static_cast<int>(100 * n);

  int evals = 0;
  const auto eval = [&](const std::vector<double>& p) -> double {
    const double f = objective(std::span<const double>(p));
    ++evals;
    if (!std::isfinite(f)) throw OptimizerError("minimize: objective returned non-finite value");
    return f;
  };

  // Adaptive Nelder-Mead coefficients; the defaults degrade in high
  // dimension, which matters here since the sequence problems are 2N-dim.
  const double nd = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / nd;
  const double gamma = 0.75 - 1.0 / (2.0 * nd);
  const double sigma = 1.0 - 1.0 / nd;

  // Initial simplex: the start point plus one axis perturbation per
  // coordinate, scaled by the box extent.
  std::vector<std::vector<double>> pts;
  std::vector<double> fv;
  pts.reserve(n + 1);
  fv.reserve(n + 1);

  std::vector<double> p0(init.begin(), init.end());
  project(p0, bounds);
  pts.push_back(p0);
  fv.push_back(eval(p0));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> p = p0;
    double h = 0.05 * (bounds.upper[i] - bounds.lower[i]);
    if (!std::isfinite(h)) h = std::max(0.1, 0.1 * std::abs(p0[i]));
    if (p[i] + h > bounds.upper[i]) h = -h;
    p[i] += h;
    project(p, bounds);
    pts.push_back(p);
    fv.push_back(eval(p));
  }

  std::vector<std::size_t> order(n + 1);
  const auto sort_order = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
  };

  bool converged = false;
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  while (true) {
    sort_order();
    const double f_best = fv[order.front()];
    const double f_worst = fv[order.back()];
    if (f_worst - f_best <= settings.tolerance * (std::abs(f_best) + settings.tolerance)) {
      converged = true;
      break;
    }
    if (evals >= max_evals) break;

    const std::size_t iw = order.back();
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      const std::vector<double>& p = pts[order[k]];
      for (std::size_t i = 0; i < n; ++i) centroid[i] += p[i];
    }
    for (std::size_t i = 0; i < n; ++i) centroid[i] /= nd;

    for (std::size_t i = 0; i < n; ++i) xr[i] = centroid[i] + alpha * (centroid[i] - pts[iw][i]);
    project(xr, bounds);
    const double fr = eval(xr);

    const double f_second_worst = fv[order[n - 1]];
    if (fr < f_best && evals < max_evals) {
      for (std::size_t i = 0; i < n; ++i) xe[i] = centroid[i] + beta * (xr[i] - centroid[i]);
      project(xe, bounds);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[iw] = xe;
        fv[iw] = fe;
      } else {
        pts[iw] = xr;
        fv[iw] = fr;
      }
      continue;
    }
    if (fr < f_second_worst) {
      pts[iw] = xr;
      fv[iw] = fr;
      continue;
    }
    if (evals >= max_evals) break;

    double fc;
    if (fr < fv[iw]) {  // outside contraction
      for (std::size_t i = 0; i < n; ++i) xc[i] = centroid[i] + gamma * (xr[i] - centroid[i]);
      project(xc, bounds);
      fc = eval(xc);
      if (fc <= fr) {
        pts[iw] = xc;
        fv[iw] = fc;
        continue;
      }
    } else {  // inside contraction
      for (std::size_t i = 0; i < n; ++i) xc[i] = centroid[i] - gamma * (centroid[i] - pts[iw][i]);
      project(xc, bounds);
      fc = eval(xc);
      if (fc < fv[iw]) {
        pts[iw] = xc;
        fv[iw] = fc;
        continue;
      }
    }

    // Shrink toward the best vertex.
    const std::size_t ib = order.front();
    bool budget_hit = false;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (k == ib) continue;
      if (evals >= max_evals) {
        budget_hit = true;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) {
        pts[k][i] = pts[ib][i] + sigma * (pts[k][i] - pts[ib][i]);
      }
      project(pts[k], bounds);
      fv[k] = eval(pts[k]);
    }
    if (budget_hit) break;
  }

  sort_order();
  OptimizerResult res;
  res.argmin = pts[order.front()];
  res.value = fv[order.front()];
  res.evaluations = evals;
  res.converged = converged;
  return res;
}

}  // namespace rlmpc
