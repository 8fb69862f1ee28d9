#include "oracles.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "heavyls/rng.hpp"

namespace heavyls::oracle {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double objective(const std::vector<double>& theta, const std::vector<double>& y,
                 const std::vector<double>& w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    acc += w[i] * (y[i] - theta[i]) * (y[i] - theta[i]);
  return acc;
}
}  // namespace

std::vector<double> isotonic_enumeration(const std::vector<double>& y,
                                         const std::vector<double>& w) {
  const int n = static_cast<int>(y.size());
  if (n > 20) throw std::invalid_argument("isotonic_enumeration: n too large");
  double best = kInf;
  std::vector<double> best_theta(n), theta(n);
  const unsigned long long masks = 1ull << (n - 1);
  for (unsigned long long mask = 0; mask < masks; ++mask) {
    // bit k set: cut between k and k+1
    int start = 0;
    double prev_mean = -kInf;
    bool feasible = true;
    for (int k = 0; k <= n - 1; ++k) {
      const bool cut = (k == n - 1) || ((mask >> k) & 1ull);
      if (!cut) continue;
      double sw = 0.0, swy = 0.0;
      for (int t = start; t <= k; ++t) {
        sw += w[t];
        swy += w[t] * y[t];
      }
      const double mean = swy / sw;
      if (mean < prev_mean) {
        feasible = false;
        break;
      }
      for (int t = start; t <= k; ++t) theta[t] = mean;
      prev_mean = mean;
      start = k + 1;
    }
    if (!feasible) continue;
    const double obj = objective(theta, y, w);
    if (obj < best) {
      best = obj;
      best_theta = theta;
    }
  }
  return best_theta;
}

std::vector<double> convex_enumeration(const std::vector<double>& x,
                                       const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  if (n > 12) throw std::invalid_argument("convex_enumeration: n too large");
  const int m = n - 2;
  std::vector<double> invh(n - 1);
  for (int i = 0; i + 1 < n; ++i) invh[i] = 1.0 / (x[i + 1] - x[i]);
  auto row_dot = [&](int k, const Eigen::VectorXd& t) {
    return invh[k - 1] * t[k - 1] - (invh[k - 1] + invh[k]) * t[k] +
           invh[k] * t[k + 1];
  };

  Eigen::VectorXd yv(n);
  for (int i = 0; i < n; ++i) yv[i] = y[i];
  double best = kInf;
  Eigen::VectorXd best_theta = yv;
  for (unsigned long long mask = 0; mask < (1ull << m); ++mask) {
    std::vector<int> act;
    for (int c = 0; c < m; ++c)
      if ((mask >> c) & 1ull) act.push_back(c + 1);
    Eigen::VectorXd theta;
    if (act.empty()) {
      theta = yv;
    } else {
      Eigen::MatrixXd A(static_cast<int>(act.size()), n);
      A.setZero();
      for (std::size_t r = 0; r < act.size(); ++r) {
        const int k = act[r];
        A(r, k - 1) = invh[k - 1];
        A(r, k) = -(invh[k - 1] + invh[k]);
        A(r, k + 1) = invh[k];
      }
      // Equality-constrained projection: theta = y - A^T (A A^T)^+ A y.
      Eigen::MatrixXd G = A * A.transpose();
      Eigen::VectorXd lam =
          G.completeOrthogonalDecomposition().solve(A * yv);
      theta = yv - A.transpose() * lam;
    }
    bool feasible = true;
    for (int k = 1; k + 1 < n; ++k) {
      if (row_dot(k, theta) < -1e-10) {
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;
    const double obj = (yv - theta).squaredNorm();
    if (obj < best - 1e-15) {
      best = obj;
      best_theta = theta;
    }
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = best_theta[i];
  return out;
}

std::vector<double> chain_enumeration(const std::vector<double>& y,
                                      const std::vector<double>& c) {
  const int n = static_cast<int>(y.size());
  if (n > 12) throw std::invalid_argument("chain_enumeration: n too large");
  const int m = n - 1;
  long long patterns = 1;
  for (int i = 0; i < m; ++i) patterns *= 3;

  double best = kInf;
  std::vector<double> best_theta(y), theta(n), offs(n);
  std::vector<int> state(m);
  for (long long code = 0; code < patterns; ++code) {
    long long tmp = code;
    for (int k = 0; k < m; ++k) {
      state[k] = static_cast<int>(tmp % 3) - 1;  // -1, 0, +1
      tmp /= 3;
    }
    // blockwise means with fixed offsets
    int p = 0;
    while (p < n) {
      int q = p;
      offs[p] = 0.0;
      double sw = 1.0, swr = y[p];
      while (q < n - 1 && state[q] != 0) {
        offs[q + 1] = offs[q] + state[q] * c[q];
        ++q;
        sw += 1.0;
        swr += y[q] - offs[q];
      }
      const double cb = swr / sw;
      for (int t = p; t <= q; ++t) theta[t] = cb + offs[t];
      p = q + 1;
    }
    bool feasible = true;
    for (int k = 0; k < m; ++k) {
      if (std::abs(theta[k + 1] - theta[k]) > c[k] + 1e-10) {
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;
    double obj = 0.0;
    for (int t = 0; t < n; ++t) obj += (y[t] - theta[t]) * (y[t] - theta[t]);
    if (obj < best - 1e-15) {
      best = obj;
      best_theta = theta;
    }
  }
  return best_theta;
}

std::vector<double> pairwise_dykstra(const std::vector<double>& y,
                                     const std::function<double(int, int)>& bound,
                                     int max_sweeps, double tol) {
  const int n = static_cast<int>(y.size());
  std::vector<double> theta = y;
  const int pairs = n * (n - 1) / 2;
  std::vector<double> corr(pairs, 0.0);
  std::vector<double> b(pairs);
  {
    int idx = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) b[idx++] = bound(i, j);
  }
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double moved = 0.0;
    int idx = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j, ++idx) {
        // Dykstra: add back the stored correction, project onto the slab
        // |t_i - t_j| <= b, store the new correction. The slab projection
        // shifts the pair symmetrically.
        const double ti = theta[i] + corr[idx], tj = theta[j] - corr[idx];
        const double d = ti - tj;
        double shift = 0.0;
        if (d > b[idx]) shift = 0.5 * (d - b[idx]);
        else if (d < -b[idx]) shift = 0.5 * (d + b[idx]);
        const double ni = ti - shift, nj = tj + shift;
        moved = std::max(moved, std::abs(ni - theta[i]));
        moved = std::max(moved, std::abs(nj - theta[j]));
        corr[idx] = ti - ni;
        theta[i] = ni;
        theta[j] = nj;
      }
    }
    if (moved < tol) break;
  }
  return theta;
}

double envelope_pg_max(
    const std::function<std::vector<double>(const std::vector<double>&)>& cone_proj,
    const std::vector<double>& weights, double delta, double cap, int idx,
    int starts, unsigned long long seed) {
  const int n = static_cast<int>(weights.size());
  auto wnorm = [&](const std::vector<double>& g) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += weights[i] * g[i] * g[i];
    return std::sqrt(acc);
  };
  auto feasible = [&](std::vector<double> g) {
    for (double& t : g) t = std::clamp(t, -cap, cap);
    g = cone_proj(g);
    const double nn = wnorm(g);
    if (nn > delta)
      for (double& t : g) t *= delta / nn;
    return g;
  };

  double best = 0.0;
  Rng rng(seed);
  for (int s = 0; s < starts; ++s) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = rng.normal();
    g = feasible(g);
    double step = 0.5;
    for (int it = 0; it < 400; ++it) {
      std::vector<double> trial = g;
      trial[idx] += step;
      trial = feasible(trial);
      if (std::abs(trial[idx]) > std::abs(g[idx]) + 1e-14) {
        g = trial;
      } else {
        step *= 0.5;
        if (step < 1e-10) break;
      }
    }
    best = std::max(best, std::abs(g[idx]));
  }
  return best;
}

}  // namespace heavyls::oracle
