#include "heavyls/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace heavyls {

std::string solve_status_name(SolveReport::Status s) {
  switch (s) {
    case SolveReport::Status::Converged: return "converged";
    case SolveReport::Status::MaxIter: return "max-iter";
    case SolveReport::Status::Infeasible: return "infeasible";
  }
  return "?";
}

MergedSample merge_ties(const Sample& sample) {
  MergedSample m;
  const std::size_t n = sample.x.size();
  m.x.reserve(n);
  m.y.reserve(n);
  m.w.reserve(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    double sy = 0.0;
    while (j < n && sample.x[j] == sample.x[i]) sy += sample.y[j++];
    const double cnt = static_cast<double>(j - i);
    const double mean = sy / cnt;
    for (std::size_t k = i; k < j; ++k) {
      const double d = sample.y[k] - mean;
      m.tie_ss += d * d;
    }
    m.x.push_back(sample.x[i]);
    m.y.push_back(mean);
    m.w.push_back(cnt);
    i = j;
  }
  return m;
}

// ---------------------------------------------------------------------------
// PAVA
// ---------------------------------------------------------------------------

std::vector<double> pava(const std::vector<double>& v,
                         const std::vector<double>& w) {
  const std::size_t n = v.size();
  if (w.size() != n) throw ArgumentError("pava: weight size mismatch");
  std::vector<double> mean(n), weight(n);
  std::vector<std::size_t> count(n);
  std::size_t top = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mean[top] = v[i];
    weight[top] = w[i];
    count[top] = 1;
    ++top;
    while (top > 1 && mean[top - 2] > mean[top - 1]) {
      const double tw = weight[top - 2] + weight[top - 1];
      mean[top - 2] =
          (weight[top - 2] * mean[top - 2] + weight[top - 1] * mean[top - 1]) /
          tw;
      weight[top - 2] = tw;
      count[top - 2] += count[top - 1];
      --top;
    }
  }
  std::vector<double> out(n);
  std::size_t pos = 0;
  for (std::size_t b = 0; b < top; ++b)
    for (std::size_t k = 0; k < count[b]; ++k) out[pos++] = mean[b];
  return out;
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

namespace {

double inf_norm(const std::vector<double>& a) {
  double m = 0.0;
  for (double t : a) m = std::max(m, std::abs(t));
  return m;
}

// Weighted least squares line through (x, v).
std::vector<double> affine_fit(const std::vector<double>& x,
                               const std::vector<double>& v,
                               const std::vector<double>& w) {
  double sw = 0, swx = 0, swxx = 0, swy = 0, swxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    swx += w[i] * x[i];
    swxx += w[i] * x[i] * x[i];
    swy += w[i] * v[i];
    swxy += w[i] * x[i] * v[i];
  }
  const double det = sw * swxx - swx * swx;
  double b0, b1;
  if (det <= 0.0) {
    b0 = swy / sw;
    b1 = 0.0;
  } else {
    b0 = (swxx * swy - swx * swxy) / det;
    b1 = (sw * swxy - swx * swy) / det;
  }
  std::vector<double> theta(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) theta[i] = b0 + b1 * x[i];
  return theta;
}

// SPD tridiagonal solve (Thomas), destroys inputs.
void tridiag_solve(std::vector<double>& diag, std::vector<double>& off,
                   std::vector<double>& rhs) {
  const std::size_t k = diag.size();
  for (std::size_t i = 1; i < k; ++i) {
    const double m = off[i - 1] / diag[i - 1];
    diag[i] -= m * off[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[k - 1] /= diag[k - 1];
  for (std::size_t i = k - 1; i-- > 0;)
    rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / diag[i];
}

}  // namespace

// ---------------------------------------------------------------------------
// Convex cone projection: primal active set on the second-difference cone.
// The equality-constrained subproblem is a weighted piecewise-linear fit with
// kinks exactly at the inactive interior points, solved through a tridiagonal
// hat-basis system; multipliers come from a left-to-right recursion of the
// stationarity identity.
// ---------------------------------------------------------------------------

namespace {

struct ConvexWork {
  const std::vector<double>&x, &v, &w;
  std::vector<double> invh;   // 1/(x_{i+1}-x_i)
  std::vector<double> rownorm;  // ||a_k||_2 per interior constraint
  int n;

  ConvexWork(const std::vector<double>& x_, const std::vector<double>& v_,
             const std::vector<double>& w_)
      : x(x_), v(v_), w(w_), n(static_cast<int>(x_.size())) {
    invh.resize(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
      const double h = x[i + 1] - x[i];
      if (!(h > 0.0)) throw ArgumentError("convex projection: abscissae must be distinct");
      invh[i] = 1.0 / h;
    }
    rownorm.resize(std::max(n - 2, 0));
    for (int k = 1; k + 1 < n; ++k) {
      const double a = invh[k - 1], b = invh[k];
      rownorm[k - 1] = std::sqrt(a * a + (a + b) * (a + b) + b * b);
    }
  }

  // a_k . theta for interior point k.
  double residual_row(const std::vector<double>& theta, int k) const {
    return invh[k - 1] * theta[k - 1] -
           (invh[k - 1] + invh[k]) * theta[k] + invh[k] * theta[k + 1];
  }

  // Piecewise-linear weighted fit with kinks at `nodes` (point indices,
  // containing 0 and n-1).
  std::vector<double> eqp(const std::vector<int>& nodes) const {
    const std::size_t K = nodes.size();
    std::vector<double> diag(K, 0.0), off(K - 1, 0.0), rhs(K, 0.0);
    std::size_t j = 0;
    std::vector<double> phi_hi(n, 0.0);
    std::vector<std::size_t> seg(n, 0);
    for (int t = 0; t < n; ++t) {
      while (j + 1 < K && nodes[j + 1] <= t) ++j;
      seg[t] = j;
      if (t == nodes[j]) {
        diag[j] += w[t];
        rhs[j] += w[t] * v[t];
        phi_hi[t] = -1.0;  // sits on a node
        continue;
      }
      const double span = x[nodes[j + 1]] - x[nodes[j]];
      const double u = (x[t] - x[nodes[j]]) / span;
      phi_hi[t] = u;
      const double p0 = 1.0 - u, p1 = u;
      diag[j] += w[t] * p0 * p0;
      diag[j + 1] += w[t] * p1 * p1;
      off[j] += w[t] * p0 * p1;
      rhs[j] += w[t] * v[t] * p0;
      rhs[j + 1] += w[t] * v[t] * p1;
    }
    tridiag_solve(diag, off, rhs);  // rhs now holds beta
    std::vector<double> theta(n);
    for (int t = 0; t < n; ++t) {
      const std::size_t s = seg[t];
      if (phi_hi[t] < 0.0)
        theta[t] = rhs[s];
      else
        theta[t] = rhs[s] * (1.0 - phi_hi[t]) + rhs[s + 1] * phi_hi[t];
    }
    return theta;
  }

  // The cone is spanned by +-affine plus the hinge generators (.-x_k)_+ at
  // interior knots, and <W(theta-v), hinge_k> equals the multiplier of
  // constraint k exactly. Suffix sums give all multipliers stably in O(n).
  // affine_gap holds |<r,1>| and |<r,x>| (zero at any subproblem optimum),
  // and rnorm the dual norm ||r||_{W^{-1}} used for cosine normalization.
  void multipliers(const std::vector<double>& theta,
                   std::vector<double>& lambda, double& affine_gap,
                   double& rnorm) const {
    lambda.assign(std::max(n - 2, 0), 0.0);
    double suffix_r = 0.0, suffix_rx = 0.0, s1 = 0.0, sx = 0.0, rn = 0.0;
    std::vector<double> rvec(n);
    for (int t = 0; t < n; ++t) {
      rvec[t] = w[t] * (theta[t] - v[t]);
      s1 += rvec[t];
      sx += rvec[t] * x[t];
      rn += rvec[t] * rvec[t] / w[t];
    }
    rnorm = std::sqrt(rn);
    for (int t = n - 1; t >= 1; --t) {
      suffix_r += rvec[t];
      suffix_rx += rvec[t] * x[t];
      const int k = t - 1;  // hinge at x_k pairs with constraint k
      if (k >= 1 && k + 1 < n)
        lambda[k - 1] = suffix_rx - x[k] * suffix_r;
    }
    affine_gap = std::max(std::abs(s1), std::abs(sx));
  }

  // ||(.-x_k)_+||_W for all interior k at once (suffix sums).
  std::vector<double> hinge_norms() const {
    std::vector<double> out(std::max(n - 2, 0));
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (int t = n - 1; t >= 1; --t) {
      s0 += w[t];
      s1 += w[t] * x[t];
      s2 += w[t] * x[t] * x[t];
      const int k = t - 1;
      if (k >= 1 && k + 1 < n)
        out[k - 1] = std::sqrt(std::max(s2 - 2.0 * x[k] * s1 + x[k] * x[k] * s0, 0.0));
    }
    return out;
  }
};

}  // namespace

ProjOutcome project_convex_cone(const std::vector<double>& v,
                                const std::vector<double>& w,
                                const std::vector<double>& x,
                                int max_iterations) {
  const int n = static_cast<int>(v.size());
  if (w.size() != v.size() || x.size() != v.size())
    throw ArgumentError("project_convex_cone: size mismatch");
  if (n <= 2) return {v, 0, 0.0, true};

  ConvexWork work(x, v, w);
  const int m = n - 2;
  const double scale = std::max(1.0, inf_norm(v));
  const double step_tol = 1e-13 * scale;
  const double cos_tol = 1e-12;

  std::vector<char> active(m, 1);
  std::vector<double> theta = affine_fit(x, v, w);
  std::vector<double> lambda;
  const std::vector<double> hnorm = work.hinge_norms();
  int iter = 0;
  bool converged = false;

  std::vector<int> nodes;
  while (iter < max_iterations) {
    ++iter;
    nodes.clear();
    nodes.push_back(0);
    for (int k = 1; k + 1 < n; ++k)
      if (!active[k - 1]) nodes.push_back(k);
    nodes.push_back(n - 1);

    std::vector<double> star =
        (static_cast<int>(nodes.size()) == n) ? v : work.eqp(nodes);
    double dmax = 0.0;
    for (int t = 0; t < n; ++t) dmax = std::max(dmax, std::abs(star[t] - theta[t]));

    if (dmax <= step_tol) {
      theta = std::move(star);
      double affine_gap, rnorm;
      work.multipliers(theta, lambda, affine_gap, rnorm);
      // Drop the constraint whose hinge generator has the most negative
      // multiplier cosine (an inactive constraint has multiplier 0 by
      // complementarity, so scanning actives suffices).
      int worst = -1;
      double worst_val = -cos_tol * std::max(rnorm, 1e-10 * scale);
      for (int k = 1; k + 1 < n; ++k) {
        if (!active[k - 1]) continue;
        const double lam = lambda[k - 1] / std::max(hnorm[k - 1], 1e-300);
        if (lam < worst_val) {
          worst_val = lam;
          worst = k - 1;
        }
      }
      if (worst < 0) {
        converged = true;
        break;
      }
      active[worst] = 0;
      continue;
    }

    // Step toward the subproblem solution, stopping at the first inactive
    // constraint that would be crossed.
    double tstep = 1.0;
    int blocker = -1;
    for (int k = 1; k + 1 < n; ++k) {
      if (active[k - 1]) continue;
      const double g1 = work.residual_row(star, k);
      if (g1 >= 0.0) continue;
      const double g0 = std::max(work.residual_row(theta, k), 0.0);
      const double tc = g0 / (g0 - g1);
      if (tc < tstep) {
        tstep = tc;
        blocker = k - 1;
      }
    }
    if (blocker < 0) {
      theta = std::move(star);
    } else {
      for (int t = 0; t < n; ++t) theta[t] += tstep * (star[t] - theta[t]);
      active[blocker] = 1;
    }
  }

  ProjOutcome out;
  out.theta = theta;
  out.iterations = iter;
  out.converged = converged;

  // Projection optimality onto a closed convex cone: theta in K, residual in
  // the polar (orthogonal to the affine lineality, nonpositive against every
  // hinge generator), and <v-theta, theta> = 0.
  double feas = 0.0;
  for (int k = 1; k + 1 < n; ++k)
    feas = std::max(feas, -work.residual_row(theta, k) / work.rownorm[k - 1]);
  double affine_gap, rnorm;
  work.multipliers(theta, lambda, affine_gap, rnorm);
  const double rden = std::max(rnorm, 1e-10 * scale);
  double dual = 0.0;
  for (int k = 1; k + 1 < n; ++k)
    dual = std::max(dual, -lambda[k - 1] / (std::max(hnorm[k - 1], 1e-300) * rden));
  double moreau = 0.0, vnorm2 = 0.0;
  for (int t = 0; t < n; ++t) {
    moreau += w[t] * (v[t] - theta[t]) * theta[t];
    vnorm2 += w[t] * v[t] * v[t];
  }
  out.kkt_residual = std::max({feas / scale, dual, affine_gap / rden,
                               std::abs(moreau) / std::max(1.0, vnorm2)});
  return out;
}

// ---------------------------------------------------------------------------
// Chain projection: lo_k <= theta_{k+1} - theta_k <= hi_k. The subproblem
// under a fixed clamp pattern is a per-block weighted mean; multipliers are
// partial sums of the block residuals.
// ---------------------------------------------------------------------------

ProjOutcome project_chain(const std::vector<double>& v,
                          const std::vector<double>& w,
                          const std::vector<double>& lo,
                          const std::vector<double>& hi,
                          int max_iterations) {
  const int n = static_cast<int>(v.size());
  if (w.size() != v.size()) throw ArgumentError("project_chain: size mismatch");
  if (n < 2) return {v, 0, 0.0, true};
  const int m = n - 1;
  if (static_cast<int>(lo.size()) != m || static_cast<int>(hi.size()) != m)
    throw ArgumentError("project_chain: bound size mismatch");
  for (int k = 0; k < m; ++k)
    if (lo[k] > hi[k]) throw ArgumentError("project_chain: lo > hi");

  const double scale = std::max(1.0, inf_norm(v));
  const double step_tol = 1e-13 * scale;
  const double dual_tol = 1e-11 * scale;

  // Greedy feasible start; clamped gaps seed the working set.
  std::vector<signed char> state(m, 0);
  std::vector<double> theta(n);
  theta[0] = v[0];
  for (int k = 0; k < m; ++k) {
    const double low = theta[k] + lo[k], high = theta[k] + hi[k];
    if (v[k + 1] > high) {
      theta[k + 1] = high;
      state[k] = 1;
    } else if (v[k + 1] < low) {
      theta[k + 1] = low;
      state[k] = -1;
    } else {
      theta[k + 1] = v[k + 1];
    }
  }

  std::vector<double> star(n), lambda(m, 0.0);
  auto eqp = [&](std::vector<double>& out) {
    int p = 0;
    while (p < n) {
      int q = p;
      double off = 0.0, sw = w[p], swr = w[p] * v[p];
      std::vector<double> offs{0.0};
      while (q < n - 1 && state[q] != 0) {
        off += (state[q] == 1) ? hi[q] : lo[q];
        ++q;
        offs.push_back(off);
        sw += w[q];
        swr += w[q] * (v[q] - off);
      }
      const double c = swr / sw;
      for (int t = p; t <= q; ++t) out[t] = c + offs[t - p];
      p = q + 1;
    }
  };

  int iter = 0;
  bool converged = false;
  while (iter < max_iterations) {
    ++iter;
    eqp(star);
    double dmax = 0.0;
    for (int t = 0; t < n; ++t) dmax = std::max(dmax, std::abs(star[t] - theta[t]));

    if (dmax <= step_tol) {
      theta = star;
      // Multipliers: lambda_k = -sum of residuals over the block prefix.
      double drift = 0.0;
      {
        double run = 0.0;
        for (int t = 0; t < n; ++t) {
          const double r = w[t] * (theta[t] - v[t]);
          run -= r;
          if (t < m && state[t] != 0) {
            lambda[t] = run;
          } else {
            drift = std::max(drift, std::abs(run));
            run = 0.0;
            if (t < m) lambda[t] = 0.0;
          }
        }
      }
      int worst = -1;
      double worst_val = dual_tol;
      for (int k = 0; k < m; ++k) {
        if (state[k] == 0) continue;
        const double vio = (state[k] == 1) ? lambda[k] : -lambda[k];
        if (vio > worst_val) {
          worst_val = vio;
          worst = k;
        }
      }
      if (worst < 0) {
        converged = true;
        break;
      }
      state[worst] = 0;
      continue;
    }

    double tstep = 1.0;
    int blocker = -1;
    signed char bside = 0;
    for (int k = 0; k < m; ++k) {
      if (state[k] != 0) continue;
      const double g = theta[k + 1] - theta[k];
      const double g1 = star[k + 1] - star[k];
      if (g1 > hi[k]) {
        const double tc = (hi[k] - g) / (g1 - g);
        if (tc < tstep) {
          tstep = std::max(tc, 0.0);
          blocker = k;
          bside = 1;
        }
      } else if (g1 < lo[k]) {
        const double tc = (lo[k] - g) / (g1 - g);
        if (tc < tstep) {
          tstep = std::max(tc, 0.0);
          blocker = k;
          bside = -1;
        }
      }
    }
    if (blocker < 0) {
      theta = star;
    } else {
      for (int t = 0; t < n; ++t) theta[t] += tstep * (star[t] - theta[t]);
      state[blocker] = bside;
    }
  }

  ProjOutcome out;
  out.theta = theta;
  out.iterations = iter;
  out.converged = converged;
  double feas = 0.0, dual = 0.0, drift = 0.0;
  {
    double run = 0.0;
    for (int t = 0; t < n; ++t) {
      const double r = w[t] * (theta[t] - v[t]);
      run -= r;
      if (t < m && state[t] != 0) {
        const double vio = (state[t] == 1) ? run : -run;
        dual = std::max(dual, vio);
      } else {
        drift = std::max(drift, std::abs(run));
        run = 0.0;
      }
    }
    for (int k = 0; k < m; ++k) {
      const double g = theta[k + 1] - theta[k];
      feas = std::max({feas, g - hi[k], lo[k] - g});
    }
  }
  out.kkt_residual = std::max({feas, dual, drift}) / scale;
  return out;
}

// ---------------------------------------------------------------------------
// Pairwise slab projection: |theta_i - theta_j| <= bound(i,j). Active
// constraints form a forest of rigid components; the subproblem is a
// weighted mean per component and multipliers come from leaf elimination.
// ---------------------------------------------------------------------------

namespace {

struct Edge {
  int i, j;          // i < j
  signed char side;  // +1: theta_i - theta_j = +b, -1: = -b
  double b;
};

}  // namespace

ProjOutcome project_pairwise(const std::vector<double>& v,
                             const std::vector<double>& w,
                             const std::function<double(int, int)>& bound,
                             int max_iterations) {
  const int n = static_cast<int>(v.size());
  if (w.size() != v.size())
    throw ArgumentError("project_pairwise: size mismatch");
  if (n < 2) return {v, 0, 0.0, true};

  const double scale = std::max(1.0, inf_norm(v));
  const double step_tol = 1e-13 * scale;
  const double dual_tol = 1e-11 * scale;

  std::vector<std::vector<double>> b(n);
  for (int i = 0; i < n; ++i) {
    b[i].resize(n - i);
    for (int j = i + 1; j < n; ++j) {
      b[i][j - i] = bound(i, j);
      if (!(b[i][j - i] > 0.0))
        throw ArgumentError("project_pairwise: bounds must be positive");
    }
  }

  // Constant start (strictly feasible since all bounds are positive).
  double sw = 0.0, swv = 0.0;
  for (int i = 0; i < n; ++i) {
    sw += w[i];
    swv += w[i] * v[i];
  }
  std::vector<double> theta(n, swv / sw);
  std::vector<Edge> edges;
  std::vector<char> pair_active(static_cast<std::size_t>(n) * n, 0);
  const double block_eps = 1e-12 * scale;

  std::vector<int> comp(n), order;
  std::vector<double> offs(n), star(n);
  std::vector<std::vector<int>> adj(n);

  auto eqp = [&](std::vector<double>& out) {
    for (int i = 0; i < n; ++i) adj[i].clear();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      adj[edges[e].i].push_back(static_cast<int>(e));
      adj[edges[e].j].push_back(static_cast<int>(e));
    }
    std::fill(comp.begin(), comp.end(), -1);
    for (int root = 0; root < n; ++root) {
      if (comp[root] >= 0) continue;
      order.clear();
      order.push_back(root);
      comp[root] = root;
      offs[root] = 0.0;
      for (std::size_t q = 0; q < order.size(); ++q) {
        const int t = order[q];
        for (int e : adj[t]) {
          const Edge& ed = edges[e];
          const int other = (ed.i == t) ? ed.j : ed.i;
          if (comp[other] >= 0) continue;
          comp[other] = root;
          // theta_i - theta_j = side * b
          offs[other] = (ed.i == t) ? offs[t] - ed.side * ed.b
                                    : offs[t] + ed.side * ed.b;
          order.push_back(other);
        }
      }
      double csw = 0.0, cswr = 0.0;
      for (int t : order) {
        csw += w[t];
        cswr += w[t] * (v[t] - offs[t]);
      }
      const double c = cswr / csw;
      for (int t : order) out[t] = c + offs[t];
    }
  };

  std::vector<double> lambda;
  std::vector<double> rho(n);
  std::vector<int> deg(n);
  auto multipliers = [&](double& drift, double& dual_violation,
                         int& worst_edge) {
    lambda.assign(edges.size(), 0.0);
    for (int i = 0; i < n; ++i) adj[i].clear();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      adj[edges[e].i].push_back(static_cast<int>(e));
      adj[edges[e].j].push_back(static_cast<int>(e));
    }
    for (int t = 0; t < n; ++t) {
      rho[t] = w[t] * (theta[t] - v[t]);
      deg[t] = static_cast<int>(adj[t].size());
    }
    std::vector<char> edge_done(edges.size(), 0);
    std::deque<int> leaves;
    for (int t = 0; t < n; ++t)
      if (deg[t] == 1) leaves.push_back(t);
    while (!leaves.empty()) {
      const int t = leaves.front();
      leaves.pop_front();
      if (deg[t] != 1) continue;
      int eid = -1;
      for (int e : adj[t])
        if (!edge_done[e]) eid = e;
      if (eid < 0) continue;
      const Edge& ed = edges[eid];
      const double coeff = (ed.i == t) ? 1.0 : -1.0;  // a_e = e_i - e_j
      lambda[eid] = rho[t] / coeff;
      rho[t] = 0.0;  // equation consumed by the new multiplier
      const int other = (ed.i == t) ? ed.j : ed.i;
      rho[other] -= lambda[eid] * ((ed.i == other) ? 1.0 : -1.0);
      edge_done[eid] = 1;
      --deg[t];
      if (--deg[other] == 1) leaves.push_back(other);
    }
    // Forest structure guarantees every edge is pruned; tree roots and
    // isolated nodes must end with zero residual mass.
    drift = 0.0;
    for (int t = 0; t < n; ++t)
      if (deg[t] == 0) drift = std::max(drift, std::abs(rho[t]));
    dual_violation = 0.0;
    worst_edge = -1;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      // side +1 active means the upper slab: lambda must be <= 0.
      const double vio = (edges[e].side == 1) ? lambda[e] : -lambda[e];
      if (vio > dual_violation) {
        dual_violation = vio;
        worst_edge = static_cast<int>(e);
      }
    }
  };

  int iter = 0;
  bool converged = false;
  while (iter < max_iterations) {
    ++iter;
    eqp(star);
    double dmax = 0.0;
    for (int t = 0; t < n; ++t) dmax = std::max(dmax, std::abs(star[t] - theta[t]));

    if (dmax <= step_tol) {
      theta = star;
      double drift, dual;
      int worst;
      multipliers(drift, dual, worst);
      if (worst < 0 || dual <= dual_tol) {
        converged = true;
        break;
      }
      pair_active[static_cast<std::size_t>(edges[worst].i) * n +
                  edges[worst].j] = 0;
      edges.erase(edges.begin() + worst);
      continue;
    }

    double tstep = 1.0;
    Edge blocker{-1, -1, 0, 0.0};
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (pair_active[static_cast<std::size_t>(i) * n + j]) continue;
        const double bb = b[i][j - i];
        const double g = theta[i] - theta[j];
        const double g1 = star[i] - star[j];
        if (g1 > bb + block_eps) {
          const double tc = (bb - g) / (g1 - g);
          if (tc < tstep) {
            tstep = std::max(tc, 0.0);
            blocker = {i, j, 1, bb};
          }
        } else if (g1 < -bb - block_eps) {
          const double tc = (-bb - g) / (g1 - g);
          if (tc < tstep) {
            tstep = std::max(tc, 0.0);
            blocker = {i, j, -1, bb};
          }
        }
      }
    }
    if (blocker.i < 0) {
      theta = star;
    } else {
      for (int t = 0; t < n; ++t) theta[t] += tstep * (star[t] - theta[t]);
      edges.push_back(blocker);
      pair_active[static_cast<std::size_t>(blocker.i) * n + blocker.j] = 1;
    }
  }

  ProjOutcome out;
  out.theta = theta;
  out.iterations = iter;
  out.converged = converged;
  double feas = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      feas = std::max(feas, std::abs(theta[i] - theta[j]) - b[i][j - i]);
  double drift, dual;
  int worst;
  multipliers(drift, dual, worst);
  out.kkt_residual = std::max({feas, dual, drift}) / scale;
  return out;
}

// ---------------------------------------------------------------------------
// Dykstra between a set projector and the box [-phi, phi].
// ---------------------------------------------------------------------------

DykstraOutcome dykstra_box(
    const std::function<std::vector<double>(const std::vector<double>&)>&
        project_set,
    double phi, const std::vector<double>& v, double tol, int max_sweeps) {
  const std::size_t n = v.size();
  DykstraOutcome out;
  std::vector<double> y = project_set(v);
  bool inside = true;
  for (double t : y)
    if (std::abs(t) > phi + tol) inside = false;
  if (inside) {
    out.point = std::move(y);
    out.sweeps = 1;
    return out;
  }

  std::vector<double> x = v, p(n, 0.0), q(n, 0.0), z(n), tmp(n);
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + p[i];
    y = project_set(tmp);
    for (std::size_t i = 0; i < n; ++i) p[i] = tmp[i] - y[i];
    double gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double zi = std::clamp(y[i] + q[i], -phi, phi);
      q[i] = y[i] + q[i] - zi;
      gap = std::max(gap, std::abs(zi - x[i]));
      z[i] = zi;
    }
    double split = 0.0;
    for (std::size_t i = 0; i < n; ++i) split = std::max(split, std::abs(y[i] - z[i]));
    x = z;
    if (gap <= tol && split <= tol) {
      out.point = y;
      out.sweeps = sweep;
      return out;
    }
  }
  out.point = y;
  out.sweeps = max_sweeps;
  out.converged = false;
  return out;
}

// ---------------------------------------------------------------------------
// Fits
// ---------------------------------------------------------------------------

namespace {

double raw_objective(const Sample& sample, const FittedFn& fn) {
  double acc = 0.0;
  for (std::size_t i = 0; i < sample.x.size(); ++i) {
    const double d = sample.y[i] - fn(sample.x[i]);
    acc += d * d;
  }
  return 0.5 * acc;
}

double monotone_violation(const std::vector<double>& t) {
  double m = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) m = std::max(m, t[i - 1] - t[i]);
  return m;
}

double box_violation(const std::vector<double>& t, double phi) {
  double m = 0.0;
  for (double a : t) m = std::max(m, std::abs(a) - phi);
  return std::max(m, 0.0);
}

void check_bound(const std::optional<double>& bound) {
  if (bound && !(*bound > 0.0))
    throw ArgumentError("fit: bound must be positive");
}

}  // namespace

FitResult fit_isotonic(const Sample& sample, std::optional<double> bound) {
  check_bound(bound);
  MergedSample ms = merge_ties(sample);
  SolveReport rep;
  std::vector<double> theta;
  if (!bound) {
    theta = pava(ms.y, ms.w);
    rep.iterations = 1;
  } else {
    auto proj = [&](const std::vector<double>& u) { return pava(u, ms.w); };
    DykstraOutcome d = dykstra_box(proj, *bound, ms.y);
    theta = std::move(d.point);
    for (double& t : theta) t = std::clamp(t, -*bound, *bound);
    rep.iterations = d.sweeps;
    if (!d.converged) rep.status = SolveReport::Status::MaxIter;
  }

  const double scale = std::max(1.0, inf_norm(ms.y));
  double moreau = 0.0, ynorm2 = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    moreau += ms.w[i] * (ms.y[i] - theta[i]) * theta[i];
    ynorm2 += ms.w[i] * ms.y[i] * ms.y[i];
  }
  rep.kkt_residual = monotone_violation(theta) / scale;
  if (!bound)
    rep.kkt_residual =
        std::max(rep.kkt_residual, std::abs(moreau) / std::max(1.0, ynorm2));
  else
    rep.kkt_residual = std::max(rep.kkt_residual, box_violation(theta, *bound));

  FittedFn fn = FittedFn::step(ms.x, theta);
  rep.objective = raw_objective(sample, fn);
  return {std::move(fn), rep};
}

FitResult fit_convex(const Sample& sample, std::optional<double> bound) {
  check_bound(bound);
  MergedSample ms = merge_ties(sample);
  if (ms.x.size() < 3)
    throw ArgumentError("fit_convex: need at least 3 distinct abscissae");

  SolveReport rep;
  std::vector<double> theta;
  if (!bound) {
    ProjOutcome p = project_convex_cone(ms.y, ms.w, ms.x);
    theta = std::move(p.theta);
    rep.iterations = p.iterations;
    rep.kkt_residual = p.kkt_residual;
    if (!p.converged) rep.status = SolveReport::Status::MaxIter;
  } else {
    int inner_iters = 0;
    bool inner_ok = true;
    auto proj = [&](const std::vector<double>& u) {
      ProjOutcome p = project_convex_cone(u, ms.w, ms.x);
      inner_iters += p.iterations;
      inner_ok = inner_ok && p.converged;
      return p.theta;
    };
    DykstraOutcome d = dykstra_box(proj, *bound, ms.y);
    theta = std::move(d.point);
    rep.iterations = inner_iters;
    if (!d.converged || !inner_ok) rep.status = SolveReport::Status::MaxIter;
    ProjOutcome chk = project_convex_cone(theta, ms.w, ms.x);
    double moved = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i)
      moved = std::max(moved, std::abs(chk.theta[i] - theta[i]));
    rep.kkt_residual = std::max(moved, box_violation(theta, *bound));
  }

  FittedFn fn = FittedFn::linear(ms.x, theta);
  rep.objective = raw_objective(sample, fn);
  return {std::move(fn), rep};
}

FitResult fit_holder(const Sample& sample, double gamma, double lip,
                     std::optional<double> bound) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw ArgumentError("fit_holder: gamma must lie in (0,1]");
  if (!(lip > 0.0)) throw ArgumentError("fit_holder: lip must be > 0");
  check_bound(bound);
  MergedSample ms = merge_ties(sample);
  const int n = static_cast<int>(ms.x.size());
  if (n < 2) throw ArgumentError("fit_holder: need at least 2 distinct abscissae");
  if (gamma < 1.0 && n > 2000)
    throw ConfigError("fit_holder: gamma < 1 uses all pairs; n capped at 2000");

  auto proj = [&](const std::vector<double>& u) -> ProjOutcome {
    if (gamma == 1.0) {
      std::vector<double> lo(n - 1), hi(n - 1);
      for (int k = 0; k + 1 < n; ++k) {
        hi[k] = lip * (ms.x[k + 1] - ms.x[k]);
        lo[k] = -hi[k];
      }
      return project_chain(u, ms.w, lo, hi);
    }
    auto bfun = [&](int i, int j) {
      return lip * std::pow(std::abs(ms.x[j] - ms.x[i]), gamma);
    };
    return project_pairwise(u, ms.w, bfun);
  };

  SolveReport rep;
  std::vector<double> theta;
  if (!bound) {
    ProjOutcome p = proj(ms.y);
    theta = std::move(p.theta);
    rep.iterations = p.iterations;
    rep.kkt_residual = p.kkt_residual;
    if (!p.converged) rep.status = SolveReport::Status::MaxIter;
  } else {
    int inner_iters = 0;
    bool inner_ok = true;
    auto pf = [&](const std::vector<double>& u) {
      ProjOutcome p = proj(u);
      inner_iters += p.iterations;
      inner_ok = inner_ok && p.converged;
      return p.theta;
    };
    DykstraOutcome d = dykstra_box(pf, *bound, ms.y);
    theta = std::move(d.point);
    rep.iterations = inner_iters;
    if (!d.converged || !inner_ok) rep.status = SolveReport::Status::MaxIter;
    ProjOutcome chk = proj(theta);
    double moved = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i)
      moved = std::max(moved, std::abs(chk.theta[i] - theta[i]));
    rep.kkt_residual = std::max(moved, box_violation(theta, *bound));
  }

  FittedFn fn = FittedFn::linear(ms.x, theta);
  rep.objective = raw_objective(sample, fn);
  return {std::move(fn), rep};
}

FitResult fit_shape(const Sample& sample, const ShapeClass& cls,
                    std::optional<double> bound) {
  cls.validate();
  const std::optional<double> phi = bound ? bound : cls.phi;
  switch (cls.kind) {
    case ShapeKind::Monotone: return fit_isotonic(sample, phi);
    case ShapeKind::Convex: return fit_convex(sample, phi);
    case ShapeKind::Holder: return fit_holder(sample, cls.gamma, cls.lip, phi);
  }
  throw ArgumentError("fit_shape: unknown class");
}

std::vector<double> project_cone(const std::vector<double>& v,
                                 const ConeConstraint& cone,
                                 const std::vector<double>& weights) {
  if (v.size() != weights.size())
    throw ArgumentError("project_cone: size mismatch");
  for (double w : weights)
    if (!(w > 0.0)) throw ArgumentError("project_cone: weights must be positive");
  switch (cone.kind) {
    case ConeConstraint::Kind::Monotone:
      return pava(v, weights);
    case ConeConstraint::Kind::ConvexSecondDifference: {
      if (cone.abscissae.size() != v.size())
        throw ArgumentError("project_cone: abscissae size mismatch");
      return project_convex_cone(v, weights, cone.abscissae).theta;
    }
  }
  throw ArgumentError("project_cone: unknown cone");
}

}  // namespace heavyls
