#pragma once

// Brute-force references used by the solver and envelope tests. These are
// deliberately different algorithm families from the production solvers:
// partition / active-set enumeration with dense linear algebra, and cyclic
// Dykstra over individual slabs. Test-only code.

#include <functional>
#include <vector>

namespace heavyls::oracle {

// Isotonic LS by enumerating all consecutive-block partitions (n <= 20).
std::vector<double> isotonic_enumeration(const std::vector<double>& y,
                                         const std::vector<double>& w);

// Convex LS by enumerating active subsets of the second-difference
// constraints (n <= 12) and taking the feasible candidate with the smallest
// objective.
std::vector<double> convex_enumeration(const std::vector<double>& x,
                                       const std::vector<double>& y);

// Chain-constrained LS (|theta_{k+1}-theta_k| <= c_k) by enumerating the
// 3^(n-1) clamp patterns (n <= 12).
std::vector<double> chain_enumeration(const std::vector<double>& y,
                                      const std::vector<double>& c);

// Projection onto the pairwise slabs |theta_i - theta_j| <= bound(i,j) by
// cyclic Dykstra over the individual slabs, run to high precision.
std::vector<double> pairwise_dykstra(const std::vector<double>& y,
                                     const std::function<double(int, int)>& bound,
                                     int max_sweeps = 200000, double tol = 1e-12);

// Projected-gradient ascent of <e_j, g> over {cone} ∩ {||g||_w <= delta} ∩
// {|g| <= cap}; multistart helper for the envelope Moreau cross-check.
double envelope_pg_max(
    const std::function<std::vector<double>(const std::vector<double>&)>& cone_proj,
    const std::vector<double>& weights, double delta, double cap, int idx,
    int starts, unsigned long long seed);

}  // namespace heavyls::oracle
