#pragma once

#include <cstdint>
#include <vector>

#include "pvbs/lattice.hpp"
#include "pvbs/model.hpp"
#include "pvbs/spectra.hpp"

namespace pvbs {

// eps(lambda) = lambda/sqrt(1+lambda^2) for lambda < 1, 1/sqrt(1+lambda^2)
// for lambda > 1, and 1/sqrt(2) at lambda = 1.  Always < 1, symmetric under
// lambda -> 1/lambda.
double epsilon_factor(double lam);

// Spectral gap of the Hamiltonian on the unit hypercube B_d = {0,1}^d with
// the two-dimensional kernel deflated.  Exact diagonalization; d <= 4.
double gamma_unit_hypercube(const ModelParams& params, double tol = 1e-12,
                            std::uint64_t seed = 1);

// gamma(B_d)/2^d * prod_k (1 - sqrt(2) eps(lambda_k))^2; vanishes whenever
// some lambda_k = 1.
double martingale_lower_bound(const ModelParams& params, double tol = 1e-12,
                              std::uint64_t seed = 1);

// sum over k with lambda_k != 1 of (1-lambda_k)^2/(1+lambda_k^2); an upper
// bound for the bulk gap.
double bulk_upper_bound(const ModelParams& params);

struct RectangleProbe {
  double quotient;         // quadratic form on the one-site enlargement
  double quotient_closed;  // (bulk_term + boundary_term) / norm2
  double bulk_term;        // sum over bonds inside the box
  double boundary_term;    // bonds with one endpoint outside
  double norm2;            // ||phi||^2
};

// Rayleigh quotient of phi(z) = sum_{x in centered box} z^x xi_x, computed
// once as a sparse quadratic form on the enlarged region and once from the
// closed-form bulk/boundary sums.  The two routes must agree to 1e-10
// relative or a ConsistencyError is thrown.  N_k >= 1, z_k != 0.
RectangleProbe rectangle_probe_energy(const std::vector<int>& N,
                                      const ModelParams& params,
                                      const std::vector<double>& z);

struct Condition3Result {
  double numeric_sup;    // sup ||G_slab psi||^2 / ||psi||^2 over the family
  double analytic_bound; // lambda_d^2 c(lambda_d,n-1) / ((1+lambda_d^2) c(lambda_d,n))
  double epsilon_sq;     // eps(lambda_d)^2
  int n;
  int cross_sites;
};

// Slab overlap bound behind the martingale condition: psi ranges over the
// kernel states of T_N x [0,n] with at most one particle in the new layer,
// orthogonal to the kernel of T_N x [0,n+1]; the sup over that family of
// ||G_{slab} psi||^2/||psi||^2 is solved as a small generalized eigenproblem
// and compared with the closed-form bound.  cross_N has d-1 entries (empty
// for d = 1); n >= 1.
Condition3Result slab_condition3_bound(const ModelParams& params,
                                       const std::vector<int>& cross_N, int n);

struct DiamondProbe {
  double quotient;      // Rayleigh quotient of the sine-weighted probe
  double closed_bound;  // 2(1-cos(2pi/L)) + 2 lambda^(2L+2)/(1+lambda^2)
  double sin2_edge;     // sum of sin^2(k(x-y)) over the x+y = 0 line
  double sin2_opp;      // same over x+y = L
  double norm2;
};

// Energy of A_L psi_0 = sum_{D_L} lambda^(x+y) sin(2pi(x-y)/L) xi_(x,y) on
// the boundary-padded diamond.  L = 2k with k odd.
DiamondProbe diamond_probe_energy(int L, double lam);

}  // namespace pvbs
