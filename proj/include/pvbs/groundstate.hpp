#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "pvbs/lattice.hpp"
#include "pvbs/model.hpp"

namespace pvbs {

// c(lambda, m) = sum_{i=0}^m lambda^{2i}
double geometric_sum(double lam, int m);

// log sum_{x in X} prod_k lambda_k^{2 x_k}; always representable.
double log_weight_sum(const std::vector<Site>& X, const ModelParams& params);

// log C(Lambda) and C(Lambda) = sum_x lambda^{2x}.  The plain version throws
// rather than returning an overflowed or underflowed value.
double log_normalization(const LatticeRegion& region, const ModelParams& params);
double normalization_C(const LatticeRegion& region, const ModelParams& params);

// Normalized amplitudes lambda^x / sqrt(C), indexed by site ordinal;
// computed in log space so extreme lambda^x stay finite.  Requires a
// connected region.
Eigen::VectorXd one_particle_amplitudes(const LatticeRegion& region,
                                        const ModelParams& params);

// All-zeros configuration as a basis vector.
Eigen::VectorXd vacuum_vector(const SectorBasis& basis);

// psi_1 embedded in the given basis (FULL or the N=1 sector).
Eigen::VectorXd one_particle_ground_state(const LatticeRegion& region,
                                          const ModelParams& params,
                                          const SectorBasis& basis);

// Orthonormal pair (psi_0, psi_1) in the FULL basis, the exact kernel of the
// Hamiltonian on a connected region for delta > -1.
std::pair<Eigen::VectorXd, Eigen::VectorXd> kernel_pair(
    const LatticeRegion& region, const ModelParams& params,
    const SectorBasis& full_basis);

// max over edges of || h_(x,x+e_k) psi ||, evaluated bond by bond for a
// one-particle vector indexed by site ordinal.  O(|edges|).
double max_bond_residual_one_particle(const LatticeRegion& region,
                                      const ModelParams& params,
                                      const Eigen::VectorXd& amplitudes);

// psi_M for a species subset M (1-based labels), normalized, in the
// base-(n+1) multispecies basis.  Sums over injective assignments of sites
// to the species in M with weight prod_j lambda_{(i_j)}^{y_j}.
Eigen::VectorXd multispecies_ground_state(const LatticeRegion& region,
                                          const ModelParams& params,
                                          const std::vector<int>& species_subset);

}  // namespace pvbs
