#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "pvbs/lattice.hpp"

namespace pvbs {

using SparseOperator = Eigen::SparseMatrix<double>;

// lambda_k > 0 per direction; delta is the anisotropy of the generalized
// bond term (delta > -1 for every ground-state claim).  multi_lambda is an
// n x d matrix of per-species, per-direction parameters; n rows means n
// particle species (row i-1 holds the parameters of species i, species 0
// is the vacuum with lambda identically 1).
struct ModelParams {
  Eigen::VectorXd lambda;
  double delta = 0.0;
  Eigen::MatrixXd multi_lambda;

  int dim() const { return static_cast<int>(lambda.size()); }
  int species() const {
    return multi_lambda.rows() > 0 ? static_cast<int>(multi_lambda.rows()) : 1;
  }
  void validate() const;  // throws ValidationError
};

inline constexpr int kFullSpaceMaxSites = 22;
inline constexpr long kMultispeciesMaxDim = 531441;  // 3^12

// Occupation basis over the sites of a region, bit i of a configuration is
// the occupation of site ordinal i.  FULL holds all 2^n configurations in
// increasing integer order; a particle-number sector holds the binomial(n,N)
// configurations with N bits set, same order.
class SectorBasis {
 public:
  static SectorBasis full(const LatticeRegion& region,
                          int max_sites = kFullSpaceMaxSites);
  static SectorBasis sector(const LatticeRegion& region, int n_particles);

  long size() const { return static_cast<long>(configs_.size()); }
  int sites() const { return sites_; }
  int particles() const { return particles_; }  // -1 for FULL
  std::uint64_t config(long rank) const { return configs_[rank]; }
  long rank_of(std::uint64_t c) const;  // -1 if absent

 private:
  SectorBasis(int sites, int particles, std::vector<std::uint64_t> configs)
      : sites_(sites), particles_(particles), configs_(std::move(configs)) {}
  int sites_;
  int particles_;
  std::vector<std::uint64_t> configs_;
};

// Two-site bond term in the basis (|00>, |01>, |10>, |11>), lower-ordinal
// site first.  Spectrum {0, 0, 1, 1+delta} for every lambda_dir > 0.
Eigen::Matrix4d bond_matrix(int dir, const ModelParams& params);

// Hamiltonian on the full 2^|Lambda| space.  Disconnected regions are
// allowed (assembly is still defined); callers that need the two-dimensional
// kernel must check connectivity themselves.
SparseOperator assemble_full(const LatticeRegion& region,
                             const ModelParams& params,
                             int max_sites = kFullSpaceMaxSites);

// Hamiltonian block on a fixed particle-number sector.
SparseOperator assemble_sector(const LatticeRegion& region,
                               const ModelParams& params, int n_particles);

// One-particle block assembled directly from the edge list in O(|edges|):
//   diag(x)  = sum_{k: x+e_k in Lambda} lambda_k^2/(1+lambda_k^2)
//            + sum_{k: x-e_k in Lambda} 1/(1+lambda_k^2)
//   offdiag(x, x+e_k) = -lambda_k/(1+lambda_k^2)
SparseOperator one_particle_matrix(const LatticeRegion& region,
                                   const ModelParams& params);

// Multi-species Hamiltonian on the (n+1)^|Lambda| product space; the
// configuration index is a base-(n+1) integer, digit i = species occupying
// site ordinal i (0 = empty).
SparseOperator assemble_multispecies(const LatticeRegion& region,
                                     const ModelParams& params,
                                     long max_dim = kMultispeciesMaxDim);

double operator_norm1(const SparseOperator& op);

// (row, col, value) triplets, one per line, 17 significant digits.
void write_triplets(std::ostream& out, const SparseOperator& op);
SparseOperator read_triplets(std::istream& in, long dim);

// (configuration bit pattern, amplitude) text pairs.
void write_state(std::ostream& out, const SectorBasis& basis,
                 const Eigen::VectorXd& v);

}  // namespace pvbs
