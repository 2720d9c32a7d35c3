#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pvbs/lattice.hpp"
#include "pvbs/model.hpp"

namespace pvbs {

// Everything below 1e-10 * (1 + ||op||_1) counts as a kernel eigenvalue.
double zero_threshold(const SparseOperator& op);

struct LanczosOptions {
  int max_basis = 350;   // Krylov basis size per cycle
  int max_cycles = 40;   // restart/locking cycles before giving up
};

struct SpectralReport {
  Eigen::VectorXd eigenvalues;    // ascending
  Eigen::VectorXd residual_norms; // ||A v - theta v|| per pair
  Eigen::MatrixXd vectors;        // columns match eigenvalues
  int kernel_dim = 0;             // eigenvalues below zero_threshold
  double gap = 0.0;               // smallest eigenvalue above the threshold
  double zero_thresh = 0.0;
  double tol = 0.0;
  std::uint64_t seed = 0;
  int iterations = 0;             // matrix-vector products
  bool converged = false;
  std::string method = "lanczos-full-reortho";
};

// Lowest `count` eigenpairs of a symmetric sparse operator, orthogonal to
// the span of `deflate`.  Full reorthogonalization; restarted cycles lock
// converged Ritz vectors, so degenerate eigenvalues are resolved; an extra
// confirmation cycle certifies that no smaller eigenvalue was missed.
// Deterministic for a fixed (op, count, tol, seed).  Throws ConvergenceError
// with a diagnostic when the iteration budget is exhausted.
SpectralReport lowest_eigenpairs(const SparseOperator& op, int count,
                                 double tol, std::uint64_t seed,
                                 const std::vector<Eigen::VectorXd>& deflate = {},
                                 const LanczosOptions& opts = {});

enum class GapMode { full, sectors };

struct GapResult {
  double gap = 0.0;
  GapMode mode = GapMode::full;
  int max_sector = -1;      // sectors mode: largest N examined
  bool sectors_only = false;  // true when not every sector was covered
  int gap_sector = -1;      // sectors mode: N attaining the minimum
  SpectralReport report;    // the run that produced `gap`
};

// Spectral gap above the two-dimensional ground space.  FULL deflates the
// analytic kernel and takes the smallest remaining eigenvalue; SECTORS takes
// the minimum over particle-number sectors N <= max_sector (second-smallest
// in N = 1, smallest otherwise) and flags partial coverage.
GapResult finite_gap(const LatticeRegion& region, const ModelParams& params,
                     GapMode mode, int max_sector = 3, double tol = 1e-12,
                     std::uint64_t seed = 1);

// Lowest `count` eigenvalues of the one-particle block.
SpectralReport one_particle_spectrum(const LatticeRegion& region,
                                     const ModelParams& params, int count,
                                     double tol = 1e-12, std::uint64_t seed = 1);

inline void to_json(nlohmann::json& j, const SpectralReport& r) {
  j = nlohmann::json{{"eigenvalues", std::vector<double>(
                          r.eigenvalues.data(),
                          r.eigenvalues.data() + r.eigenvalues.size())},
                     {"residual_norms", std::vector<double>(
                          r.residual_norms.data(),
                          r.residual_norms.data() + r.residual_norms.size())},
                     {"kernel_dim", r.kernel_dim},
                     {"gap", r.gap},
                     {"zero_threshold", r.zero_thresh},
                     {"tol", r.tol},
                     {"seed", r.seed},
                     {"iterations", r.iterations},
                     {"converged", r.converged},
                     {"method", r.method}};
}

}  // namespace pvbs
