#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "pvbs/lattice.hpp"
#include "pvbs/model.hpp"
#include "pvbs/spectra.hpp"

namespace pvbs {

// Growing region families used for thermodynamic-limit scans.  at(n) is the
// n-th member, n >= 1.
enum class FamilyKind { quadrant_boxes, centered_boxes, diamonds, custom };

struct RegionFamily {
  FamilyKind kind = FamilyKind::quadrant_boxes;
  int dim = 1;
  std::vector<LatticeRegion> members;  // only for custom

  static RegionFamily quadrant(int dim);
  static RegionFamily centered(int dim);
  static RegionFamily diamond_family();
  static RegionFamily custom_family(std::vector<LatticeRegion> regions);

  LatticeRegion at(int n) const;
  int max_index() const;  // -1 when unbounded
};

std::string family_name(FamilyKind kind);

// Behaviour of the normalization sum C(Lambda_n) along a growing family:
//  - scenario_I:  C diverges, the one-particle state escapes to infinity
//  - scenario_II: C converges, the limit is a genuine bound state
enum class Scenario { I, II, undecided };

std::string scenario_name(Scenario s);

struct ScenarioVerdict {
  Scenario scenario = Scenario::undecided;
  Scenario numeric_scenario = Scenario::undecided;
  bool analytic_backstop = false;  // built-in family, closed-form answer used
  bool diverges = false;
  double limit_estimate = 0.0;  // C(Lambda_{n_max}) when scenario II
  std::vector<double> log_C;    // log C(Lambda_n), n = 1..n_max
  std::vector<double> increment_ratio;
  double tail_fraction = 0.0;  // (C_n - C_{n-1}) / C_n at the last step
};

// Classifies the C(Lambda_n) sequence.  For the built-in families the numeric
// signature is cross-checked against the closed-form answer; a hard
// contradiction raises ConsistencyError.
ScenarioVerdict classify_scenario(const RegionFamily& family, const ModelParams& params,
                                  int n_max, double tol = 1e-9);

// Probability weight sum_{x in W} |lambda^x|^2 / C(Lambda) of the one-particle
// ground state inside a window W of the region.
double one_particle_weight_in_window(const LatticeRegion& region, const ModelParams& params,
                                     const std::vector<Site>& window);

// Indistinguishability radius factor f(l) = 2 sqrt(C(X) / C(X^(l))) where
// X^(l) is the l-fattening of X inside the ambient region.
double ltqo_f(const std::vector<Site>& X, int l, const LatticeRegion& ambient,
              const ModelParams& params);

struct LtqoCheck {
  double lhs = 0.0;  // spectral norm of the observable matrix minus its mean
  double rhs = 0.0;  // ||A|| f(l)
  double f = 0.0;
  double norm_A = 0.0;
};

// Verifies ||P A P - c(A) P|| <= ||A|| f(l) for an observable A supported on
// X, with P the kernel projector of the fattened region X^(l).  A is indexed
// by occupation bitmasks over X in lexicographic site order.  Requires the
// full l-ball around X to fit inside the ambient box so that the fattening is
// not clipped.  Raises ConsistencyError if the bound fails.
LtqoCheck ltqo_verify(const LatticeRegion& ambient, const std::vector<Site>& X, int l,
                      const ModelParams& params, const Eigen::MatrixXd& A);

// Random symmetric observable on n_sites spins, entries of the symmetrized
// matrix uniform in [-1, 1].
Eigen::MatrixXd random_hermitian_on(int n_sites, std::uint64_t seed);

struct BulkGapProbe {
  SpectralReport report;
  double martingale_reference = 0.0;
  int margin = 0;
  int kept_sites = 0;
};

// One-particle spectrum of the diamond D_L restricted to sites with
// x + y >= margin, i.e. with a strip along the long boundary removed.  Shows
// how much of the small gap survives away from the boundary.
BulkGapProbe bulk_projected_gap(int L, double lambda, int margin, double tol = 1e-12,
                                std::uint64_t seed = 1);

}  // namespace pvbs
