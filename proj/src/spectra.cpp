#include "pvbs/spectra.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pvbs/errors.hpp"
#include "pvbs/groundstate.hpp"

namespace pvbs {

double zero_threshold(const SparseOperator& op) {
  return 1e-10 * (1.0 + operator_norm1(op));
}

namespace {

// Twice-iterated Gram-Schmidt against a list of orthonormal vectors.
void project_out(Eigen::VectorXd& w, const std::vector<Eigen::VectorXd>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const Eigen::VectorXd& b : basis) w -= b.dot(w) * b;
}

struct Cycle {
  Eigen::VectorXd values;   // Ritz values, ascending
  Eigen::MatrixXd vectors;  // matching Ritz vectors
  bool exhausted = false;   // basis spanned the whole complement of `fixed`
  bool converged = false;   // lowest `need` estimated residuals under tol
  int matvecs = 0;
};

// One restarted Lanczos cycle on the orthogonal complement of `fixed`.
// H is the exact projected matrix V^T A V (no tridiagonal assumption), so
// the cycle stays correct through reorthogonalization and restarts.  The
// residual estimate beta * |last row of the Ritz vector| is the standard
// Krylov remainder bound.
Cycle run_cycle(const SparseOperator& op, const std::vector<Eigen::VectorXd>& fixed,
                int need, double conv_tol, double breakdown_tol,
                const Eigen::VectorXd* warm_start, std::mt19937_64& rng,
                const LanczosOptions& opts) {
  const long n = op.rows();
  const long comp_dim = n - static_cast<long>(fixed.size());
  Cycle out;
  if (comp_dim <= 0) {
    out.exhausted = true;
    return out;
  }

  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::VectorXd v(n);
  double vnorm = 0.0;
  if (warm_start) {
    v = *warm_start;
    project_out(v, fixed);
    vnorm = v.norm();
  }
  for (int attempt = 0; attempt < 64 && vnorm <= 1e-8; ++attempt) {
    for (long i = 0; i < n; ++i) v[i] = uni(rng);
    project_out(v, fixed);
    vnorm = v.norm();
  }
  if (vnorm <= 1e-8) {
    out.exhausted = true;
    return out;
  }
  v /= vnorm;

  const int mmax = static_cast<int>(std::min<long>(opts.max_basis, comp_dim));
  std::vector<Eigen::VectorXd> V;
  V.reserve(mmax);
  V.push_back(v);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(mmax, mmax);

  while (true) {
    const int m = static_cast<int>(V.size());
    Eigen::VectorXd u = op * V[m - 1];
    ++out.matvecs;
    for (int i = 0; i < m; ++i) {
      double c = V[i].dot(u);
      H(i, m - 1) = c;
      H(m - 1, i) = c;
    }
    Eigen::VectorXd w = u;
    for (int i = 0; i < m; ++i) w -= H(i, m - 1) * V[i];
    project_out(w, fixed);
    project_out(w, V);
    const double beta = w.norm();

    const bool breakdown = beta <= breakdown_tol;
    const bool full = m == mmax;
    if (breakdown || full || m <= 60 || m % 5 == 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.topLeftCorner(m, m));
      bool done = true;
      if (!breakdown) {
        for (int j = 0; j < std::min(need, m) && done; ++j)
          if (beta * std::abs(es.eigenvectors()(m - 1, j)) > 0.5 * conv_tol)
            done = false;
      }
      if (done || full) {
        out.values = es.eigenvalues();
        out.vectors.resize(n, m);
        for (int j = 0; j < m; ++j) {
          Eigen::VectorXd rv = Eigen::VectorXd::Zero(n);
          for (int i = 0; i < m; ++i) rv += es.eigenvectors()(i, j) * V[i];
          out.vectors.col(j) = rv;
        }
        out.exhausted = breakdown && m == comp_dim;
        out.converged = done;
        return out;
      }
    }
    V.push_back(w / beta);
  }
}

}  // namespace

SpectralReport lowest_eigenpairs(const SparseOperator& op, int count, double tol,
                                 std::uint64_t seed,
                                 const std::vector<Eigen::VectorXd>& deflate,
                                 const LanczosOptions& opts) {
  const long n = op.rows();
  if (op.cols() != n) throw ValidationError("operator must be square");
  if (count < 1) throw ValidationError("count must be >= 1");
  if (count > n - static_cast<long>(deflate.size()))
    throw ValidationError("count exceeds the deflated dimension");
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");

  const double norm1 = operator_norm1(op);
  const double conv_tol = tol * std::max(norm1, 1e-300);
  const double breakdown_tol = 1e-13 * std::max(1.0, norm1);

  std::mt19937_64 rng(seed);
  std::vector<Eigen::VectorXd> fixed = deflate;  // deflate first, then locked
  std::vector<double> locked_vals;
  std::vector<Eigen::VectorXd> locked_vecs;
  int matvecs = 0;

  // Re-project a Ritz vector, verify its residual, and append it to the
  // locked set.  Returns how many of the `upto` lowest candidates locked.
  auto lock_from_cycle = [&](const Cycle& c, int upto) -> int {
    int locked = 0;
    for (int j = 0; j < c.values.size() && locked < upto; ++j) {
      Eigen::VectorXd v = c.vectors.col(j);
      project_out(v, fixed);
      double nv = v.norm();
      if (nv < 0.5) continue;  // copy of an already locked vector
      v /= nv;
      Eigen::VectorXd av = op * v;
      ++matvecs;
      double theta = v.dot(av);
      double res = (av - theta * v).norm();
      bool ok = res <= conv_tol || (c.exhausted && res <= 64.0 * conv_tol);
      if (!ok) break;  // ascending order: later candidates are no better
      locked_vals.push_back(theta);
      locked_vecs.push_back(v);
      fixed.push_back(v);
      ++locked;
    }
    return locked;
  };

  Eigen::VectorXd warm;
  bool have_warm = false;
  int cycles = 0;
  while (static_cast<int>(locked_vals.size()) < count) {
    if (++cycles > opts.max_cycles)
      throw ConvergenceError(
          "lowest_eigenpairs: " + std::to_string(locked_vals.size()) + "/" +
          std::to_string(count) + " pairs after " + std::to_string(opts.max_cycles) +
          " cycles at tol " + std::to_string(tol) +
          "; raise max_basis/max_cycles or loosen tol");
    int need = count - static_cast<int>(locked_vals.size());
    Cycle c = run_cycle(op, fixed, need, conv_tol, breakdown_tol,
                        have_warm ? &warm : nullptr, rng, opts);
    matvecs += c.matvecs;
    have_warm = false;
    if (c.values.size() == 0) {
      if (c.exhausted) break;
      continue;
    }
    int got = lock_from_cycle(c, need);
    if (got == 0) {
      if (c.exhausted) break;
      // keep the progress: restart from the span of the wanted Ritz vectors
      warm = c.vectors.leftCols(std::min<int>(need, c.vectors.cols()))
                 .rowwise()
                 .sum();
      have_warm = warm.norm() > 1e-12;
    }
  }

  if (static_cast<int>(locked_vals.size()) < count)
    throw ConvergenceError("lowest_eigenpairs: complement exhausted with " +
                           std::to_string(locked_vals.size()) + " of " +
                           std::to_string(count) + " pairs");

  // Confirmation: certify no eigenvalue below the count-th locked value was
  // missed (a single Krylov run sees one vector per degenerate eigenspace).
  const double slack = 8.0 * conv_tol;
  for (int guard = 0; guard <= opts.max_cycles; ++guard) {
    if (guard == opts.max_cycles)
      throw ConvergenceError("lowest_eigenpairs: confirmation cycles exhausted");
    std::vector<double> sorted = locked_vals;
    std::nth_element(sorted.begin(), sorted.begin() + (count - 1), sorted.end());
    double kth = sorted[count - 1];
    if (static_cast<long>(fixed.size()) >= n) break;
    Cycle c = run_cycle(op, fixed, 1, conv_tol, breakdown_tol, nullptr, rng, opts);
    matvecs += c.matvecs;
    if (c.values.size() == 0) break;
    if (c.values[0] >= kth - slack) break;
    if (lock_from_cycle(c, 1) == 0)
      throw ConvergenceError(
          "lowest_eigenpairs: confirmation found a lower Ritz value that did "
          "not converge; raise max_basis");
  }

  std::vector<int> order(locked_vals.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return locked_vals[a] < locked_vals[b]; });

  SpectralReport rep;
  rep.eigenvalues.resize(count);
  rep.residual_norms.resize(count);
  rep.vectors.resize(n, count);
  for (int j = 0; j < count; ++j) {
    int i = order[j];
    rep.eigenvalues[j] = locked_vals[i];
    rep.vectors.col(j) = locked_vecs[i];
    rep.residual_norms[j] =
        (op * locked_vecs[i] - locked_vals[i] * locked_vecs[i]).norm();
  }
  rep.zero_thresh = zero_threshold(op);
  rep.kernel_dim = 0;
  rep.gap = std::numeric_limits<double>::quiet_NaN();
  for (int j = 0; j < count; ++j) {
    if (rep.eigenvalues[j] < rep.zero_thresh)
      ++rep.kernel_dim;
    else if (std::isnan(rep.gap))
      rep.gap = rep.eigenvalues[j];
  }
  rep.tol = tol;
  rep.seed = seed;
  rep.iterations = matvecs;
  rep.converged = true;
  return rep;
}

GapResult finite_gap(const LatticeRegion& region, const ModelParams& params,
                     GapMode mode, int max_sector, double tol,
                     std::uint64_t seed) {
  if (!region.connected())
    throw ValidationError("finite_gap needs a connected region");
  GapResult out;
  out.mode = mode;
  if (mode == GapMode::full) {
    SectorBasis basis = SectorBasis::full(region);
    SparseOperator op = assemble_full(region, params);
    auto [psi0, psi1] = kernel_pair(region, params, basis);
    out.report = lowest_eigenpairs(op, 1, tol, seed, {psi0, psi1});
    out.gap = out.report.eigenvalues[0];
    return out;
  }
  int cap = std::min(max_sector, region.size());
  if (cap < 1) throw ValidationError("sectors mode needs max_sector >= 1");
  out.max_sector = cap;
  out.sectors_only = cap < region.size();
  double best = std::numeric_limits<double>::infinity();
  for (int N = 1; N <= cap; ++N) {
    SparseOperator op = assemble_sector(region, params, N);
    std::vector<Eigen::VectorXd> deflate;
    if (N == 1)
      deflate.push_back(one_particle_ground_state(
          region, params, SectorBasis::sector(region, 1)));
    SpectralReport rep = lowest_eigenpairs(op, 1, tol, seed, deflate);
    if (rep.eigenvalues[0] < best) {
      best = rep.eigenvalues[0];
      out.gap_sector = N;
      out.report = rep;
    }
  }
  out.gap = best;
  return out;
}

SpectralReport one_particle_spectrum(const LatticeRegion& region,
                                     const ModelParams& params, int count,
                                     double tol, std::uint64_t seed) {
  SparseOperator op = one_particle_matrix(region, params);
  if (count < 1 || count > op.rows())
    throw ValidationError("one_particle_spectrum count out of range");
  LanczosOptions opts;
  opts.max_cycles = std::max(opts.max_cycles, 2 * count + 8);
  return lowest_eigenpairs(op, count, tol, seed, {}, opts);
}

}  // namespace pvbs
