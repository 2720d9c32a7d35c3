#include "pvbs/thermo.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pvbs/bounds.hpp"
#include "pvbs/errors.hpp"
#include "pvbs/groundstate.hpp"

namespace pvbs {

RegionFamily RegionFamily::quadrant(int dim) {
  if (dim < 1) throw ValidationError("family dimension must be >= 1");
  RegionFamily f;
  f.kind = FamilyKind::quadrant_boxes;
  f.dim = dim;
  return f;
}

RegionFamily RegionFamily::centered(int dim) {
  if (dim < 1) throw ValidationError("family dimension must be >= 1");
  RegionFamily f;
  f.kind = FamilyKind::centered_boxes;
  f.dim = dim;
  return f;
}

RegionFamily RegionFamily::diamond_family() {
  RegionFamily f;
  f.kind = FamilyKind::diamonds;
  f.dim = 2;
  return f;
}

RegionFamily RegionFamily::custom_family(std::vector<LatticeRegion> regions) {
  if (regions.empty()) throw ValidationError("custom family needs at least one region");
  RegionFamily f;
  f.kind = FamilyKind::custom;
  f.dim = regions.front().dim();
  for (const auto& r : regions)
    if (r.dim() != f.dim) throw ValidationError("custom family mixes dimensions");
  f.members = std::move(regions);
  return f;
}

LatticeRegion RegionFamily::at(int n) const {
  if (n < 1) throw ValidationError("family index must be >= 1");
  switch (kind) {
    case FamilyKind::quadrant_boxes:
      return make_box(std::vector<int>(dim, n));
    case FamilyKind::centered_boxes:
      return make_centered_box(std::vector<int>(dim, n));
    case FamilyKind::diamonds:
      // L = 2, 6, 10, ...: every member has L/2 odd
      return make_diamond(2 * (2 * n - 1), true).region;
    case FamilyKind::custom:
      if (n > static_cast<int>(members.size()))
        throw ValidationError("custom family has no member " + std::to_string(n));
      return members[n - 1];
  }
  throw ValidationError("unknown family kind");
}

int RegionFamily::max_index() const {
  return kind == FamilyKind::custom ? static_cast<int>(members.size()) : -1;
}

std::string family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::quadrant_boxes: return "quadrant_boxes";
    case FamilyKind::centered_boxes: return "centered_boxes";
    case FamilyKind::diamonds: return "diamonds";
    case FamilyKind::custom: return "custom";
  }
  return "?";
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::I: return "I";
    case Scenario::II: return "II";
    case Scenario::undecided: return "undecided";
  }
  return "?";
}

namespace {

// Closed-form answer for the built-in families, used as a backstop against
// the numeric signature.
Scenario analytic_scenario(const RegionFamily& family, const ModelParams& params) {
  switch (family.kind) {
    case FamilyKind::quadrant_boxes: {
      // C([0,n]^d) = prod_k c(lambda_k, n) converges iff every lambda_k < 1
      for (int k = 0; k < params.dim(); ++k)
        if (params.lambda[k] >= 1.0) return Scenario::I;
      return Scenario::II;
    }
    case FamilyKind::centered_boxes:
      // both lambda^{2n} and lambda^{-2n} appear, one of them never decays
      return Scenario::I;
    case FamilyKind::diamonds:
      // the four corner rays carry weights (l1 l2)^{+-2t}, (l1/l2)^{+-2t};
      // at least one of those ratios is >= 1
      return Scenario::I;
    case FamilyKind::custom:
      return Scenario::undecided;
  }
  return Scenario::undecided;
}

}  // namespace

ScenarioVerdict classify_scenario(const RegionFamily& family, const ModelParams& params,
                                  int n_max, double tol) {
  params.validate();
  if (params.dim() != family.dim)
    throw ValidationError("parameter dimension does not match the family");
  if (n_max < 1) throw ValidationError("n_max must be >= 1");
  if (family.max_index() >= 0) n_max = std::min(n_max, family.max_index());

  ScenarioVerdict v;
  v.log_C.reserve(n_max);
  for (int n = 1; n <= n_max; ++n)
    v.log_C.push_back(log_normalization(family.at(n), params));

  // increments in log space: log(C_n - C_{n-1})
  std::vector<double> log_inc;
  for (std::size_t i = 1; i < v.log_C.size(); ++i) {
    double a = v.log_C[i - 1], b = v.log_C[i];
    if (b <= a) {
      log_inc.push_back(-std::numeric_limits<double>::infinity());
      continue;
    }
    log_inc.push_back(b + std::log1p(-std::exp(a - b)));
  }
  for (std::size_t i = 1; i < log_inc.size(); ++i) {
    // a -inf increment means C stopped growing at double precision
    double r = std::isinf(log_inc[i]) ? 0.0 : std::exp(log_inc[i] - log_inc[i - 1]);
    v.increment_ratio.push_back(r);
  }
  if (!log_inc.empty())
    v.tail_fraction = std::exp(log_inc.back() - v.log_C.back());

  if (v.increment_ratio.size() >= 2) {
    std::size_t m = std::min<std::size_t>(3, v.increment_ratio.size());
    std::vector<double> last(v.increment_ratio.end() - m, v.increment_ratio.end());
    std::sort(last.begin(), last.end());
    double r_med = last[last.size() / 2];
    double growth = v.log_C.back() - v.log_C.front();
    bool overflow = v.log_C.back() > std::log(std::numeric_limits<double>::max());
    if (r_med < 1.0 - tol && v.tail_fraction < tol)
      v.numeric_scenario = Scenario::II;
    else if (r_med >= 1.0 - tol && (growth > std::log(10.0) || overflow))
      v.numeric_scenario = Scenario::I;
  }

  Scenario analytic = analytic_scenario(family, params);
  if (analytic != Scenario::undecided) {
    if (v.numeric_scenario != Scenario::undecided && v.numeric_scenario != analytic)
      throw ConsistencyError("numeric C(Lambda_n) signature contradicts the closed form for " +
                             family_name(family.kind));
    v.scenario = analytic;
    v.analytic_backstop = true;
  } else {
    v.scenario = v.numeric_scenario;
  }

  v.diverges = (v.scenario == Scenario::I);
  if (v.scenario == Scenario::II) v.limit_estimate = std::exp(v.log_C.back());
  return v;
}

double one_particle_weight_in_window(const LatticeRegion& region, const ModelParams& params,
                                     const std::vector<Site>& window) {
  params.validate();
  if (window.empty()) throw ValidationError("empty window");
  for (const Site& s : window)
    if (!region.contains(s)) throw ValidationError("window site outside the region");
  return std::exp(log_weight_sum(window, params) - log_normalization(region, params));
}

double ltqo_f(const std::vector<Site>& X, int l, const LatticeRegion& ambient,
              const ModelParams& params) {
  params.validate();
  double log_cx = log_weight_sum(X, params);
  double log_cxl = log_weight_sum(enlarge(X, l, ambient), params);
  return 2.0 * std::exp(0.5 * (log_cx - log_cxl));
}

LtqoCheck ltqo_verify(const LatticeRegion& ambient, const std::vector<Site>& X, int l,
                      const ModelParams& params, const Eigen::MatrixXd& A) {
  params.validate();
  if (l < 0) throw ValidationError("fattening radius must be >= 0");
  if (X.empty()) throw ValidationError("empty observable support");
  int d = ambient.dim();

  // the l-ball around X in Z^d must already lie inside the ambient region,
  // otherwise the fattening is clipped and f(l) loses its meaning
  {
    std::vector<int> radius(d, l);
    LatticeRegion ball_offsets = make_centered_box(radius);
    for (const Site& x : X) {
      for (const Site& o : ball_offsets.sites()) {
        int l1 = 0;
        for (int k = 0; k < d; ++k) l1 += std::abs(o[k]);
        if (l1 > l) continue;
        Site y(d);
        for (int k = 0; k < d; ++k) y[k] = x[k] + o[k];
        if (!ambient.contains(y))
          throw ValidationError("the l-ball around the observable support leaves the region");
      }
    }
  }

  std::vector<Site> Xs = X;
  std::sort(Xs.begin(), Xs.end());
  int nx = static_cast<int>(Xs.size());
  long dim_A = 1L << nx;
  if (A.rows() != dim_A || A.cols() != dim_A)
    throw ValidationError("observable dimension does not match the support");
  if (!A.isApprox(A.transpose()))
    throw ValidationError("observable must be symmetric");

  LatticeRegion Xl(d, enlarge(Xs, l, ambient));
  Eigen::VectorXd amp = one_particle_amplitudes(Xl, params);

  // amplitudes of the X sites inside X^(l), in the bit order of A
  Eigen::VectorXd a(nx);
  for (int j = 0; j < nx; ++j) a[j] = amp[Xl.index_of(Xs[j])];

  // <psi_i, (A ox 1) psi_j> on span(psi_0, psi_1); only configurations whose
  // particles all sit in X couple through A, the rest contribute A(0,0)
  double m00 = A(0, 0);
  double m01 = 0.0;
  for (int j = 0; j < nx; ++j) m01 += A(0, 1L << j) * a[j];
  double m11 = (1.0 - a.squaredNorm()) * A(0, 0);
  for (int j = 0; j < nx; ++j)
    for (int j2 = 0; j2 < nx; ++j2) m11 += a[j] * a[j2] * A(1L << j, 1L << j2);

  double c = 0.5 * (m00 + m11);
  Eigen::Matrix2d M;
  M << m00 - c, m01, m01, m11 - c;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(M);

  LtqoCheck out;
  out.lhs = es.eigenvalues().cwiseAbs().maxCoeff();
  out.f = 2.0 * std::exp(0.5 * (log_weight_sum(Xs, params) - log_normalization(Xl, params)));
  out.norm_A = A.operatorNorm();
  out.rhs = out.norm_A * out.f;
  if (out.lhs > out.rhs + 1e-10 * std::max(1.0, out.norm_A))
    throw ConsistencyError("indistinguishability bound violated");
  return out;
}

Eigen::MatrixXd random_hermitian_on(int n_sites, std::uint64_t seed) {
  if (n_sites < 1 || n_sites > 20)
    throw ValidationError("observable support must have 1..20 sites");
  long dim = 1L << n_sites;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd B(dim, dim);
  for (long i = 0; i < dim; ++i)
    for (long j = 0; j < dim; ++j) B(i, j) = u(rng);
  return 0.5 * (B + B.transpose());
}

BulkGapProbe bulk_projected_gap(int L, double lambda, int margin, double tol,
                                std::uint64_t seed) {
  if (margin < 0) throw ValidationError("margin must be >= 0");
  ModelParams params;
  params.lambda = Eigen::Vector2d(lambda, lambda);
  params.validate();

  DiamondRegion D = make_diamond(L, true);
  SparseOperator M = one_particle_matrix(D.region, params);

  std::vector<int> keep;
  for (int i = 0; i < D.region.size(); ++i) {
    const Site& s = D.region.site(i);
    if (s[0] + s[1] >= margin) keep.push_back(i);
  }
  if (keep.empty()) throw ValidationError("margin removes every site of the diamond");

  std::vector<int> ordinal(D.region.size(), -1);
  for (int j = 0; j < static_cast<int>(keep.size()); ++j) ordinal[keep[j]] = j;

  std::vector<Eigen::Triplet<double>> trips;
  for (int col = 0; col < M.outerSize(); ++col)
    for (SparseOperator::InnerIterator it(M, col); it; ++it)
      if (ordinal[it.row()] >= 0 && ordinal[it.col()] >= 0)
        trips.emplace_back(ordinal[it.row()], ordinal[it.col()], it.value());
  SparseOperator R(static_cast<long>(keep.size()), static_cast<long>(keep.size()));
  R.setFromTriplets(trips.begin(), trips.end());

  BulkGapProbe out;
  int count = std::min<int>(2, static_cast<int>(keep.size()));
  out.report = lowest_eigenpairs(R, count, tol, seed);
  out.martingale_reference = martingale_lower_bound(params, tol, seed);
  out.margin = margin;
  out.kept_sites = static_cast<int>(keep.size());
  return out;
}

}  // namespace pvbs
