#include "pvbs/bounds.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "pvbs/errors.hpp"
#include "pvbs/groundstate.hpp"

namespace pvbs {

double epsilon_factor(double lam) {
  if (!(lam > 0.0)) throw ValidationError("epsilon_factor needs lambda > 0");
  if (lam == 1.0) return 1.0 / std::sqrt(2.0);
  if (lam < 1.0) return lam / std::sqrt(1.0 + lam * lam);
  return 1.0 / std::sqrt(1.0 + lam * lam);
}

double gamma_unit_hypercube(const ModelParams& params, double tol,
                            std::uint64_t seed) {
  params.validate();
  int d = params.dim();
  if (d > 4) throw ValidationError("gamma_unit_hypercube supports d <= 4");
  LatticeRegion box = make_box(std::vector<int>(d, 1));
  SectorBasis basis = SectorBasis::full(box);
  SparseOperator op = assemble_full(box, params);
  auto [psi0, psi1] = kernel_pair(box, params, basis);
  return lowest_eigenpairs(op, 1, tol, seed, {psi0, psi1}).eigenvalues[0];
}

double martingale_lower_bound(const ModelParams& params, double tol,
                              std::uint64_t seed) {
  double g = gamma_unit_hypercube(params, tol, seed);
  double out = g / std::pow(2.0, params.dim());
  for (int k = 0; k < params.dim(); ++k) {
    double f = 1.0 - std::sqrt(2.0) * epsilon_factor(params.lambda[k]);
    out *= f * f;
  }
  return out;
}

double bulk_upper_bound(const ModelParams& params) {
  params.validate();
  double s = 0.0;
  for (int k = 0; k < params.dim(); ++k) {
    double lam = params.lambda[k];
    if (lam == 1.0) continue;
    s += (1.0 - lam) * (1.0 - lam) / (1.0 + lam * lam);
  }
  return s;
}

namespace {

double ipow(double z, int e) { return std::pow(z, static_cast<double>(e)); }

}  // namespace

RectangleProbe rectangle_probe_energy(const std::vector<int>& N,
                                      const ModelParams& params,
                                      const std::vector<double>& z) {
  params.validate();
  int d = params.dim();
  if (static_cast<int>(N.size()) != d || static_cast<int>(z.size()) != d)
    throw ValidationError("probe N and z must match the model dimension");
  for (int n : N)
    if (n < 1) throw ValidationError("probe needs N_k >= 1");
  for (double zk : z)
    if (zk == 0.0 || !std::isfinite(zk))
      throw ValidationError("probe needs nonzero finite z_k");

  // Quadratic-form route on the one-site enlargement of the centered box.
  std::vector<int> N1(N.begin(), N.end());
  for (int& v : N1) ++v;
  LatticeRegion bbox = make_centered_box(N1);
  std::vector<Site> shell;
  for (const Site& s : bbox.sites()) {
    int dist = 0;
    for (int k = 0; k < d; ++k) dist += std::max(0, std::abs(s[k]) - N[k]);
    if (dist <= 1) shell.push_back(s);
  }
  LatticeRegion enlarged(d, std::move(shell));
  Eigen::VectorXd a = Eigen::VectorXd::Zero(enlarged.size());
  for (int i = 0; i < enlarged.size(); ++i) {
    const Site& s = enlarged.site(i);
    bool inside = true;
    for (int k = 0; k < d && inside; ++k) inside = std::abs(s[k]) <= N[k];
    if (!inside) continue;
    double amp = 1.0;
    for (int k = 0; k < d; ++k) amp *= ipow(z[k], s[k]);
    a[i] = amp;
  }
  SparseOperator M = one_particle_matrix(enlarged, params);
  double norm2_a = a.squaredNorm();
  double quotient = a.dot(M * a) / norm2_a;

  // Closed-form route: per-direction geometric sums.
  Eigen::VectorXd S(d), Spart(d);
  for (int k = 0; k < d; ++k) {
    double s = 0.0, sp = 0.0;
    for (int alpha = -N[k]; alpha <= N[k]; ++alpha) {
      double w = ipow(z[k] * z[k], alpha);
      s += w;
      if (alpha < N[k]) sp += w;
    }
    S[k] = s;
    Spart[k] = sp;
  }
  double norm2 = S.prod();
  double bulk = 0.0, boundary = 0.0;
  for (int k = 0; k < d; ++k) {
    double lam = params.lambda[k];
    double w = 1.0 + lam * lam;
    double rest = 1.0;
    for (int i = 0; i < d; ++i)
      if (i != k) rest *= S[i];
    bulk += (z[k] - lam) * (z[k] - lam) / w * Spart[k] * rest;
    boundary +=
        (lam * lam * ipow(z[k] * z[k], N[k]) + ipow(z[k] * z[k], -N[k])) / w * rest;
  }
  double quotient_closed = (bulk + boundary) / norm2;

  double scale = std::max({std::abs(quotient), std::abs(quotient_closed), 1e-300});
  if (std::abs(quotient - quotient_closed) > 1e-10 * scale)
    throw ConsistencyError("rectangle probe: quadratic form and closed form disagree");
  return {quotient, quotient_closed, bulk, boundary, norm2};
}

Condition3Result slab_condition3_bound(const ModelParams& params,
                                       const std::vector<int>& cross_N, int n) {
  params.validate();
  int d = params.dim();
  if (static_cast<int>(cross_N.size()) != d - 1)
    throw ValidationError("cross section must have d-1 extents");
  if (n < 1) throw ValidationError("condition-3 slab needs n >= 1");
  double lam_d = params.lambda[d - 1];

  std::vector<int> ext(cross_N.begin(), cross_N.end());
  ext.push_back(n + 1);
  LatticeRegion column = make_box(ext);  // T_N x [0, n+1]
  int s = column.size();

  // cross-section sites as full coordinates at a given height
  std::vector<Site> T;
  if (d == 1) {
    T.push_back({});
  } else {
    LatticeRegion cross_box = make_box(cross_N);
    T = cross_box.sites();
  }
  int m = static_cast<int>(T.size());
  auto at_height = [&](const Site& x, int h) {
    Site p(x.begin(), x.end());
    p.push_back(h);
    return p;
  };

  auto site_weight = [&](const Site& p) {
    double w = 1.0;
    for (int k = 0; k < d; ++k) w *= std::pow(params.lambda[k], p[k]);
    return w;
  };

  double cT = 1.0;
  if (d > 1) {
    ModelParams cross_params;
    cross_params.lambda = params.lambda.head(d - 1);
    cT = normalization_C(make_box(cross_N), cross_params);
  }
  double c_n = geometric_sum(lam_d, n);
  double C_lower = cT * c_n;  // C(T_N x [0,n])

  // layered site sets
  std::vector<int> lower_sites;  // ordinals of T x [0,n]
  std::vector<int> slab_sites;   // ordinals of T x {n, n+1}
  std::vector<int> rest_sites;   // ordinals of T x [0,n-1]
  for (int i = 0; i < s; ++i) {
    int h = column.site(i)[d - 1];
    if (h <= n) lower_sites.push_back(i);
    if (h >= n) slab_sites.push_back(i);
    if (h <= n - 1) rest_sites.push_back(i);
  }

  SectorBasis b2 = SectorBasis::sector(column, 2);
  long dim2 = b2.size();

  // psi_p as explicit vectors in the 1- and 2-particle sectors
  int P = 2 * m;
  Eigen::MatrixXd V1 = Eigen::MatrixXd::Zero(s, P);
  Eigen::MatrixXd V2 = Eigen::MatrixXd::Zero(dim2, P);
  for (int p = 0; p < m; ++p) {
    Site top = at_height(T[p], n + 1);
    int top_ord = column.index_of(top);
    double b0 = -site_weight(top) / std::sqrt(C_lower);
    V1(top_ord, p) = 1.0;
    for (int i : lower_sites)
      V1(i, p) += b0 * site_weight(column.site(i)) / std::sqrt(C_lower);
    for (int i : lower_sites) {
      std::uint64_t c = (std::uint64_t(1) << i) | (std::uint64_t(1) << top_ord);
      V2(b2.rank_of(c), m + p) = site_weight(column.site(i)) / std::sqrt(C_lower);
    }
  }

  // slab kernel vector psi_1^slab
  double c_slab = 0.0;
  for (int i : slab_sites) {
    double w = site_weight(column.site(i));
    c_slab += w * w;
  }
  Eigen::VectorXd psi1s = Eigen::VectorXd::Zero(s);
  for (int i : slab_sites) psi1s[i] = site_weight(column.site(i)) / std::sqrt(c_slab);

  // G_slab psi components: project the slab factor on (psi_0^slab, psi_1^slab)
  std::vector<char> in_slab(s, 0), in_rest(s, 0);
  for (int i : slab_sites) in_slab[i] = 1;
  for (int i : rest_sites) in_rest[i] = 1;

  // v0: slab vacuum component, lives on configs supported in rest
  Eigen::MatrixXd v0_1 = Eigen::MatrixXd::Zero(s, P);
  Eigen::MatrixXd v0_2 = Eigen::MatrixXd::Zero(dim2, P);
  // v1: psi_1^slab component, lives on rest configs with one particle less
  Eigen::RowVectorXd v1_0 = Eigen::RowVectorXd::Zero(P);
  Eigen::MatrixXd v1_1 = Eigen::MatrixXd::Zero(s, P);
  for (int p = 0; p < P; ++p) {
    for (int i = 0; i < s; ++i) {
      if (V1(i, p) == 0.0) continue;
      if (in_rest[i])
        v0_1(i, p) += V1(i, p);
      else if (in_slab[i])
        v1_0(p) += psi1s[i] * V1(i, p);
    }
    for (long r = 0; r < dim2; ++r) {
      if (V2(r, p) == 0.0) continue;
      std::uint64_t c = b2.config(r);
      int i = std::countr_zero(c);
      int j = 63 - std::countl_zero(c);
      if (in_rest[i] && in_rest[j]) {
        v0_2(r, p) += V2(r, p);
      } else if (in_rest[i] && in_slab[j]) {
        v1_1(i, p) += psi1s[j] * V2(r, p);
      } else if (in_slab[i] && in_rest[j]) {
        v1_1(j, p) += psi1s[i] * V2(r, p);
      }
      // both in slab: psi_i^slab has no two-particle component
    }
  }

  Eigen::MatrixXd Num = v0_1.transpose() * v0_1 + v0_2.transpose() * v0_2 +
                        v1_0.transpose() * v1_0 + v1_1.transpose() * v1_1;
  Eigen::MatrixXd Den = V1.transpose() * V1 + V2.transpose() * V2;

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Num, Den);
  double sup = ges.eigenvalues().maxCoeff();

  double analytic = lam_d * lam_d * geometric_sum(lam_d, n - 1) /
                    ((1.0 + lam_d * lam_d) * c_n);
  double eps = epsilon_factor(lam_d);
  return {sup, analytic, eps * eps, n, m};
}

DiamondProbe diamond_probe_energy(int L, double lam) {
  if (!(lam > 0.0)) throw ValidationError("diamond probe needs lambda > 0");
  DiamondRegion D = make_diamond(L, /*require_odd_half=*/true);
  int h = L / 2;

  // padded region {0 <= x+y <= L+1, |x-y| <= L/2 + 1}
  std::vector<Site> padded;
  for (int x = -h - 1; x <= L + h + 1; ++x)
    for (int y = -h - 1; y <= L + h + 1; ++y) {
      int ssum = x + y, t = x - y;
      if (ssum >= 0 && ssum <= L + 1 && std::abs(t) <= h + 1)
        padded.push_back({x, y});
    }
  LatticeRegion pad(2, std::move(padded));

  double k = 2.0 * std::numbers::pi / L;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(pad.size());
  for (int i = 0; i < D.region.size(); ++i) {
    const Site& p = D.region.site(i);
    a[pad.index_of(p)] = std::pow(lam, p[0] + p[1]) * std::sin(k * (p[0] - p[1]));
  }

  ModelParams params;
  params.lambda = Eigen::Vector2d(lam, lam);
  SparseOperator M = one_particle_matrix(pad, params);
  double norm2 = a.squaredNorm();
  double quotient = a.dot(M * a) / norm2;

  double sin2_edge = 0.0, sin2_opp = 0.0;
  for (int i = 0; i < D.region.size(); ++i) {
    const Site& p = D.region.site(i);
    double s2 = std::sin(k * (p[0] - p[1]));
    s2 *= s2;
    if (D.classes[i] == DiamondClass::edge) sin2_edge += s2;
    if (D.classes[i] == DiamondClass::opp) sin2_opp += s2;
  }

  double closed = 2.0 * (1.0 - std::cos(k)) +
                  2.0 * std::pow(lam, 2 * L + 2) / (1.0 + lam * lam);
  return {quotient, closed, sin2_edge, sin2_opp, norm2};
}

}  // namespace pvbs
