#include "pvbs/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pvbs/errors.hpp"

namespace pvbs {

double geometric_sum(double lam, int m) {
  if (m < 0) throw ValidationError("geometric_sum needs m >= 0");
  double r = lam * lam;
  if (r == 1.0) return m + 1.0;
  return (1.0 - std::pow(r, m + 1)) / (1.0 - r);
}

namespace {

double site_log_weight(const Site& x, const ModelParams& params) {
  double t = 0.0;
  for (int k = 0; k < params.dim(); ++k)
    t += 2.0 * x[k] * std::log(params.lambda[k]);
  return t;
}

double log_sum_exp(const std::vector<double>& t) {
  double m = *std::max_element(t.begin(), t.end());
  double s = 0.0;
  for (double v : t) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace

double log_weight_sum(const std::vector<Site>& X, const ModelParams& params) {
  params.validate();
  if (X.empty()) throw ValidationError("log_weight_sum needs a nonempty set");
  std::vector<double> t;
  t.reserve(X.size());
  for (const Site& x : X) {
    if (static_cast<int>(x.size()) != params.dim())
      throw ValidationError("site dimension does not match params");
    t.push_back(site_log_weight(x, params));
  }
  return log_sum_exp(t);
}

double log_normalization(const LatticeRegion& region, const ModelParams& params) {
  return log_weight_sum(region.sites(), params);
}

double normalization_C(const LatticeRegion& region, const ModelParams& params) {
  double lc = log_normalization(region, params);
  double c = std::exp(lc);
  if (!std::isfinite(c) || c == 0.0)
    throw ValidationError("normalization constant not representable; use log_normalization");
  return c;
}

Eigen::VectorXd one_particle_amplitudes(const LatticeRegion& region,
                                        const ModelParams& params) {
  params.validate();
  if (params.dim() != region.dim())
    throw ValidationError("params dimension does not match region");
  if (!region.connected())
    throw ValidationError("one-particle ground state needs a connected region");
  int n = region.size();
  Eigen::VectorXd t(n);
  for (int i = 0; i < n; ++i) t[i] = 0.5 * site_log_weight(region.site(i), params);
  double m = t.maxCoeff();
  Eigen::VectorXd a = (t.array() - m).exp();
  a /= a.norm();
  return a;
}

Eigen::VectorXd vacuum_vector(const SectorBasis& basis) {
  long r = basis.rank_of(0);
  if (r < 0) throw ValidationError("basis does not contain the empty configuration");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(basis.size());
  v[r] = 1.0;
  return v;
}

Eigen::VectorXd one_particle_ground_state(const LatticeRegion& region,
                                          const ModelParams& params,
                                          const SectorBasis& basis) {
  if (basis.sites() != region.size())
    throw ValidationError("basis does not match region");
  if (basis.particles() != -1 && basis.particles() != 1)
    throw ValidationError("basis must be FULL or the one-particle sector");
  Eigen::VectorXd a = one_particle_amplitudes(region, params);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(basis.size());
  for (int i = 0; i < region.size(); ++i) {
    long r = basis.rank_of(std::uint64_t(1) << i);
    v[r] = a[i];
  }
  return v;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> kernel_pair(
    const LatticeRegion& region, const ModelParams& params,
    const SectorBasis& full_basis) {
  if (!(params.delta > -1.0))
    throw ValidationError("kernel claims need delta > -1");
  return {vacuum_vector(full_basis),
          one_particle_ground_state(region, params, full_basis)};
}

double max_bond_residual_one_particle(const LatticeRegion& region,
                                      const ModelParams& params,
                                      const Eigen::VectorXd& amplitudes) {
  params.validate();
  if (amplitudes.size() != region.size())
    throw ValidationError("amplitude vector does not match region");
  // On a one-particle vector the bond term leaves only the phi-hat
  // component: ||h psi|| = |a_{x+e_k} - lambda_k a_x| / sqrt(1+lambda_k^2).
  double worst = 0.0;
  for (const Edge& e : region.edges()) {
    double lam = params.lambda[e.dir];
    double r = std::abs(amplitudes[e.to] - lam * amplitudes[e.from]) /
               std::sqrt(1.0 + lam * lam);
    worst = std::max(worst, r);
  }
  return worst;
}

Eigen::VectorXd multispecies_ground_state(const LatticeRegion& region,
                                          const ModelParams& params,
                                          const std::vector<int>& species_subset) {
  params.validate();
  if (!region.connected())
    throw ValidationError("ground state needs a connected region");
  int n = params.species();
  int q = n + 1;
  for (int i : species_subset)
    if (i < 1 || i > n) throw ValidationError("species label out of range");
  for (std::size_t a = 0; a < species_subset.size(); ++a)
    for (std::size_t b = a + 1; b < species_subset.size(); ++b)
      if (species_subset[a] == species_subset[b])
        throw ValidationError("species subset must be distinct");
  int ns = region.size();
  if (static_cast<int>(species_subset.size()) > ns)
    throw ValidationError("more species than sites");

  auto lam = [&](int i, int k) {
    return n == 1 && params.multi_lambda.rows() == 0 ? params.lambda[k]
                                                     : params.multi_lambda(i - 1, k);
  };

  std::vector<long> stride(ns);
  long dim = 1;
  for (int i = 0; i < ns; ++i) stride[i] = dim, dim *= q;

  // log weight of species i sitting at site y
  auto logw = [&](int i, int y) {
    double t = 0.0;
    const Site& s = region.site(y);
    for (int k = 0; k < region.dim(); ++k) t += s[k] * std::log(lam(i, k));
    return t;
  };

  int m = static_cast<int>(species_subset.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  std::vector<int> pos(m, -1);
  std::vector<char> used(ns, 0);
  // enumerate injective assignments; amplitudes in log space against the max
  std::vector<std::pair<long, double>> terms;
  double tmax = -std::numeric_limits<double>::infinity();
  auto rec = [&](auto&& self, int j, long conf, double lw) -> void {
    if (j == m) {
      terms.emplace_back(conf, lw);
      tmax = std::max(tmax, lw);
      return;
    }
    for (int y = 0; y < ns; ++y) {
      if (used[y]) continue;
      used[y] = 1;
      self(self, j + 1, conf + species_subset[j] * stride[y],
           lw + logw(species_subset[j], y));
      used[y] = 0;
    }
  };
  rec(rec, 0, 0, 0.0);
  if (m == 0) tmax = 0.0;
  for (const auto& [conf, lw] : terms) v[conf] += std::exp(lw - tmax);
  v /= v.norm();
  return v;
}

}  // namespace pvbs
