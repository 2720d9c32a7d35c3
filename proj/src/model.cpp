#include "pvbs/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "pvbs/errors.hpp"

namespace pvbs {

void ModelParams::validate() const {
  if (lambda.size() == 0) throw ValidationError("lambda must be nonempty");
  for (int k = 0; k < lambda.size(); ++k)
    if (!(lambda[k] > 0.0) || !std::isfinite(lambda[k]))
      throw ValidationError("lambda entries must be positive finite");
  if (!std::isfinite(delta)) throw ValidationError("delta must be finite");
  if (multi_lambda.rows() > 0) {
    if (multi_lambda.cols() != lambda.size())
      throw ValidationError("multi_lambda must have one column per direction");
    for (int i = 0; i < multi_lambda.rows(); ++i)
      for (int k = 0; k < multi_lambda.cols(); ++k)
        if (!(multi_lambda(i, k) > 0.0) || !std::isfinite(multi_lambda(i, k)))
          throw ValidationError("multi_lambda entries must be positive finite");
  }
}

SectorBasis SectorBasis::full(const LatticeRegion& region, int max_sites) {
  int n = region.size();
  if (n > max_sites || n > 62)
    throw ValidationError("full-space basis capped at " +
                          std::to_string(std::min(max_sites, 62)) + " sites, got " +
                          std::to_string(n));
  std::vector<std::uint64_t> configs(std::uint64_t(1) << n);
  for (std::uint64_t c = 0; c < configs.size(); ++c) configs[c] = c;
  return SectorBasis(n, -1, std::move(configs));
}

SectorBasis SectorBasis::sector(const LatticeRegion& region, int n_particles) {
  int n = region.size();
  if (n > 62) throw ValidationError("sector basis needs <= 62 sites");
  if (n_particles < 0 || n_particles > n)
    throw ValidationError("particle number out of range");
  std::vector<std::uint64_t> configs;
  if (n_particles == 0) {
    configs.push_back(0);
  } else {
    // Gosper's hack walks the N-bit patterns in increasing integer order.
    std::uint64_t c = (std::uint64_t(1) << n_particles) - 1;
    std::uint64_t limit = std::uint64_t(1) << n;
    while (c < limit) {
      configs.push_back(c);
      std::uint64_t lo = c & (~c + 1);
      std::uint64_t up = c + lo;
      c = up | (((c ^ up) >> 2) / lo);
    }
  }
  return SectorBasis(n, n_particles, std::move(configs));
}

long SectorBasis::rank_of(std::uint64_t c) const {
  auto it = std::lower_bound(configs_.begin(), configs_.end(), c);
  if (it == configs_.end() || *it != c) return -1;
  return static_cast<long>(it - configs_.begin());
}

Eigen::Matrix4d bond_matrix(int dir, const ModelParams& params) {
  if (dir < 0 || dir >= params.dim())
    throw ValidationError("bond direction out of range");
  double lam = params.lambda[dir];
  double w = 1.0 + lam * lam;
  Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
  h(1, 1) = 1.0 / w;
  h(1, 2) = -lam / w;
  h(2, 1) = -lam / w;
  h(2, 2) = lam * lam / w;
  h(3, 3) = 1.0 + params.delta;
  return h;
}

namespace {

// Shared assembly over an occupation basis: for each configuration and each
// edge, scatter the 4x4 bond block.  Only same-particle-number transitions
// exist (the block is {00}, {01,10}, {11} block-diagonal).
SparseOperator assemble_on_basis(const LatticeRegion& region,
                                 const ModelParams& params,
                                 const SectorBasis& basis) {
  params.validate();
  std::vector<Eigen::Matrix4d> bonds(region.dim());
  for (int k = 0; k < region.dim(); ++k) bonds[k] = bond_matrix(k, params);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(basis.size()) *
               (region.edges().size() + 1));
  for (long r = 0; r < basis.size(); ++r) {
    std::uint64_t c = basis.config(r);
    double diag = 0.0;
    for (const Edge& e : region.edges()) {
      int a = (c >> e.from) & 1, b = (c >> e.to) & 1;
      int col = 2 * a + b;
      const Eigen::Matrix4d& h = bonds[e.dir];
      diag += h(col, col);
      if (a != b) {
        // hop: (a,b) -> (b,a)
        std::uint64_t c2 = c ^ (std::uint64_t(1) << e.from) ^
                           (std::uint64_t(1) << e.to);
        long r2 = basis.rank_of(c2);
        int row = 2 * b + a;
        trip.emplace_back(r2, r, h(row, col));
      }
    }
    if (diag != 0.0) trip.emplace_back(r, r, diag);
  }
  SparseOperator op(basis.size(), basis.size());
  op.setFromTriplets(trip.begin(), trip.end());
  op.makeCompressed();
  return op;
}

}  // namespace

SparseOperator assemble_full(const LatticeRegion& region,
                             const ModelParams& params, int max_sites) {
  if (params.dim() != region.dim())
    throw ValidationError("params dimension does not match region");
  return assemble_on_basis(region, params, SectorBasis::full(region, max_sites));
}

SparseOperator assemble_sector(const LatticeRegion& region,
                               const ModelParams& params, int n_particles) {
  if (params.dim() != region.dim())
    throw ValidationError("params dimension does not match region");
  return assemble_on_basis(region, params,
                           SectorBasis::sector(region, n_particles));
}

SparseOperator one_particle_matrix(const LatticeRegion& region,
                                   const ModelParams& params) {
  params.validate();
  if (params.dim() != region.dim())
    throw ValidationError("params dimension does not match region");
  int n = region.size();
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * region.edges().size() + n);
  for (const Edge& e : region.edges()) {
    double lam = params.lambda[e.dir];
    double w = 1.0 + lam * lam;
    diag[e.from] += lam * lam / w;
    diag[e.to] += 1.0 / w;
    trip.emplace_back(e.from, e.to, -lam / w);
    trip.emplace_back(e.to, e.from, -lam / w);
  }
  for (int i = 0; i < n; ++i)
    if (diag[i] != 0.0) trip.emplace_back(i, i, diag[i]);
  SparseOperator op(n, n);
  op.setFromTriplets(trip.begin(), trip.end());
  op.makeCompressed();
  return op;
}

SparseOperator assemble_multispecies(const LatticeRegion& region,
                                     const ModelParams& params, long max_dim) {
  params.validate();
  if (params.dim() != region.dim())
    throw ValidationError("params dimension does not match region");
  int n = params.species();
  if (n < 1) throw ValidationError("need at least one species");
  int q = n + 1;  // local dimension
  int ns = region.size();
  long dim = 1;
  for (int i = 0; i < ns; ++i) {
    if (dim > max_dim / q)
      throw ValidationError("multispecies space capped at " +
                            std::to_string(max_dim) + " configurations");
    dim *= q;
  }

  // lambda of species i in direction k; species 0 (vacuum) has lambda = 1.
  auto lam = [&](int i, int k) {
    if (i == 0) return 1.0;
    return n == 1 && params.multi_lambda.rows() == 0 ? params.lambda[k]
                                                     : params.multi_lambda(i - 1, k);
  };

  // Per-direction q^2 x q^2 bond block: sum of |phi><phi| over
  //   phi_i  = |0,i> - lambda_i |i,0>          (normalized)
  //   phi_ij = lambda_i |i,j> - lambda_j |j,i> (i < j, normalized)
  //   phi_ii = |i,i>, weighted (1+delta)
  std::vector<Eigen::MatrixXd> bonds(region.dim());
  for (int k = 0; k < region.dim(); ++k) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(q * q, q * q);
    auto add_proj = [&](Eigen::VectorXd v, double weight) {
      v.normalize();
      h += weight * v * v.transpose();
    };
    for (int i = 1; i <= n; ++i) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(q * q);
      v[0 * q + i] = 1.0;
      v[i * q + 0] = -lam(i, k);
      add_proj(v, 1.0);
      Eigen::VectorXd w = Eigen::VectorXd::Zero(q * q);
      w[i * q + i] = 1.0;
      add_proj(w, 1.0 + params.delta);
      for (int j = i + 1; j <= n; ++j) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(q * q);
        u[i * q + j] = lam(i, k);
        u[j * q + i] = -lam(j, k);
        add_proj(u, 1.0);
      }
    }
    bonds[k] = h;
  }

  std::vector<long> stride(ns);
  long p = 1;
  for (int i = 0; i < ns; ++i) stride[i] = p, p *= q;

  std::vector<Eigen::Triplet<double>> trip;
  for (long c = 0; c < dim; ++c) {
    double diag = 0.0;
    for (const Edge& e : region.edges()) {
      int a = static_cast<int>((c / stride[e.from]) % q);
      int b = static_cast<int>((c / stride[e.to]) % q);
      int col = a * q + b;
      const Eigen::MatrixXd& h = bonds[e.dir];
      diag += h(col, col);
      for (int a2 = 0; a2 < q; ++a2)
        for (int b2 = 0; b2 < q; ++b2) {
          int row = a2 * q + b2;
          if (row == col || h(row, col) == 0.0) continue;
          long c2 = c + (a2 - a) * stride[e.from] + (b2 - b) * stride[e.to];
          trip.emplace_back(c2, c, h(row, col));
        }
    }
    if (diag != 0.0) trip.emplace_back(c, c, diag);
  }
  SparseOperator op(dim, dim);
  op.setFromTriplets(trip.begin(), trip.end());
  op.makeCompressed();
  return op;
}

double operator_norm1(const SparseOperator& op) {
  double best = 0.0;
  for (int j = 0; j < op.outerSize(); ++j) {
    double s = 0.0;
    for (SparseOperator::InnerIterator it(op, j); it; ++it)
      s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

void write_triplets(std::ostream& out, const SparseOperator& op) {
  char buf[64];
  for (int j = 0; j < op.outerSize(); ++j)
    for (SparseOperator::InnerIterator it(op, j); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g", static_cast<long>(it.row()),
                    static_cast<long>(it.col()), it.value());
      out << buf << '\n';
    }
}

SparseOperator read_triplets(std::istream& in, long dim) {
  std::vector<Eigen::Triplet<double>> trip;
  long r, c;
  double v;
  while (in >> r >> c >> v) trip.emplace_back(r, c, v);
  SparseOperator op(dim, dim);
  op.setFromTriplets(trip.begin(), trip.end());
  op.makeCompressed();
  return op;
}

void write_state(std::ostream& out, const SectorBasis& basis,
                 const Eigen::VectorXd& v) {
  if (v.size() != basis.size())
    throw ValidationError("state length does not match basis");
  char buf[64];
  for (long r = 0; r < basis.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%llu %.17g",
                  static_cast<unsigned long long>(basis.config(r)), v[r]);
    out << buf << '\n';
  }
}

}  // namespace pvbs
