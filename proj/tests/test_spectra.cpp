#include <doctest.h>

#include <Eigen/Dense>
#include <vector>

#include "pvbs/errors.hpp"
#include "pvbs/groundstate.hpp"
#include "pvbs/lattice.hpp"
#include "pvbs/model.hpp"
#include "pvbs/spectra.hpp"

using namespace pvbs;

namespace {

ModelParams params2(double l1, double l2) {
  ModelParams p;
  p.lambda = Eigen::Vector2d(l1, l2);
  return p;
}

SparseOperator diag_operator(const Eigen::VectorXd& d) {
  SparseOperator op(d.size(), d.size());
  std::vector<Eigen::Triplet<double>> t;
  for (long i = 0; i < d.size(); ++i) t.emplace_back(i, i, d[i]);
  op.setFromTriplets(t.begin(), t.end());
  return op;
}

}  // namespace

TEST_SUITE("spectra") {

TEST_CASE("low end of the spectrum matches a dense solve") {
  LatticeRegion b = make_box({1, 1});
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    double l1 = 0.3 + 0.37 * seed, l2 = 2.3 / seed;
    SparseOperator H = assemble_full(b, params2(l1, l2));
    Eigen::MatrixXd dense(H);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    SpectralReport r = lowest_eigenpairs(H, 14, 1e-12, seed);
    REQUIRE(r.converged);
    for (int i = 0; i < 14; ++i)
      CHECK(std::abs(r.eigenvalues[i] - es.eigenvalues()[i]) <=
            1e-9 * (1.0 + operator_norm1(H)));
    // residuals are honest
    for (int i = 0; i < 14; ++i) {
      double res = (H * r.vectors.col(i) - r.eigenvalues[i] * r.vectors.col(i)).norm();
      CHECK(res <= 1e-9 * (1.0 + operator_norm1(H)));
    }
  }
}

TEST_CASE("degenerate eigenvalues come out with the right multiplicity") {
  Eigen::VectorXd d(40);
  for (int i = 0; i < 40; ++i) d[i] = 1.0 + i / 40.0;
  d[0] = d[1] = 0.0;
  d[2] = d[3] = 0.5;
  SpectralReport r = lowest_eigenpairs(diag_operator(d), 4, 1e-12, 7);
  REQUIRE(r.converged);
  CHECK(r.eigenvalues[0] <= 1e-12);
  CHECK(r.eigenvalues[1] <= 1e-12);
  CHECK(r.eigenvalues[2] == doctest::Approx(0.5).epsilon(1e-11));
  CHECK(r.eigenvalues[3] == doctest::Approx(0.5).epsilon(1e-11));
  CHECK(r.kernel_dim == 2);
  CHECK(r.gap == doctest::Approx(0.5).epsilon(1e-11));
  // the two kernel vectors span e_0, e_1
  Eigen::MatrixXd V = r.vectors.leftCols(2);
  Eigen::MatrixXd G = V.transpose() * V;
  CHECK((G - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(V.bottomRows(38).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("kernel dimension of a chain Hamiltonian") {
  LatticeRegion chain = make_box({7});
  ModelParams p;
  p.lambda = Eigen::VectorXd::Constant(1, 0.5);
  SparseOperator H = assemble_full(chain, p);
  SpectralReport r = lowest_eigenpairs(H, 4, 1e-12, 11);
  REQUIRE(r.converged);
  CHECK(r.kernel_dim == 2);
  CHECK(r.eigenvalues[2] > r.zero_thresh);
}

TEST_CASE("deflation against the analytic kernel reproduces the sector gap") {
  LatticeRegion chain = make_box({7});
  ModelParams p;
  p.lambda = Eigen::VectorXd::Constant(1, 0.5);
  GapResult full = finite_gap(chain, p, GapMode::full);
  GapResult sect = finite_gap(chain, p, GapMode::sectors, 8);
  CHECK_FALSE(sect.sectors_only);  // every sector inspected
  CHECK(full.gap == doctest::Approx(sect.gap).epsilon(1e-9));
  CHECK(full.gap > 0.0);
}

TEST_CASE("same seed gives identical output, different seeds agree to tolerance") {
  LatticeRegion b = make_box({2, 1});
  SparseOperator H = assemble_full(b, params2(0.8, 1.7));
  SpectralReport a = lowest_eigenpairs(H, 5, 1e-12, 42);
  SpectralReport b2 = lowest_eigenpairs(H, 5, 1e-12, 42);
  CHECK((a.eigenvalues - b2.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.vectors - b2.vectors).cwiseAbs().maxCoeff() == 0.0);
  SpectralReport c = lowest_eigenpairs(H, 5, 1e-12, 43);
  CHECK((a.eigenvalues - c.eigenvalues).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("an impossible budget raises ConvergenceError") {
  Eigen::VectorXd d(100);
  for (int i = 0; i < 100; ++i) d[i] = i * 0.01;
  LanczosOptions opts;
  opts.max_basis = 3;
  opts.max_cycles = 1;
  CHECK_THROWS_AS(lowest_eigenpairs(diag_operator(d), 6, 1e-12, 1, {}, opts),
                  ConvergenceError);
}

TEST_CASE("one-particle spectrum matches a dense solve of the sector block") {
  LatticeRegion b = make_box({5, 5});
  ModelParams p = params2(0.6, 1.9);
  SpectralReport r = one_particle_spectrum(b, p, 5);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      Eigen::MatrixXd(one_particle_matrix(b, p)));
  for (int i = 0; i < 5; ++i)
    CHECK(std::abs(r.eigenvalues[i] - es.eigenvalues()[i]) <= 1e-10);
}

TEST_CASE("sector mode flags partial coverage and full mode refuses huge spaces") {
  std::vector<Site> sites;
  for (int x = 0; x < 23; ++x) sites.push_back({x});
  LatticeRegion chain(1, std::move(sites));
  ModelParams p;
  p.lambda = Eigen::VectorXd::Constant(1, 0.5);
  CHECK_THROWS_AS(finite_gap(chain, p, GapMode::full), ValidationError);
  GapResult g = finite_gap(chain, p, GapMode::sectors, 2);
  CHECK(g.sectors_only);
  CHECK(g.gap > 0.0);
}

TEST_CASE("zero threshold scales with the operator norm") {
  Eigen::VectorXd d(8);
  d << 0, 0, 1, 2, 3, 4, 5, 1000.0;
  SparseOperator op = diag_operator(d);
  CHECK(zero_threshold(op) == doctest::Approx(1e-10 * 1001.0).epsilon(1e-12));
}

}  // TEST_SUITE
