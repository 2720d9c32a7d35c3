// End-to-end acceptance checks.  Each criterion prints one PASS/FAIL line;
// the exit status is nonzero if any of them fail.  Tolerances are pinned
// here, next to the checks they guard.

#include <unistd.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <json.hpp>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pvbs/bounds.hpp"
#include "pvbs/cli.hpp"
#include "pvbs/errors.hpp"
#include "pvbs/groundstate.hpp"
#include "pvbs/lattice.hpp"
#include "pvbs/model.hpp"
#include "pvbs/spectra.hpp"
#include "pvbs/thermo.hpp"

using namespace pvbs;

namespace {

constexpr double kKernelAngleTol = 1e-8;
constexpr double kResidualTol = 1e-12;
constexpr double kClosedFormTol = 1e-10;
constexpr double kRouteAgreementTol = 1e-10;
constexpr double kQuotientSlack = 1e-12;
constexpr double kSeparabilityTol = 1e-10;
constexpr double kScenarioTol = 1e-9;
constexpr double kOrthoTol = 1e-14;
constexpr double kStateResidualTol = 1e-12;

int failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", name, detail.empty() ? "" : " | ",
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <class F>
void criterion(const char* name, F&& f) {
  try {
    std::string detail;
    bool ok = f(detail);
    report(name, ok, detail);
  } catch (const std::exception& e) {
    report(name, false, std::string("exception: ") + e.what());
  }
}

ModelParams make_params(const std::vector<double>& lam, double delta = 0.0) {
  ModelParams p;
  p.lambda = Eigen::Map<const Eigen::VectorXd>(lam.data(), static_cast<long>(lam.size()));
  p.delta = delta;
  return p;
}

// Frobenius distance of the numeric kernel columns from the analytic kernel
// plane; upper-bounds the largest principal-angle sine.
double kernel_distance(const Eigen::MatrixXd& V, const Eigen::VectorXd& p0,
                       const Eigen::VectorXd& p1) {
  Eigen::MatrixXd R = V - p0 * (p0.transpose() * V) - p1 * (p1.transpose() * V);
  return R.norm();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

bool check_kernel(const LatticeRegion& region, const ModelParams& params,
                  std::uint64_t seed, double& worst_dist) {
  SectorBasis full = SectorBasis::full(region);
  SparseOperator H = assemble_full(region, params);
  SpectralReport r = lowest_eigenpairs(H, 4, 1e-12, seed);
  if (r.kernel_dim != 2) return false;
  auto [p0, p1] = kernel_pair(region, params, full);
  double dist = kernel_distance(r.vectors.leftCols(2), p0, p1);
  worst_dist = std::max(worst_dist, dist);
  return dist <= kKernelAngleTol;
}

}  // namespace

int main() {
  criterion("01 kernel is exactly two-dimensional across region shapes", [](std::string& d) {
    std::vector<LatticeRegion> regions;
    regions.push_back(make_box({1, 1}));
    regions.push_back(make_box({2, 1}));
    regions.push_back(LatticeRegion(2, {{0, 0}, {1, 0}, {2, 0}, {0, 1}, {0, 2}}));
    regions.push_back(make_box({7}));
    regions.push_back(make_box({2, 2}));
    bool ok = true;
    double worst = 0.0;
    std::mt19937_64 rng(314159);
    std::uniform_real_distribution<double> u(0.3, 3.0);
    for (std::size_t ri = 0; ri < regions.size(); ++ri) {
      int dim = regions[ri].dim();
      for (int draw = 0; draw < 3; ++draw) {
        std::vector<double> lam(dim);
        for (double& v : lam) v = u(rng);
        ok = check_kernel(regions[ri], make_params(lam), 1000 + ri * 10 + draw, worst) && ok;
      }
    }
    d = "largest kernel distance " + fmt(worst);
    return ok;
  });

  criterion("02 ground-state bond residuals stay at machine precision", [](std::string& d) {
    double worst = 0.0;
    {
      DiamondRegion dia = make_diamond(22, true);
      ModelParams p = make_params({0.5, 0.5});
      Eigen::VectorXd a = one_particle_amplitudes(dia.region, p);
      worst = std::max(worst, max_bond_residual_one_particle(dia.region, p, a));
    }
    LatticeRegion big = make_box({99, 99});
    for (auto lam : std::vector<std::vector<double>>{{0.5, 0.5}, {0.8, 1.25}}) {
      ModelParams p = make_params(lam);
      Eigen::VectorXd a = one_particle_amplitudes(big, p);
      worst = std::max(worst, max_bond_residual_one_particle(big, p, a));
    }
    d = "worst bond residual " + fmt(worst) + " on 10000 sites";
    return worst <= kResidualTol;
  });

  criterion("03 unit-square gap matches its closed form", [](std::string& d) {
    std::mt19937_64 rng(271828);
    std::uniform_real_distribution<double> u(0.3, 3.0);
    double worst = 0.0;
    for (int t = 0; t < 6; ++t) {
      double l1 = t == 0 ? 1.0 : u(rng);
      double l2 = t == 0 ? 1.0 : u(rng);
      double closed =
          2.0 - std::sqrt(1.0 + 4.0 * l1 * l2 / ((1.0 + l1 * l1) * (1.0 + l2 * l2)));
      double num = gamma_unit_hypercube(make_params({l1, l2}));
      worst = std::max(worst, std::abs(num - closed));
    }
    d = "largest deviation " + fmt(worst);
    return worst <= kClosedFormTol;
  });

  criterion("04 finite-volume gaps dominate the martingale lower bound", [](std::string& d) {
    std::vector<std::vector<double>> lams{{0.5, 0.5}, {0.5, 2.0}, {0.7, 1.5}, {2.0, 3.0}};
    bool ok = true;
    double min_margin = 1e300;
    for (const auto& lam : lams) {
      ModelParams p = make_params(lam);
      double mart = martingale_lower_bound(p);
      GapResult full = finite_gap(make_box({3, 2}), p, GapMode::full);
      GapResult sect = finite_gap(make_box({5, 5}), p, GapMode::sectors, 3);
      ok = ok && full.gap >= mart && sect.gap >= mart && full.gap > 0 && sect.gap > 0;
      min_margin = std::min({min_margin, full.gap - mart, sect.gap - mart});
    }
    for (double lam : {0.5, 2.0}) {
      ModelParams p = make_params({lam});
      double mart = martingale_lower_bound(p);
      GapResult full = finite_gap(make_box({7}), p, GapMode::full);
      ok = ok && full.gap >= mart && full.gap > 0;
      min_margin = std::min(min_margin, full.gap - mart);
    }
    d = "smallest gap-over-bound margin " + fmt(min_margin);
    return ok;
  });

  criterion("05 slab overlaps stay below the martingale threshold", [](std::string& d) {
    bool ok = true;
    double max_ratio = 0.0;
    for (int cross : {2, 3})
      for (double lam_d : {0.5, 2.0})
        for (int n : {2, 3, 4}) {
          Condition3Result r = slab_condition3_bound(make_params({0.7, lam_d}), {cross}, n);
          ok = ok && r.numeric_sup <= r.analytic_bound + kClosedFormTol &&
               r.analytic_bound < r.epsilon_sq;
          max_ratio = std::max(max_ratio, r.numeric_sup / r.epsilon_sq);
        }
    d = "largest overlap over threshold " + fmt(max_ratio);
    return ok;
  });

  criterion("06 rectangle probe energies shrink at the boundary-over-volume rate",
            [](std::string& d) {
    bool ok = true;
    std::string excesses;
    for (int n : {5, 10, 20, 40}) {
      RectangleProbe pr =
          rectangle_probe_energy({n, n}, make_params({0.5, 0.5}), {1.0, 1.0});
      double scale = std::max(1.0, std::abs(pr.quotient));
      ok = ok && std::abs(pr.quotient - pr.quotient_closed) <= kRouteAgreementTol * scale;
      ok = ok && pr.quotient <= 0.4 + 2.0 / (2.0 * n + 1.0) + kQuotientSlack;
      double excess = (pr.quotient - 0.4) * (2.0 * n + 1.0);
      ok = ok && excess > 0.0 && excess <= 2.0;
      excesses += (excesses.empty() ? "" : " ") + fmt(excess);
    }
    d = "scaled boundary excesses " + excesses;
    return ok;
  });

  criterion("07 diamond probe energies scale like 1/L^2", [](std::string& d) {
    std::vector<double> Ls, qs;
    bool ok = true;
    for (int L : {6, 10, 14, 18, 22}) {
      DiamondProbe pr = diamond_probe_energy(L, 0.5);
      ok = ok && pr.quotient <= pr.closed_bound + kQuotientSlack;
      Ls.push_back(L);
      qs.push_back(pr.quotient);
    }
    cli::PowerLawFit fit = cli::fit_power_law(Ls, qs);
    ok = ok && fit.exponent >= -2.2 && fit.exponent <= -1.8;
    d = "fitted exponent " + fmt(fit.exponent) + ", r^2 " + fmt(fit.r_squared);
    return ok;
  });

  criterion("08 box spectra separate into one-dimensional chain spectra", [](std::string& d) {
    std::mt19937_64 rng(161803);
    std::uniform_real_distribution<double> u(0.3, 3.0);
    std::vector<int> N{5, 4};
    double worst = 0.0;
    for (int t = 0; t < 3; ++t) {
      std::vector<double> lam{u(rng), u(rng)};
      ModelParams p = make_params(lam);
      Eigen::MatrixXd M(one_particle_matrix(make_box(N), p));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);

      std::vector<Eigen::VectorXd> chain_ev;
      for (int k = 0; k < 2; ++k) {
        int n = N[k] + 1;
        double l = lam[k], w = 1.0 + l * l;
        Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
        for (int x = 0; x < n; ++x) {
          if (x + 1 < n) {
            C(x, x) += l * l / w;
            C(x, x + 1) = C(x + 1, x) = -l / w;
          }
          if (x > 0) C(x, x) += 1.0 / w;
        }
        chain_ev.push_back(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(C).eigenvalues());
      }
      std::vector<double> sums;
      for (long i = 0; i < chain_ev[0].size(); ++i)
        for (long j = 0; j < chain_ev[1].size(); ++j)
          sums.push_back(chain_ev[0][i] + chain_ev[1][j]);
      std::sort(sums.begin(), sums.end());
      for (long i = 0; i < es.eigenvalues().size(); ++i)
        worst = std::max(worst, std::abs(es.eigenvalues()[i] - sums[i]));
    }
    d = "largest eigenvalue mismatch " + fmt(worst);
    return worst <= kSeparabilityTol;
  });

  criterion("09 local observables cannot distinguish the two ground states",
            [](std::string& d) {
    LatticeRegion box = make_box({7, 7});
    std::vector<Site> X{{3, 3}, {3, 4}, {4, 3}, {4, 4}};
    ModelParams p = make_params({0.6, 0.8});
    bool ok = true;
    double max_ratio = 0.0;
    for (int t = 0; t < 20; ++t) {
      Eigen::MatrixXd A = random_hermitian_on(4, 500 + t);
      for (int l : {1, 2, 3}) {
        LtqoCheck chk = ltqo_verify(box, X, l, p, A);
        ok = ok && chk.lhs <= chk.rhs;
        max_ratio = std::max(max_ratio, chk.lhs / chk.rhs);
      }
    }
    double f1 = ltqo_f(X, 1, box, p), f3 = ltqo_f(X, 3, box, p);
    ok = ok && f3 < f1;
    d = "largest bound usage " + fmt(max_ratio) + ", f(3)/f(1) " + fmt(f3 / f1);
    return ok;
  });

  criterion("10 normalization sums classify bound versus escaping states",
            [](std::string& d) {
    ScenarioVerdict conv =
        classify_scenario(RegionFamily::quadrant(2), make_params({0.5, 0.5}), 40);
    bool ok = conv.scenario == Scenario::II &&
              std::abs(conv.limit_estimate - 16.0 / 9.0) <= kScenarioTol;
    ScenarioVerdict cen =
        classify_scenario(RegionFamily::centered(2), make_params({0.5, 0.5}), 10);
    ok = ok && cen.scenario == Scenario::I;
    ScenarioVerdict iso =
        classify_scenario(RegionFamily::quadrant(2), make_params({1.0, 1.0}), 25);
    ok = ok && iso.scenario == Scenario::I;
    double w = one_particle_weight_in_window(make_box({40, 40}), make_params({0.5, 0.5}),
                                             {{0, 0}});
    ok = ok && std::abs(w - 9.0 / 16.0) <= kScenarioTol;
    d = "limit " + fmt(conv.limit_estimate) + ", origin weight " + fmt(w);
    return ok;
  });

  criterion("11 the anisotropy deformation preserves the ground space", [](std::string& d) {
    LatticeRegion box = make_box({1, 2});
    double worst = 0.0;
    bool ok = true;
    int i = 0;
    for (double delta : {-0.5, 0.0, 1.0, 5.0})
      ok = check_kernel(box, make_params({0.8, 1.3}, delta), 9000 + i++, worst) && ok;
    d = "largest kernel distance " + fmt(worst);
    return ok;
  });

  criterion("12 multi-species ground states are exact and orthonormal", [](std::string& d) {
    struct Case {
      LatticeRegion region;
      Eigen::MatrixXd rows;
    };
    std::vector<Case> cases;
    {
      Eigen::MatrixXd r1(2, 1);
      r1 << 0.7, 1.4;
      cases.push_back({make_box({3}), r1});
      Eigen::MatrixXd r2(2, 2);
      r2 << 0.7, 1.2, 1.4, 0.6;
      cases.push_back({make_box({1, 1}), r2});
    }
    bool ok = true;
    double worst_res = 0.0, worst_gram = 0.0;
    for (const Case& c : cases) {
      ModelParams p;
      p.lambda = c.rows.row(0).transpose();
      p.multi_lambda = c.rows;
      SparseOperator H = assemble_multispecies(c.region, p);
      std::vector<Eigen::VectorXd> states;
      for (const auto& M :
           std::vector<std::vector<int>>{{}, {1}, {2}, {1, 2}}) {
        Eigen::VectorXd psi = multispecies_ground_state(c.region, p, M);
        worst_res = std::max(worst_res, (H * psi).norm());
        states.push_back(std::move(psi));
      }
      for (std::size_t a = 0; a < states.size(); ++a)
        for (std::size_t b = 0; b < states.size(); ++b)
          worst_gram = std::max(worst_gram, std::abs(states[a].dot(states[b]) -
                                                     (a == b ? 1.0 : 0.0)));
    }
    ok = worst_res <= kStateResidualTol && worst_gram <= kOrthoTol;
    d = "worst residual " + fmt(worst_res) + ", gram deviation " + fmt(worst_gram);
    return ok;
  });

  criterion("13 runs replay bit-for-bit from their saved configs", [](std::string& d) {
    namespace fs = std::filesystem;
    fs::path base = fs::temp_directory_path() / ("pvbs_accept_" + std::to_string(::getpid()));
    fs::remove_all(base);
    bool ok = true;

    std::vector<cli::JobConfig> jobs(5);
    jobs[0].command = "gap";
    jobs[0].region.kind = "box";
    jobs[0].region.N = {3, 2};
    jobs[0].lambda = {0.7, 1.5};
    jobs[0].gap_mode = "sectors";
    jobs[0].max_sector = 2;
    jobs[1].command = "scenario";
    jobs[1].family = "quadrant";
    jobs[1].lambda = {0.5, 0.5};
    jobs[1].n_max = 40;
    jobs[1].window_origin = {0, 0};
    jobs[1].window_size = {1, 1};
    jobs[2].command = "probe";
    jobs[2].region.kind = "centered_box";
    jobs[2].region.N = {5, 5};
    jobs[2].lambda = {0.5, 0.5};
    jobs[3].command = "condition3";
    jobs[3].lambda = {0.7, 0.5};
    jobs[3].cross = {2};
    jobs[3].n_values = {2, 3, 4};
    jobs[4].command = "scaling";
    jobs[4].lambda = {0.5};
    jobs[4].L_values = {6, 10, 14};

    for (std::size_t i = 0; i < jobs.size(); ++i) {
      cli::JobConfig first = jobs[i];
      first.out = (base / ("a" + std::to_string(i))).string();
      nlohmann::json rep1 = cli::run(first);

      cli::JobConfig again =
          cli::load_config((fs::path(first.out) / (first.command + "_config.json")).string());
      again.out = (base / ("b" + std::to_string(i))).string();
      nlohmann::json rep2 = cli::run(again);

      rep1["config"].erase("out");
      rep2["config"].erase("out");
      if (rep1.dump() != rep2.dump()) {
        ok = false;
        d += jobs[i].command + " diverged; ";
      }
    }
    fs::remove_all(base);
    if (ok) d = "5 commands replayed identically";
    return ok;
  });

  std::printf("%d of 13 criteria passed\n", 13 - failures);
  return failures == 0 ? 0 : 1;
}
