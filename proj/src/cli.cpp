#include "pvbs/cli.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pvbs/bounds.hpp"
#include "pvbs/errors.hpp"
#include "pvbs/groundstate.hpp"
#include "pvbs/spectra.hpp"
#include "pvbs/thermo.hpp"

namespace pvbs::cli {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw ValidationError("cannot write " + p.string());
  return f;
}

}  // namespace

void to_json(nlohmann::json& j, const JobConfig& c) {
  j = nlohmann::json{
      {"command", c.command},
      {"region",
       {{"kind", c.region.kind},
        {"N", c.region.N},
        {"L", c.region.L},
        {"path", c.region.path}}},
      {"lambda", c.lambda},
      {"delta", c.delta},
      {"multi_lambda", c.multi_lambda},
      {"solver",
       {{"tol", c.solver.tol},
        {"seed", c.solver.seed},
        {"max_basis", c.solver.max_basis},
        {"threads", c.solver.threads}}},
      {"out", c.out},
      {"gap_mode", c.gap_mode},
      {"max_sector", c.max_sector},
      {"dump_operator", c.dump_operator},
      {"z", c.z},
      {"cross", c.cross},
      {"n_values", c.n_values},
      {"window_origin", c.window_origin},
      {"window_size", c.window_size},
      {"l_values", c.l_values},
      {"trials", c.trials},
      {"family", c.family},
      {"n_max", c.n_max},
      {"scenario_tol", c.scenario_tol},
      {"L_values", c.L_values}};
}

void from_json(const nlohmann::json& j, JobConfig& c) {
  c = JobConfig{};
  c.command = j.value("command", std::string{});
  if (j.contains("region")) {
    const auto& r = j.at("region");
    c.region.kind = r.value("kind", std::string{"box"});
    c.region.N = r.value("N", std::vector<int>{});
    c.region.L = r.value("L", 0);
    c.region.path = r.value("path", std::string{});
  }
  c.lambda = j.value("lambda", std::vector<double>{});
  c.delta = j.value("delta", 0.0);
  c.multi_lambda = j.value("multi_lambda", std::vector<std::vector<double>>{});
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    c.solver.tol = s.value("tol", 1e-12);
    c.solver.seed = s.value("seed", std::uint64_t{1});
    c.solver.max_basis = s.value("max_basis", 350);
    c.solver.threads = s.value("threads", 0);
  }
  c.out = j.value("out", std::string{"."});
  c.gap_mode = j.value("gap_mode", std::string{"full"});
  c.max_sector = j.value("max_sector", 3);
  c.dump_operator = j.value("dump_operator", false);
  c.z = j.value("z", std::vector<double>{});
  c.cross = j.value("cross", std::vector<int>{});
  c.n_values = j.value("n_values", std::vector<int>{});
  c.window_origin = j.value("window_origin", std::vector<int>{});
  c.window_size = j.value("window_size", std::vector<int>{});
  c.l_values = j.value("l_values", std::vector<int>{});
  c.trials = j.value("trials", 8);
  c.family = j.value("family", std::string{"quadrant"});
  c.n_max = j.value("n_max", 20);
  c.scenario_tol = j.value("scenario_tol", 1e-9);
  c.L_values = j.value("L_values", std::vector<int>{});
}

JobConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot read " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad config json: ") + e.what());
  }
  return j.get<JobConfig>();
}

LatticeRegion build_region(const RegionSpec& spec) {
  if (spec.kind == "box") return make_box(spec.N);
  if (spec.kind == "centered_box") return make_centered_box(spec.N);
  if (spec.kind == "diamond") return make_diamond(spec.L).region;
  if (spec.kind == "file") return load_site_list(spec.path);
  throw ValidationError("unknown region kind '" + spec.kind + "'");
}

ModelParams build_params(const JobConfig& c) {
  if (c.lambda.empty()) throw ValidationError("lambda is required");
  ModelParams p;
  p.lambda = Eigen::Map<const Eigen::VectorXd>(c.lambda.data(),
                                               static_cast<long>(c.lambda.size()));
  p.delta = c.delta;
  if (!c.multi_lambda.empty()) {
    p.multi_lambda.resize(static_cast<long>(c.multi_lambda.size()), p.lambda.size());
    for (std::size_t i = 0; i < c.multi_lambda.size(); ++i) {
      if (c.multi_lambda[i].size() != c.lambda.size())
        throw ValidationError("multi_lambda rows must have one entry per direction");
      for (long k = 0; k < p.lambda.size(); ++k)
        p.multi_lambda(static_cast<long>(i), k) = c.multi_lambda[i][k];
    }
  }
  p.validate();
  return p;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string site_list_hash(const LatticeRegion& region) {
  std::ostringstream ss;
  write_site_list(ss, region);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(ss.str())));
  return buf;
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("fit series length mismatch");
  if (x.size() < 3) throw ValidationError("power-law fit needs at least 3 points");
  long n = static_cast<long>(x.size());
  Eigen::VectorXd lx(n), ly(n);
  for (long i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw ValidationError("power-law fit needs strictly positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = lx.mean(), my = ly.mean();
  Eigen::VectorXd dx = lx.array() - mx, dy = ly.array() - my;
  double varx = dx.squaredNorm();
  if (varx < 1e-300) throw ValidationError("power-law fit needs distinct abscissae");
  PowerLawFit fit;
  fit.exponent = dx.dot(dy) / varx;
  double ss_res = (dy - fit.exponent * dx).squaredNorm();
  double ss_tot = dy.squaredNorm();
  fit.r_squared = ss_tot < 1e-300 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

namespace {

void run_lattice(const JobConfig& config, const std::filesystem::path& out,
                 nlohmann::json& rep) {
  LatticeRegion R = build_region(config.region);
  rep["region"] = {{"dim", R.dim()},
                   {"sites", R.size()},
                   {"edges", R.edges().size()},
                   {"connected", R.connected()}};
  if (config.region.kind == "file") rep["region"]["site_list_hash"] = site_list_hash(R);
  if (config.region.kind == "diamond") {
    DiamondRegion D = make_diamond(config.region.L);
    rep["region"]["boundary_classes"] = {
        {"interior", D.count(DiamondClass::interior)},
        {"edge", D.count(DiamondClass::edge)},
        {"opp", D.count(DiamondClass::opp)},
        {"uside", D.count(DiamondClass::uside)},
        {"lside", D.count(DiamondClass::lside)}};
  }
  auto f = open_out(out / "sites.csv");
  for (int k = 0; k < R.dim(); ++k) f << (k ? ",x" : "x") << k;
  f << '\n';
  for (const Site& s : R.sites()) {
    for (int k = 0; k < R.dim(); ++k) f << (k ? "," : "") << s[k];
    f << '\n';
  }
}

void run_gap(const JobConfig& config, const std::filesystem::path& out,
             nlohmann::json& rep) {
  LatticeRegion R = build_region(config.region);
  ModelParams P = build_params(config);
  GapMode mode;
  if (config.gap_mode == "full")
    mode = GapMode::full;
  else if (config.gap_mode == "sectors")
    mode = GapMode::sectors;
  else
    throw ValidationError("gap_mode must be 'full' or 'sectors'");

  GapResult g = finite_gap(R, P, mode, config.max_sector, config.solver.tol,
                           config.solver.seed);
  rep["gap"] = g.gap;
  rep["mode"] = config.gap_mode;
  rep["max_sector"] = g.max_sector;
  rep["sectors_only"] = g.sectors_only;
  rep["gap_sector"] = g.gap_sector;
  rep["report"] = g.report;
  rep["martingale_lower_bound"] = martingale_lower_bound(P, config.solver.tol,
                                                         config.solver.seed);
  rep["bulk_upper_bound"] = bulk_upper_bound(P);
  if (config.dump_operator) {
    auto f = open_out(out / "operator.txt");
    write_triplets(f, assemble_full(R, P));
  }
}

void run_bounds(const JobConfig& config, nlohmann::json& rep) {
  ModelParams P = build_params(config);
  std::vector<double> eps;
  for (int k = 0; k < P.dim(); ++k) eps.push_back(epsilon_factor(P.lambda[k]));
  rep["epsilon"] = eps;
  rep["gamma_unit_hypercube"] =
      gamma_unit_hypercube(P, config.solver.tol, config.solver.seed);
  rep["martingale_lower_bound"] =
      martingale_lower_bound(P, config.solver.tol, config.solver.seed);
  rep["bulk_upper_bound"] = bulk_upper_bound(P);
}

void run_probe(const JobConfig& config, nlohmann::json& rep) {
  if (config.region.kind != "centered_box")
    throw ValidationError("probe works on a centered_box region");
  ModelParams P = build_params(config);
  std::vector<double> z = config.z;
  if (z.empty()) z.assign(P.dim(), 1.0);
  RectangleProbe pr = rectangle_probe_energy(config.region.N, P, z);
  rep["probe"] = {{"z", z},
                  {"quotient", pr.quotient},
                  {"quotient_closed", pr.quotient_closed},
                  {"bulk_term", pr.bulk_term},
                  {"boundary_term", pr.boundary_term},
                  {"norm2", pr.norm2}};
}

void run_condition3(const JobConfig& config, const std::filesystem::path& out,
                    nlohmann::json& rep) {
  ModelParams P = build_params(config);
  if (config.n_values.empty()) throw ValidationError("condition3 needs n_values");
  auto f = open_out(out / "condition3.csv");
  f << "n,numeric_sup,analytic_bound,epsilon_sq\n";
  nlohmann::json rows = nlohmann::json::array();
  int first_n = -1;
  for (int n : config.n_values) {
    Condition3Result r = slab_condition3_bound(P, config.cross, n);
    f << r.n << ',' << fmt17(r.numeric_sup) << ',' << fmt17(r.analytic_bound) << ','
      << fmt17(r.epsilon_sq) << '\n';
    rows.push_back({{"n", r.n},
                    {"numeric_sup", r.numeric_sup},
                    {"analytic_bound", r.analytic_bound},
                    {"epsilon_sq", r.epsilon_sq},
                    {"cross_sites", r.cross_sites}});
    if (first_n < 0 && r.numeric_sup < r.epsilon_sq) first_n = n;
  }
  rep["rows"] = rows;
  rep["first_n_below_epsilon_sq"] = first_n;
}

void run_ltqo(const JobConfig& config, const std::filesystem::path& out,
              nlohmann::json& rep) {
  LatticeRegion ambient = build_region(config.region);
  ModelParams P = build_params(config);
  int d = ambient.dim();
  if (static_cast<int>(config.window_origin.size()) != d ||
      static_cast<int>(config.window_size.size()) != d)
    throw ValidationError("window_origin and window_size need one entry per direction");
  for (int s : config.window_size)
    if (s < 1) throw ValidationError("window_size entries must be >= 1");

  std::vector<Site> X;
  Site cur(config.window_origin.begin(), config.window_origin.end());
  for (;;) {
    X.push_back(cur);
    int k = d - 1;
    while (k >= 0) {
      if (++cur[k] < config.window_origin[k] + config.window_size[k]) break;
      cur[k] = config.window_origin[k];
      --k;
    }
    if (k < 0) break;
  }
  if (X.size() > 12) throw ValidationError("observable support too large (max 12 sites)");
  if (config.l_values.empty()) throw ValidationError("ltqo needs l_values");
  if (config.trials < 1) throw ValidationError("trials must be >= 1");

  auto f = open_out(out / "ltqo.csv");
  f << "l,trial,lhs,rhs,f,ratio\n";
  nlohmann::json per_l = nlohmann::json::array();
  for (int l : config.l_values) {
    double max_ratio = 0.0, fl = 0.0;
    for (int t = 0; t < config.trials; ++t) {
      Eigen::MatrixXd A = random_hermitian_on(
          static_cast<int>(X.size()),
          config.solver.seed + 1000u * static_cast<unsigned>(l) + static_cast<unsigned>(t));
      LtqoCheck chk = ltqo_verify(ambient, X, l, P, A);
      double ratio = chk.rhs > 0 ? chk.lhs / chk.rhs : 0.0;
      max_ratio = std::max(max_ratio, ratio);
      fl = chk.f;
      f << l << ',' << t << ',' << fmt17(chk.lhs) << ',' << fmt17(chk.rhs) << ','
        << fmt17(chk.f) << ',' << fmt17(ratio) << '\n';
    }
    per_l.push_back({{"l", l}, {"f", fl}, {"max_ratio", max_ratio}});
  }
  rep["window_sites"] = X.size();
  rep["per_l"] = per_l;
}

void run_scenario(const JobConfig& config, const std::filesystem::path& out,
                  nlohmann::json& rep) {
  ModelParams P = build_params(config);
  RegionFamily fam;
  if (config.family == "quadrant")
    fam = RegionFamily::quadrant(P.dim());
  else if (config.family == "centered")
    fam = RegionFamily::centered(P.dim());
  else if (config.family == "diamonds")
    fam = RegionFamily::diamond_family();
  else
    throw ValidationError("family must be quadrant, centered or diamonds");

  ScenarioVerdict v = classify_scenario(fam, P, config.n_max, config.scenario_tol);
  auto f = open_out(out / "scenario.csv");
  f << "n,log_C\n";
  for (std::size_t i = 0; i < v.log_C.size(); ++i)
    f << (i + 1) << ',' << fmt17(v.log_C[i]) << '\n';

  rep["scenario"] = scenario_name(v.scenario);
  rep["numeric_scenario"] = scenario_name(v.numeric_scenario);
  rep["analytic_backstop"] = v.analytic_backstop;
  rep["diverges"] = v.diverges;
  rep["limit_estimate"] = v.limit_estimate;
  rep["tail_fraction"] = v.tail_fraction;
  rep["log_C"] = v.log_C;

  if (!config.window_origin.empty()) {
    if (config.window_origin.size() != config.window_size.size() ||
        static_cast<int>(config.window_origin.size()) != P.dim())
      throw ValidationError("window_origin and window_size need one entry per direction");
    std::vector<Site> W;
    Site cur(config.window_origin.begin(), config.window_origin.end());
    for (;;) {
      W.push_back(cur);
      int k = P.dim() - 1;
      while (k >= 0) {
        if (++cur[k] < config.window_origin[k] + config.window_size[k]) break;
        cur[k] = config.window_origin[k];
        --k;
      }
      if (k < 0) break;
    }
    rep["window_weight"] =
        one_particle_weight_in_window(fam.at(std::max(1, config.n_max)), P, W);
  }
}

void run_scaling(const JobConfig& config, const std::filesystem::path& out,
                 nlohmann::json& rep) {
  if (config.lambda.size() != 1 &&
      !(config.lambda.size() == 2 && config.lambda[0] == config.lambda[1]))
    throw ValidationError("scaling uses one lambda for both directions");
  double lam = config.lambda[0];
  if (config.L_values.size() < 3)
    throw ValidationError("scaling needs at least 3 L values");

  auto f = open_out(out / "scaling.csv");
  f << "L,quotient,closed_bound\n";
  std::vector<double> Ls, qs;
  nlohmann::json rows = nlohmann::json::array();
  for (int L : config.L_values) {
    DiamondProbe pr = diamond_probe_energy(L, lam);
    f << L << ',' << fmt17(pr.quotient) << ',' << fmt17(pr.closed_bound) << '\n';
    rows.push_back({{"L", L},
                    {"quotient", pr.quotient},
                    {"closed_bound", pr.closed_bound},
                    {"norm2", pr.norm2}});
    Ls.push_back(L);
    qs.push_back(pr.quotient);
  }
  PowerLawFit fit = fit_power_law(Ls, qs);
  rep["rows"] = rows;
  rep["fit"] = {{"exponent", fit.exponent}, {"r_squared", fit.r_squared}};
}

}  // namespace

nlohmann::json run(const JobConfig& config) {
  if (config.command.empty()) throw ValidationError("no command");
  if (config.solver.threads > 0) Eigen::setNbThreads(config.solver.threads);

  std::filesystem::path out(config.out);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw ValidationError("cannot create output directory " + out.string());

  nlohmann::json jc = config;
  {
    auto f = open_out(out / (config.command + "_config.json"));
    f << jc.dump(2) << '\n';
  }

  nlohmann::json rep;
  rep["config"] = jc;

  if (config.command == "lattice")
    run_lattice(config, out, rep);
  else if (config.command == "gap")
    run_gap(config, out, rep);
  else if (config.command == "bounds")
    run_bounds(config, rep);
  else if (config.command == "probe")
    run_probe(config, rep);
  else if (config.command == "condition3")
    run_condition3(config, out, rep);
  else if (config.command == "ltqo")
    run_ltqo(config, out, rep);
  else if (config.command == "scenario")
    run_scenario(config, out, rep);
  else if (config.command == "scaling")
    run_scaling(config, out, rep);
  else
    throw ValidationError("unknown command '" + config.command + "'");

  {
    auto f = open_out(out / (config.command + ".json"));
    f << rep.dump(2) << '\n';
  }
  return rep;
}

}  // namespace pvbs::cli
