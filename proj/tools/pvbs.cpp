#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "pvbs/cli.hpp"
#include "pvbs/errors.hpp"

using pvbs::cli::JobConfig;

int main(int argc, char** argv) {
  CLI::App app{
      "pvbs: exact-diagonalization lab for anisotropic product-vacuum spin models"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  double tol = 0.0;
  std::uint64_t seed = 0;
  int threads = 0;
  int max_basis = 0;
  std::vector<double> lambda;
  double delta = 0.0;

  std::vector<int> box, centered, probe_N, cross, n_values;
  std::vector<int> window_origin, window_size, l_values, L_values;
  int diamond_L = 0;
  std::string site_file;
  std::string gap_mode;
  int max_sector = 0;
  bool dump_operator = false;
  std::vector<double> z;
  int trials = 0;
  std::string family;
  int n_max = 0;
  double scenario_tol = 0.0;

  auto add_common = [&](CLI::App* s) {
    s->add_option("--config", config_path,
                  "job json to start from; other flags override its fields");
    s->add_option("--out", out_dir, "output directory (default .)");
    s->add_option("--seed", seed, "rng seed");
    s->add_option("--tol", tol, "solver tolerance");
    s->add_option("--threads", threads, "eigen thread count (0 = default)");
    s->add_option("--max-basis", max_basis, "krylov basis size per cycle");
    s->add_option("--lambda", lambda, "per-direction lambda, comma separated")
        ->delimiter(',');
    s->add_option("--delta", delta, "bond anisotropy (> -1)");
  };
  auto add_region = [&](CLI::App* s) {
    s->add_option("--box", box, "box [0,N1]x...x[0,Nd]")->delimiter(',');
    s->add_option("--centered-box", centered, "box [-N1,N1]x...x[-Nd,Nd]")
        ->delimiter(',');
    s->add_option("--diamond", diamond_L, "diamond D_L (L even)");
    s->add_option("--site-file", site_file, "site list file, one site per line");
  };

  CLI::App* c_lattice = app.add_subcommand("lattice", "build a region and dump its sites");
  add_common(c_lattice);
  add_region(c_lattice);

  CLI::App* c_gap = app.add_subcommand("gap", "spectral gap above the ground space");
  add_common(c_gap);
  add_region(c_gap);
  c_gap->add_option("--mode", gap_mode, "full | sectors");
  c_gap->add_option("--max-sector", max_sector, "largest particle number in sectors mode");
  c_gap->add_flag("--dump-operator", dump_operator, "write the Hamiltonian triplets");

  CLI::App* c_bounds = app.add_subcommand("bounds", "closed-form gap bounds for the parameters");
  add_common(c_bounds);

  CLI::App* c_probe = app.add_subcommand("probe", "rectangle probe Rayleigh quotient");
  add_common(c_probe);
  c_probe->add_option("--N", probe_N, "centered box half-widths")->delimiter(',');
  c_probe->add_option("--z", z, "probe weights z_k")->delimiter(',');

  CLI::App* c_cond3 = app.add_subcommand("condition3", "slab overlap bound for growing columns");
  add_common(c_cond3);
  c_cond3->add_option("--cross", cross, "cross-section extents (d-1 entries)")->delimiter(',');
  c_cond3->add_option("--n", n_values, "column heights to scan")->delimiter(',');

  CLI::App* c_ltqo = app.add_subcommand("ltqo", "indistinguishability of the ground states");
  add_common(c_ltqo);
  add_region(c_ltqo);
  c_ltqo->add_option("--window-origin", window_origin, "observable support corner")->delimiter(',');
  c_ltqo->add_option("--window-size", window_size, "observable support extents")->delimiter(',');
  c_ltqo->add_option("--l", l_values, "fattening radii")->delimiter(',');
  c_ltqo->add_option("--trials", trials, "random observables per radius");

  CLI::App* c_scen = app.add_subcommand("scenario", "C(Lambda_n) behaviour along a family");
  add_common(c_scen);
  c_scen->add_option("--family", family, "quadrant | centered | diamonds");
  c_scen->add_option("--n-max", n_max, "largest family index");
  c_scen->add_option("--scenario-tol", scenario_tol, "classification tolerance");
  c_scen->add_option("--window-origin", window_origin, "weight window corner")->delimiter(',');
  c_scen->add_option("--window-size", window_size, "weight window extents")->delimiter(',');

  CLI::App* c_scal = app.add_subcommand("scaling", "diamond probe energy vs L");
  add_common(c_scal);
  c_scal->add_option("--L", L_values, "diamond sizes (even, L/2 odd)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    JobConfig cfg;
    if (!config_path.empty()) cfg = pvbs::cli::load_config(config_path);
    CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();

    auto given = [&](const char* name) { return sub->count(name) > 0; };
    if (given("--out")) cfg.out = out_dir;
    if (given("--seed")) cfg.solver.seed = seed;
    if (given("--tol")) cfg.solver.tol = tol;
    if (given("--threads")) cfg.solver.threads = threads;
    if (given("--max-basis")) cfg.solver.max_basis = max_basis;
    if (given("--lambda")) cfg.lambda = lambda;
    if (given("--delta")) cfg.delta = delta;

    auto opt = [&](const char* name) {
      return sub->get_option_no_throw(name) && sub->count(name) > 0;
    };
    if (opt("--box")) {
      cfg.region.kind = "box";
      cfg.region.N = box;
    } else if (opt("--centered-box")) {
      cfg.region.kind = "centered_box";
      cfg.region.N = centered;
    } else if (opt("--diamond")) {
      cfg.region.kind = "diamond";
      cfg.region.L = diamond_L;
    } else if (opt("--site-file")) {
      cfg.region.kind = "file";
      cfg.region.path = site_file;
    }

    if (opt("--mode")) cfg.gap_mode = gap_mode;
    if (opt("--max-sector")) cfg.max_sector = max_sector;
    if (opt("--dump-operator")) cfg.dump_operator = dump_operator;
    if (opt("--N")) {
      cfg.region.kind = "centered_box";
      cfg.region.N = probe_N;
    }
    if (opt("--z")) cfg.z = z;
    if (opt("--cross")) cfg.cross = cross;
    if (opt("--n")) cfg.n_values = n_values;
    if (opt("--window-origin")) cfg.window_origin = window_origin;
    if (opt("--window-size")) cfg.window_size = window_size;
    if (opt("--l")) cfg.l_values = l_values;
    if (opt("--trials")) cfg.trials = trials;
    if (opt("--family")) cfg.family = family;
    if (opt("--n-max")) cfg.n_max = n_max;
    if (opt("--scenario-tol")) cfg.scenario_tol = scenario_tol;
    if (opt("--L")) cfg.L_values = L_values;

    nlohmann::json rep = pvbs::cli::run(cfg);
    std::cout << rep.dump(2) << '\n';
    return 0;
  } catch (const pvbs::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  } catch (const pvbs::ConvergenceError& e) {
    std::fprintf(stderr, "convergence error: %s\n", e.what());
    return 3;
  } catch (const pvbs::ConsistencyError& e) {
    std::fprintf(stderr, "consistency error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
