#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "pvbs/lattice.hpp"
#include "pvbs/model.hpp"

namespace pvbs::cli {

struct RegionSpec {
  std::string kind = "box";  // box | centered_box | diamond | file
  std::vector<int> N;        // box extents
  int L = 0;                 // diamond size
  std::string path;          // site-list file
};

struct SolverSpec {
  double tol = 1e-12;
  std::uint64_t seed = 1;
  int max_basis = 350;
  int threads = 0;  // 0 keeps the library default
};

// One job = one subcommand with everything it needs, serializable so a run
// can be replayed byte for byte from the _config.json it leaves behind.
struct JobConfig {
  std::string command;
  RegionSpec region;
  std::vector<double> lambda;
  double delta = 0.0;
  std::vector<std::vector<double>> multi_lambda;
  SolverSpec solver;
  std::string out = ".";

  // gap
  std::string gap_mode = "full";  // full | sectors
  int max_sector = 3;
  bool dump_operator = false;

  // probe
  std::vector<double> z;

  // condition3
  std::vector<int> cross;
  std::vector<int> n_values;

  // ltqo
  std::vector<int> window_origin;
  std::vector<int> window_size;
  std::vector<int> l_values;
  int trials = 8;

  // scenario
  std::string family = "quadrant";  // quadrant | centered | diamonds
  int n_max = 20;
  double scenario_tol = 1e-9;

  // scaling
  std::vector<int> L_values;
};

void to_json(nlohmann::json& j, const JobConfig& c);
void from_json(const nlohmann::json& j, JobConfig& c);

JobConfig load_config(const std::string& path);

LatticeRegion build_region(const RegionSpec& spec);
ModelParams build_params(const JobConfig& c);

// FNV-1a over the canonical site-list text; identifies file-backed regions
// in reports.
std::uint64_t fnv1a64(const std::string& bytes);
std::string site_list_hash(const LatticeRegion& region);

struct PowerLawFit {
  double exponent = 0.0;
  double r_squared = 0.0;
};

// Least squares on (log x, log y); needs >= 3 strictly positive points.
// A constant series fits exponent 0 with r_squared 1.
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

// Executes the job, writes <command>_config.json, <command>.json and the
// command's CSV artifacts into config.out, and returns the report.
nlohmann::json run(const JobConfig& config);

}  // namespace pvbs::cli
