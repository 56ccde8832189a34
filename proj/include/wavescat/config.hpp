#pragma once

#include <iosfwd>
#include <string>

#include "wavescat/driver.hpp"

namespace wavescat {

// Fully resolved run configuration; echoed into every artifact.
struct RunConfig {
  std::string case_name = "1d_bump";  // 1d_bump | 2d_bump | 2d_point | 2d_trap
  double omega = 10.0 * M_PI;
  std::vector<double> h_list;  // empty selects the case default for omega
  SolverParams params;
  bool uniform_baseline = false;
  bool with_reference = true;
  std::string out_dir = "out";
  int threads = 1;
  uint64_t seed = 0;
};

// "10pi" or a numeric literal
double parse_omega(const std::string& s);
// "1/5,1/50" (fractions or literals)
std::vector<double> parse_levels(const std::string& s);

// default mesh levels for the named case at the given frequency; throws when
// no default is known (pass --levels explicitly then)
std::vector<double> default_levels(const std::string& case_name, double omega);

// applies case defaults and constructs the solver setup
CaseSetup build_setup(const RunConfig& cfg);

// flat key=value text with [section] headers per module
RunConfig read_config_file(const std::string& path);
void echo_config(std::ostream& os, const RunConfig& cfg);

}  // namespace wavescat
