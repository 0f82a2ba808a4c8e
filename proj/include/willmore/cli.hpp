#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace willmore {

enum class ExitCode { Success = 0, NumericalFailure = 1, UsageError = 2 };

struct RunConfig {
  std::string command;
  double b = 1.0;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> a;  // pinned target for minimize
  double a_max = 0.02;
  int K = 0;  // 0 selects the per-command default
  int n = 0;
  std::vector<double> a_grid;
  double tol = 1e-6;
  double kernel_tol = 1e-4;
  double constraint_tol = 1e-6;
  double stationarity_tol = 1e-5;
  double concavity_budget = 1e-3;
  int max_iterations = 500;
  std::string surface = "homogeneous";
  std::string path = "auto";
  std::string init;
  std::string out;
  std::string format = "csv";
  int threads = 1;
  bool warm_start = true;
  std::vector<int> only;

  // Fills per-command defaults and checks ranges; throws UsageError.
  void finalize();
};

// "start:stop:count" (inclusive, evenly spaced) or a comma-separated list.
std::vector<double> parse_range(const std::string& text);

// Applies keys of a JSON config file (flag names without the leading
// dashes); unknown keys are rejected and keys in skip are left untouched.
void apply_config_file(RunConfig& cfg, const std::string& path,
                       const std::set<std::string>& skip = {});

int cmd_threshold(const RunConfig& cfg, std::ostream& out);
int cmd_energy(const RunConfig& cfg, std::ostream& out);
int cmd_spectrum(const RunConfig& cfg, std::ostream& out);
int cmd_minimize(const RunConfig& cfg, std::ostream& out);
int cmd_omega_table(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& log);

// Entry point used by the executable; output goes to --out or to out.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace willmore
