#ifndef GENVAL_TOOLS_CLI_HPP
#define GENVAL_TOOLS_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace genval::cli {

/// Every knob of every subcommand. Defaults here are the documented defaults;
/// a JSON config file (--config) overrides them and command-line flags win.
struct RunConfig {
  // matching / valuation
  long k = 10;
  double temperature = 1.0;
  std::string mode = "exact";
  int threads = 1;
  long n = 0;  // training count when only match tables are given
  bool inline_match = false;

  // product quantizer
  long num_subspaces = 8;
  long codebook_size = 256;
  int kmeans_iters = 25;

  std::uint64_t seed = 42;
  double alpha = 0.01;
  int p = 1;

  // synthetic experiment
  long dim = 64;
  long n_per_split = 500;
  long components = 4;
  double spread = 8.0;
  double noise_sigma = 0.3;
  long m_generated = 500;

  // paths
  std::string train, generated, index, matches, values, values_a, values_b, partition;
  std::string approx, exact, source, target;
  std::string out, summary, out_dir;
  bool csv_header = false;
};

enum ExitCode : int { kOk = 0, kUsage = 2, kInternal = 3 };

/// Runs one invocation. argv[0] is the program name. Data goes to `out`
/// (unless --out redirects it), diagnostics to `err`; `in` backs "-" inputs.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace genval::cli

#endif  // GENVAL_TOOLS_CLI_HPP
