#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace glmkit {

// Everything a run needs, validated before execution and serialized into
// the run manifest (paths of output directories excluded so reruns with
// the same seed produce byte-identical artifacts).
struct RunConfig {
  std::string command;
  std::vector<std::filesystem::path> inputs;  // raw text (split, ablate)
  std::filesystem::path train_file;           // tokenized sentences (train)
  std::filesystem::path test_file;            // test sequences (eval)
  std::filesystem::path store_dir;            // eval, stats
  std::filesystem::path out_dir;
  int order = 5;
  std::string modes = "both";  // mkn | glm | both
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  int test_length = 5;
  std::uint64_t test_count = 100000;
  std::string eval_mode = "last-word";  // last-word | chain
  bool split_seen = false;
  std::vector<double> fractions{0.8, 0.08, 0.008};
  std::vector<int> orders{3, 4, 5};
  int threads = 1;
};

// Each command is a thin wrapper over the library; results match direct
// library calls byte for byte. Returns a process exit code and prints a
// single-line diagnostic per failure.
int cmd_split(const RunConfig& config);
int cmd_train(const RunConfig& config);
int cmd_eval(const RunConfig& config);
int cmd_stats(const RunConfig& config);
int cmd_ablate(const RunConfig& config);

int run_command(const RunConfig& config);

}  // namespace glmkit
