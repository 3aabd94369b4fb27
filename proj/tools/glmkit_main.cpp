#include <CLI11.hpp>

#include "glmkit/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"skip n-gram language models with modified Kneser-Ney smoothing"};
  app.require_subcommand(1);

  glmkit::RunConfig config;

  auto add_threads = [&](CLI::App* cmd) {
    cmd->add_option("--threads", config.threads, "worker thread cap")
        ->envname("GLMKIT_THREADS")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* split = app.add_subcommand(
      "split", "tokenize raw text and split it into train/test material");
  split->add_option("--input", config.inputs, "raw UTF-8 text files")
      ->required()
      ->check(CLI::ExistingFile);
  split->add_option("--out", config.out_dir, "output directory")->required();
  split->add_option("--train-fraction", config.train_fraction,
                    "per-sentence probability of landing in train");
  split->add_option("--seed", config.seed, "randomness seed");
  split->add_option("--test-length", config.test_length,
                    "sampled sequence length")
      ->check(CLI::Range(1, 5));
  split->add_option("--test-count", config.test_count,
                    "number of sampled test sequences (0 disables)");

  CLI::App* train = app.add_subcommand(
      "train", "build and persist the count store for one order");
  train->add_option("--train", config.train_file, "tokenized training file")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--order", config.order, "model order n")
      ->check(CLI::Range(1, 5));
  train->add_option("--mode", config.modes,
                    "recorded only; the store always carries the full "
                    "skip-pattern table set")
      ->check(CLI::IsMember({"mkn", "glm", "both"}));
  train->add_option("--seed", config.seed, "pipeline seed recorded in the store");
  train->add_option("--out", config.out_dir, "store directory")->required();
  add_threads(train);

  CLI::App* eval = app.add_subcommand(
      "eval", "score test sequences against a trained store");
  eval->add_option("--store", config.store_dir, "store directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  eval->add_option("--test", config.test_file, "test sequence file")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--mode", config.modes, "mkn, glm, or both")
      ->check(CLI::IsMember({"mkn", "glm", "both"}));
  eval->add_option("--eval-mode", config.eval_mode, "last-word or chain")
      ->check(CLI::IsMember({"last-word", "chain"}));
  eval->add_flag("--split-seen", config.split_seen,
                 "also score observed/unseen partitions");
  eval->add_option("--out", config.out_dir, "report directory")->required();
  add_threads(eval);

  CLI::App* stats = app.add_subcommand(
      "stats", "singleton percentages per skip pattern");
  stats->add_option("--store", config.store_dir, "store directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  stats->add_option("--out", config.out_dir, "optional report directory");

  CLI::App* ablate = app.add_subcommand(
      "ablate", "shrink the training fraction and compare modes per order");
  ablate->add_option("--input", config.inputs, "raw UTF-8 text files")
      ->required()
      ->check(CLI::ExistingFile);
  ablate->add_option("--fractions", config.fractions, "training fractions");
  ablate->add_option("--orders", config.orders, "model orders")
      ->check(CLI::Range(1, 5));
  ablate->add_option("--modes", config.modes, "mkn, glm, or both")
      ->check(CLI::IsMember({"mkn", "glm", "both"}));
  ablate->add_option("--seed", config.seed, "randomness seed");
  ablate->add_option("--test-length", config.test_length,
                     "sampled sequence length")
      ->check(CLI::Range(1, 5));
  ablate->add_option("--test-count", config.test_count,
                     "test sequences sampled per fraction");
  ablate->add_option("--eval-mode", config.eval_mode, "last-word or chain")
      ->check(CLI::IsMember({"last-word", "chain"}));
  ablate->add_option("--out", config.out_dir, "output directory")->required();
  add_threads(ablate);

  CLI11_PARSE(app, argc, argv);

  config.command = app.get_subcommands().front()->get_name();
  return glmkit::run_command(config);
}
