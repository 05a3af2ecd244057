#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "s2cn/cli/gradcheck.hpp"
#include "s2cn/data/key_value.hpp"
#include "s2cn/data/synthetic.hpp"
#include "s2cn/trainer/trainer.hpp"

namespace s2cn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUser = 1;
inline constexpr int kExitNumeric = 2;

/// Settings shared by pretrain, train, and ablate. Unset optionals fall back
/// to the preset.
struct RunConfig {
  std::filesystem::path dataset;
  std::optional<std::string> preset;
  std::optional<std::string> loss_config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "out";
  std::optional<std::filesystem::path> checkpoint;
  std::optional<std::size_t> subjects;  // keep the first n classes

  std::optional<double> gamma1, gamma2, gamma3, gamma4;
  std::optional<double> tau, learning_rate;
  std::optional<std::size_t> t0, t_max, cae_epochs, dsc_epochs;
  std::optional<std::string> regularizer;
  std::optional<std::string> cross_entropy;  // softplus | loglik
  std::optional<bool> align;
  std::optional<bool> use_features;
  std::optional<std::string> stages;         // comma list of cae, dsc, full
  std::optional<std::string> seeds;          // ablate: comma list
};

/// Reads the keys of a config file (same names as the long flags, with '-'
/// or '_'). Throws std::invalid_argument on unknown keys or bad values.
RunConfig config_from_key_values(const KeyValues& kv);
/// Every field set in `flags` replaces the one in `base`.
RunConfig overlay(RunConfig base, const RunConfig& flags);

/// Preset defaults to the dataset name when it names one, else "synthetic";
/// the loss configuration defaults to dual.
HyperParams resolve_hyper(const RunConfig& config, const std::string& dataset_name, std::size_t clusters);
std::string resolve_preset(const RunConfig& config, const std::string& dataset_name);
StageFlags parse_stages(const std::string& text);

/// Each returns an exit code: 0 success, 1 user error, 2 numeric failure.
/// Diagnostics go to `err`, results to `out`.
int cmd_pretrain(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_ablate(const RunConfig& config, std::ostream& out, std::ostream& err);

struct EvalArgs {
  std::filesystem::path labels;
  std::filesystem::path truth;
  std::optional<std::size_t> clusters;  // default: largest label present
  std::optional<std::filesystem::path> report;
};
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);

int cmd_gradcheck(const GradcheckOptions& options, std::ostream& out, std::ostream& err);

struct SynthArgs {
  SyntheticSpec spec;
  std::filesystem::path out = "synthetic";
  std::string name = "synthetic";
};
int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err);

int cmd_inspect(const std::filesystem::path& path, std::ostream& out, std::ostream& err);

/// Columns: epoch, stage, L0..L4, L, err_percent, L3_over_L1.
void write_history_csv(std::ostream& os, const TrainHistory& history);
/// Columns: iteration, epoch, permutation, agreement, err_percent.
void write_alignment_csv(std::ostream& os, const TrainHistory& history);

}  // namespace s2cn
