#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "s2cn/evalkit/metrics.hpp"
#include "s2cn/trainer/trainer.hpp"

namespace s2cn {

struct AblationPlan {
  std::vector<LossConfig> configs{LossConfig::base, LossConfig::with_l3, LossConfig::with_l4, LossConfig::dual};
  std::vector<std::uint64_t> seeds{0};
  HyperParams hyper;  // seed is overwritten per run
  TrainOptions options;
};

/// For each seed the convolutional stacks are pretrained once and every
/// configuration continues from that shared starting point, so runs with the
/// same seed form a paired comparison. Requires ground truth.
std::vector<EvalReport> run_ablation(const TrainData& data, const AblationPlan& plan,
                                     const std::optional<Model>& initial = std::nullopt);

}  // namespace s2cn
