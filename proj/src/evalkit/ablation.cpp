#include "s2cn/evalkit/ablation.hpp"

#include <stdexcept>

namespace s2cn {

std::vector<EvalReport> run_ablation(const TrainData& data, const AblationPlan& plan,
                                     const std::optional<Model>& initial) {
  if (data.truth.empty()) throw std::invalid_argument("ablation needs ground-truth labels");
  if (plan.configs.empty() || plan.seeds.empty()) throw std::invalid_argument("ablation plan is empty");

  std::vector<EvalReport> reports;
  for (std::uint64_t seed : plan.seeds) {
    HyperParams hyper = plan.hyper;
    hyper.seed = seed;

    std::optional<Model> start = initial;
    TrainOptions rest = plan.options;
    // shared by every configuration
    const bool pre_cae = !rest.use_features && rest.stages.cae && hyper.cae_epochs > 0;
    const bool pre_dsc = rest.stages.dsc && hyper.dsc_epochs > 0;
    if (rest.stages.full && (pre_cae || pre_dsc)) {
      TrainOptions pre = plan.options;
      pre.stages = {pre_cae, pre_dsc, false};
      start = train(data, hyper, pre, start).model;
      rest.stages.cae = false;
      rest.stages.dsc = false;
    }

    for (LossConfig config : plan.configs) {
      const HyperParams run_hyper = with_loss_config(hyper, config);
      TrainResult result = train(data, run_hyper, rest, start);
      EvalReport report;
      report.dataset = data.name;
      report.clusters = data.clusters;
      report.loss_config = to_string(config);
      report.seed = seed;
      report.error_percent = clustering_error(result.labels.labels, data.truth, data.clusters);
      report.hyper_hash = run_hyper.hash();
      reports.push_back(std::move(report));
    }
  }
  return reports;
}

}  // namespace s2cn
