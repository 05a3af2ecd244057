#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "s2cn/classifier/alignment.hpp"
#include "s2cn/data/dataset.hpp"
#include "s2cn/numkit/errors.hpp"
#include "s2cn/trainer/hyper_params.hpp"
#include "s2cn/trainer/model.hpp"
#include "s2cn/trainer/objective.hpp"

namespace s2cn {

enum class Stage { cae, dsc, full };

std::string to_string(Stage stage);

struct StageFlags {
  bool cae = true;   // reconstruction-only pretraining
  bool dsc = true;   // reconstruction + self-expression
  bool full = true;  // alternating self-supervised training
};

struct HistoryRow {
  Stage stage = Stage::cae;
  LossBreakdown loss;
  std::optional<double> error_percent;  // set on the last epoch before each label update
};

struct SpectralUpdate {
  std::size_t iteration = 0;  // 1-based index of the label update
  std::size_t epoch = 0;      // global epoch after which it ran
  std::vector<Label> labels;  // after alignment
  AlignmentRecord alignment;
  std::optional<double> error_percent;
};

struct TrainHistory {
  std::vector<HistoryRow> rows;
  std::vector<SpectralUpdate> updates;  // index 0 is the initial clustering
};

struct TrainOptions {
  StageFlags stages;
  NetworkSpec network;  // ignored when training on features
  bool use_features = false;
};

struct TrainResult {
  Model model;
  PseudoLabelState labels;
  TrainHistory history;
};

/// Thrown when the objective or a gradient turns non-finite. Carries the
/// state reached so far.
class TrainingAborted : public NumericError {
 public:
  TrainingAborted(const std::string& what, TrainResult partial)
      : NumericError(what), partial_(std::move(partial)) {}
  const TrainResult& partial() const noexcept { return partial_; }

 private:
  TrainResult partial_;
};

TrainData make_train_data(const ImageDataset& ds, bool use_features);

/// Runs the enabled stages in order. `initial` resumes from a saved model; a
/// convolutional run that skips pretraining must supply one.
TrainResult train(const TrainData& data, const HyperParams& hyper, const TrainOptions& options,
                  std::optional<Model> initial = std::nullopt);

/// Spectral clustering of the current coefficients.
PseudoLabelState cluster_coefficients(const Tensor& coefficients, std::size_t clusters, RngStream& rng);

}  // namespace s2cn
