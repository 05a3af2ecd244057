#include "s2cn/trainer/trainer.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "s2cn/convae/autoencoder.hpp"
#include "s2cn/evalkit/metrics.hpp"
#include "s2cn/selfexpr/self_expression.hpp"
#include "s2cn/spectral/spectral.hpp"

namespace s2cn {

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::cae: return "cae";
    case Stage::dsc: return "dsc";
    case Stage::full: return "full";
  }
  return "?";
}

TrainData make_train_data(const ImageDataset& ds, bool use_features) {
  validate_dataset(ds);
  TrainData data;
  data.name = ds.name;
  data.truth = ds.labels;
  data.clusters = ds.clusters;
  if (use_features) {
    if (ds.features.empty()) throw std::invalid_argument("dataset " + ds.name + " has no feature tensor");
    data.features = ds.features;
  } else {
    if (ds.images.empty()) throw std::invalid_argument("dataset " + ds.name + " has no images");
    data.images = ds.images;
  }
  return data;
}

PseudoLabelState cluster_coefficients(const Tensor& coefficients, std::size_t clusters, RngStream& rng) {
  return spectral_cluster(affinity(coefficients), clusters, rng);
}

namespace {

std::uint64_t label_hash(const std::vector<Label>& labels) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Label l : labels) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(l));
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool finite_parts(const LossBreakdown& p) {
  return std::isfinite(p.l0) && std::isfinite(p.l1) && std::isfinite(p.l2) && std::isfinite(p.l3) &&
         std::isfinite(p.l4) && std::isfinite(p.total);
}

class Run {
 public:
  Run(const TrainData& data, const HyperParams& hyper, const TrainOptions& options)
      : data_(data), hyper_(hyper), options_(options) {
    adam_.learning_rate = hyper.learning_rate;
  }

  TrainResult result;

  [[noreturn]] void abort(const std::string& what) { throw TrainingAborted(what, result); }

  std::optional<double> error_of(const std::vector<Label>& labels) const {
    if (data_.truth.empty()) return std::nullopt;
    return clustering_error(labels, data_.truth, data_.clusters);
  }

  void ensure_coefficients() {
    const std::size_t n = data_.size();
    Tensor& c = result.model.coefficients;
    if (c.rank() == 2 && c.rows() == n && c.cols() == n) return;
    RngStream rng(derive_seed(hyper_.seed, "coefficients"));
    c = init_coefficients(n, rng);
  }

  void pretrain() {
    CaeConfig cfg;
    cfg.epochs = hyper_.cae_epochs;
    cfg.adam = adam_;
    std::vector<double> losses;
    try {
      losses = pretrain_cae(data_.images, result.model.encoder, result.model.decoder, cfg);
    } catch (const DivergenceError& e) {
      push_cae_rows(e.history());
      abort(std::string("pretraining diverged: ") + e.what());
    }
    losses.pop_back();
    push_cae_rows(losses);
  }

  void push_cae_rows(const std::vector<double>& losses) {
    for (double l0 : losses) {
      HistoryRow row;
      row.stage = Stage::cae;
      row.loss.l0 = l0;
      row.loss.total = l0;
      row.loss.epoch = ++epoch_;
      result.history.rows.push_back(row);
    }
  }

  void step(Stage stage, const Supervision& sup, const ObjectiveOptions& opts, OptimState& opt) {
    Model& m = result.model;
    Evaluation ev = evaluate_objective(m, data_, sup, opts);
    HistoryRow row;
    row.stage = stage;
    row.loss = ev.parts;
    row.loss.epoch = ++epoch_;
    result.history.rows.push_back(row);
    if (!finite_parts(ev.parts)) abort("objective became non-finite at epoch " + std::to_string(epoch_));
    if (!ev.centers.empty()) m.head.centers = ev.centers;
    try {
      adam_step(model_parameters(m, ev.grads, opts.groups), opt);
    } catch (const NumericError& e) {
      abort("epoch " + std::to_string(epoch_) + ": " + e.what());
    }
    project_diag_zero(m.coefficients);
  }

  void self_expressive() {
    ensure_coefficients();
    OptimState opt(adam_);
    ObjectiveOptions opts;
    opts.weights = {1.0, hyper_.gamma1, hyper_.gamma2, 0.0, 0.0};
    opts.regularizer = hyper_.regularizer;
    opts.groups.head = false;
    for (std::size_t e = 0; e < hyper_.dsc_epochs; ++e) step(Stage::dsc, {}, opts, opt);
  }

  void self_supervised() {
    ensure_coefficients();
    Model& m = result.model;
    const std::size_t n = data_.size();
    const std::size_t k = data_.clusters;
    const std::size_t p =
        m.has_conv() ? feature_dim(spec_from_stacks(m.encoder, m.decoder)) : data_.features.rows();
    if (!m.has_head() || m.head.input_dim() != p || m.head.classes() != k || m.head.w1.rows() != n / 2) {
      RngStream rng(derive_seed(hyper_.seed, "head"));
      m.head = make_head(p, n, k, rng);
    }

    RngStream srng(derive_seed(hyper_.seed, "spectral"));
    PseudoLabelState current = cluster_coefficients(m.coefficients, k, srng);
    current.epoch = epoch_;
    {
      SpectralUpdate first;
      first.epoch = epoch_;
      first.labels = current.labels;
      first.alignment = align_labels(current, current).record;
      first.error_percent = error_of(current.labels);
      result.history.updates.push_back(std::move(first));
    }

    OptimState opt(adam_);
    ObjectiveOptions opts;
    opts.weights = training_weights(hyper_);
    opts.regularizer = hyper_.regularizer;
    opts.tau = hyper_.tau;
    opts.cross_entropy = hyper_.cross_entropy;

    for (std::size_t t = 1; t <= hyper_.t_max; ++t) {
      Supervision sup{labels_to_q(current.labels, k).q, current.labels};
      const std::uint64_t fixed = label_hash(current.labels);
      for (std::size_t e = 0; e < hyper_.t0; ++e) {
        step(Stage::full, sup, opts, opt);
        if (label_hash(current.labels) != fixed) throw std::logic_error("pseudo-labels changed inside a block");
      }

      PseudoLabelState next = cluster_coefficients(m.coefficients, k, srng);
      SpectralUpdate upd;
      upd.iteration = t;
      upd.epoch = epoch_;
      if (hyper_.align_labels) {
        AlignedLabels aligned = align_labels(current, next);
        current = std::move(aligned.state);
        upd.alignment = std::move(aligned.record);
      } else {
        upd.alignment.permutation.resize(k);
        std::iota(upd.alignment.permutation.begin(), upd.alignment.permutation.end(), 1);
        upd.alignment.overlap = overlap_counts(next.labels, current.labels, k);
        for (std::size_t j = 0; j < n; ++j) upd.alignment.agreement += next.labels[j] == current.labels[j];
        current = std::move(next);
      }
      current.epoch = epoch_;
      upd.labels = current.labels;
      upd.error_percent = error_of(current.labels);
      result.history.rows.back().error_percent = upd.error_percent;
      result.history.updates.push_back(std::move(upd));
    }
    result.labels = current;
  }

  std::size_t epoch_ = 0;

 private:
  const TrainData& data_;
  const HyperParams& hyper_;
  const TrainOptions& options_;
  AdamSettings adam_;
};

}  // namespace

TrainResult train(const TrainData& data, const HyperParams& hyper, const TrainOptions& options,
                  std::optional<Model> initial) {
  hyper.validate();
  const std::size_t n = data.size();
  if (data.clusters < 2 || data.clusters > n) {
    throw std::invalid_argument("cluster count " + std::to_string(data.clusters) + " must lie in [2, " +
                                std::to_string(n) + "]");
  }
  if (!data.truth.empty() && data.truth.size() != n) throw std::invalid_argument("ground truth length mismatch");

  Run run(data, hyper, options);
  Model& m = run.result.model;
  if (initial) m = std::move(*initial);

  if (options.use_features) {
    if (data.features.empty()) throw std::invalid_argument("feature training requested but no features given");
    m.encoder.layers.clear();
    m.decoder.layers.clear();
  } else {
    if (data.images.empty()) throw std::invalid_argument("training data has no images");
    if (!m.has_conv()) {
      if (!options.stages.cae) {
        throw std::invalid_argument("a convolutional run that skips pretraining needs a pretrained model");
      }
      RngStream enc_rng(derive_seed(hyper.seed, "encoder"));
      RngStream dec_rng(derive_seed(hyper.seed, "decoder"));
      m.encoder = make_encoder(options.network, enc_rng);
      m.decoder = make_decoder(options.network, dec_rng);
    }
    const NetworkSpec spec = spec_from_stacks(m.encoder, m.decoder);
    if (spec.height != data.images.extent(1) || spec.width != data.images.extent(2)) {
      throw std::invalid_argument("model expects " + std::to_string(spec.height) + "x" +
                                  std::to_string(spec.width) + " images");
    }
    if (options.stages.cae && hyper.cae_epochs > 0) run.pretrain();
  }
  if (options.stages.dsc && hyper.dsc_epochs > 0) run.self_expressive();
  if (options.stages.full) {
    run.self_supervised();
  } else if (!m.coefficients.empty() && m.coefficients.rows() == n) {
    RngStream srng(derive_seed(hyper.seed, "spectral"));
    run.result.labels = cluster_coefficients(m.coefficients, data.clusters, srng);
    run.result.labels.epoch = run.epoch_;
    SpectralUpdate upd;
    upd.epoch = run.epoch_;
    upd.labels = run.result.labels.labels;
    upd.alignment = align_labels(run.result.labels, run.result.labels).record;
    upd.error_percent = run.error_of(upd.labels);
    run.result.history.updates.push_back(std::move(upd));
  }
  return std::move(run.result);
}

}  // namespace s2cn
