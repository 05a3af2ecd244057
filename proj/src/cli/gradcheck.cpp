#include "s2cn/cli/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "s2cn/numkit/linalg.hpp"
#include "s2cn/numkit/rng.hpp"
#include "s2cn/trainer/objective.hpp"

namespace s2cn {

namespace {

struct Component {
  std::string name;
  LossWeights weights;
  Regularizer regularizer;
  CrossEntropyForm form;
};

std::vector<Component> components() {
  return {
      {"L0", {1, 0, 0, 0, 0}, Regularizer::l1, CrossEntropyForm::softplus},
      {"L1-l1", {0, 1, 0, 0, 0}, Regularizer::l1, CrossEntropyForm::softplus},
      {"L1-l2", {0, 1, 0, 0, 0}, Regularizer::l2, CrossEntropyForm::softplus},
      {"L2", {0, 0, 1, 0, 0}, Regularizer::l1, CrossEntropyForm::softplus},
      {"L3", {0, 0, 0, 1, 0}, Regularizer::l1, CrossEntropyForm::softplus},
      {"L4", {0, 0, 0, 0, 1}, Regularizer::l1, CrossEntropyForm::softplus},
      {"L4-loglik", {0, 0, 0, 0, 1}, Regularizer::l1, CrossEntropyForm::log_likelihood},
      {"L", {1, 0.5, 2, 0.7, 1.3}, Regularizer::l1, CrossEntropyForm::softplus},
  };
}

struct Toy {
  Model model;
  TrainData data;
  Supervision sup;
};

void jitter(Tensor& t, RngStream& rng, double amount) {
  for (double& v : t.values()) v += rng.uniform(-amount, amount);
}

Toy make_toy(const GradcheckOptions& opt) {
  if (opt.scale < 1) throw std::invalid_argument("gradcheck scale must be at least 1");
  RngStream rng(opt.seed);
  const std::size_t side = 4 + 4 * opt.scale;
  const std::size_t samples = 4 + 2 * opt.scale;
  const std::size_t clusters = opt.scale >= 3 ? 3 : 2;

  NetworkSpec spec;
  spec.height = side;
  spec.width = side;
  spec.encoder = {{3, 3, 3}, {3, 3, 4}};
  if (opt.scale >= 2) spec.encoder.push_back({3, 3, 5});

  Toy toy;
  toy.data.name = "gradcheck";
  toy.data.clusters = clusters;
  toy.data.images = Tensor({samples, side, side});
  for (double& v : toy.data.images.values()) v = rng.uniform();

  Model& m = toy.model;
  m.encoder = make_encoder(spec, rng);
  m.decoder = make_decoder(spec, rng);
  for (ConvLayer& l : m.encoder.layers) jitter(l.biases, rng, 0.1);
  for (ConvLayer& l : m.decoder.layers) jitter(l.biases, rng, 0.1);

  // Entries bounded away from zero keep the l1 terms differentiable.
  m.coefficients = Tensor({samples, samples});
  for (std::size_t i = 0; i < samples; ++i) {
    for (std::size_t j = 0; j < samples; ++j) {
      if (i == j) continue;
      const double mag = rng.uniform(0.05, 0.3);
      m.coefficients(i, j) = rng.uniform() < 0.5 ? -mag : mag;
    }
  }

  const std::size_t p = feature_dim(spec);
  m.head = make_head(p, samples, clusters, rng);
  jitter(m.head.b1, rng, 0.1);
  jitter(m.head.b2, rng, 0.1);
  jitter(m.head.b3, rng, 0.1);

  for (std::size_t j = 0; j < samples; ++j) toy.sup.labels.push_back(static_cast<Label>(j % clusters) + 1);
  toy.sup.q = labels_to_q(toy.sup.labels, clusters).q;

  const Tensor z = encode(toy.data.images, m.encoder).z;
  Tensor centers = update_centers(fc_forward(z, m.head).y, toy.sup.labels, Tensor({clusters, clusters}));
  jitter(centers, rng, 0.05);
  m.head.centers = centers;
  return toy;
}

}  // namespace

std::vector<std::string> gradcheck_components() {
  std::vector<std::string> names;
  for (const Component& c : components()) names.push_back(c.name);
  return names;
}

std::vector<ComponentCheck> run_gradcheck(const GradcheckOptions& options) {
  const std::vector<Component> comps = components();
  if (!options.corrupt.empty() &&
      std::none_of(comps.begin(), comps.end(), [&](const Component& c) { return c.name == options.corrupt; })) {
    throw std::invalid_argument("unknown gradcheck component '" + options.corrupt + "'");
  }

  Toy toy = make_toy(options);
  std::vector<ComponentCheck> out;
  for (const Component& comp : comps) {
    ObjectiveOptions opts;
    opts.weights = comp.weights;
    opts.regularizer = comp.regularizer;
    opts.cross_entropy = comp.form;
    opts.refresh_centers = false;

    Evaluation ev = evaluate_objective(toy.model, toy.data, toy.sup, opts);
    if (comp.name == options.corrupt) {
      for (Tensor& g : ev.grads) scale(g, 1.01);
      ev.grads.front()[0] += 1e-2;
    }

    ObjectiveOptions value_opts = opts;
    value_opts.compute_gradient = false;
    std::vector<ParamRef> refs = model_parameters(toy.model, ev.grads);

    const double floor = 1e-6 * std::max(1.0, std::abs(ev.parts.total));
    ComponentCheck check;
    check.component = comp.name;
    for (const ParamRef& ref : refs) {
      Tensor& value = *ref.value;
      const bool is_c = ref.name == "self_expression.C";
      for (std::size_t k = 0; k < value.size(); ++k) {
        if (is_c && k / value.cols() == k % value.cols()) continue;
        const double orig = value[k];
        value[k] = orig + options.step;
        const double up = evaluate_objective(toy.model, toy.data, toy.sup, value_opts).parts.total;
        value[k] = orig - options.step;
        const double down = evaluate_objective(toy.model, toy.data, toy.sup, value_opts).parts.total;
        value[k] = orig;
        const double fd = (up - down) / (2.0 * options.step);
        const double an = (*ref.grad)[k];
        const double rel = std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), floor});
        ++check.entries;
        if (rel > check.max_relative_error || !std::isfinite(rel)) {
          check.max_relative_error = std::isfinite(rel) ? rel : INFINITY;
          check.worst_parameter = ref.name + "[" + std::to_string(k) + "]";
        }
      }
    }
    check.pass = check.max_relative_error <= options.tolerance;
    out.push_back(std::move(check));
  }
  return out;
}

}  // namespace s2cn
