#include "s2cn/trainer/hyper_params.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "s2cn/evalkit/metrics.hpp"

namespace s2cn {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string canonical_name(std::string_view name) {
  const std::string l = lower(name);
  if (l == "extendedyaleb" || l == "eyaleb" || l == "yaleb") return "ExtendedYaleB";
  if (l == "orl") return "ORL";
  if (l == "coil20") return "COIL20";
  if (l == "coil100") return "COIL100";
  if (l == "synthetic") return "synthetic";
  std::string known;
  for (const std::string& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'; available presets: " + known);
}

}  // namespace

std::string to_string(LossConfig config) {
  switch (config) {
    case LossConfig::base: return "base";
    case LossConfig::with_l3: return "+L3";
    case LossConfig::with_l4: return "+L4";
    case LossConfig::dual: return "dual";
  }
  return "?";
}

LossConfig parse_loss_config(std::string_view text) {
  const std::string l = lower(text);
  if (l == "base") return LossConfig::base;
  if (l == "l3" || l == "+l3") return LossConfig::with_l3;
  if (l == "l4" || l == "+l4") return LossConfig::with_l4;
  if (l == "dual" || l == "+l3+l4") return LossConfig::dual;
  throw std::invalid_argument("unknown loss config '" + std::string(text) + "' (expected base, +L3, +L4, dual)");
}

std::string to_string(Regularizer kind) { return kind == Regularizer::l1 ? "l1" : "l2"; }

Regularizer parse_regularizer(std::string_view text) {
  const std::string l = lower(text);
  if (l == "l1") return Regularizer::l1;
  if (l == "l2") return Regularizer::l2;
  throw std::invalid_argument("unknown regularizer '" + std::string(text) + "' (expected l1 or l2)");
}

void HyperParams::validate() const {
  const double gammas[] = {gamma1, gamma2, gamma3, gamma4};
  for (double g : gammas) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument("tradeoff parameters must be finite and >= 0");
  }
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in [0, 1]");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning rate must be finite and >= 0");
  }
  if (t0 < 1) throw std::invalid_argument("T0 must be at least 1");
  if (t_max < 1) throw std::invalid_argument("T_max must be at least 1");
}

std::uint64_t HyperParams::hash() const {
  std::ostringstream os;
  os << format_number(gamma1) << '|' << format_number(gamma2) << '|' << format_number(gamma3) << '|'
     << format_number(gamma4) << '|' << format_number(tau) << '|' << format_number(learning_rate) << '|' << t0
     << '|' << t_max << '|' << to_string(regularizer) << '|' << static_cast<int>(cross_entropy) << '|'
     << align_labels << '|' << seed << '|' << cae_epochs << '|' << dsc_epochs;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

HyperParams with_loss_config(HyperParams hyper, LossConfig config) {
  if (config == LossConfig::base || config == LossConfig::with_l4) hyper.gamma3 = 0.0;
  if (config == LossConfig::base || config == LossConfig::with_l3) hyper.gamma4 = 0.0;
  return hyper;
}

std::vector<std::string> preset_names() { return {"ExtendedYaleB", "ORL", "COIL20", "COIL100", "synthetic"}; }

HyperParams preset(std::string_view name, std::size_t clusters) {
  const std::string canon = canonical_name(name);
  HyperParams h;
  h.learning_rate = 1e-3;
  if (canon == "ExtendedYaleB") {
    h.gamma1 = 1.0;
    h.gamma2 = std::pow(10.0, static_cast<double>(clusters) / 10.0 - 3.0);
    h.gamma3 = 16.0;
    h.gamma4 = 72.0;
    h.t0 = 5;
    h.t_max = 10 + 40 * clusters;
  } else if (canon == "ORL") {
    h.gamma1 = 0.1;
    h.gamma2 = 0.01;
    h.gamma3 = 8.0;
    h.gamma4 = 1.2;
    h.t0 = 5;
    h.t_max = 940;
  } else if (canon == "COIL20") {
    h.gamma1 = 1.0;
    h.gamma2 = 30.0;
    h.gamma3 = 8.0;
    h.gamma4 = 6.0;
    h.t0 = 4;
    h.t_max = 80;
  } else if (canon == "COIL100") {
    h.gamma1 = 1.0;
    h.gamma2 = 30.0;
    h.gamma3 = 8.0;
    h.gamma4 = 7.0;
    h.t0 = 16;
    h.t_max = 110;
  } else {
    // Desk-scale pseudo-image and raw-feature experiments.
    h.gamma1 = 1.0;
    h.gamma2 = 20.0;
    h.gamma3 = 1.0;
    h.gamma4 = 1.0;
    h.t0 = 5;
    h.t_max = 40;
    h.cae_epochs = 300;
    h.dsc_epochs = 1000;
  }
  return h;
}

NetworkSpec preset_network(std::string_view name, std::size_t height, std::size_t width) {
  const std::string canon = canonical_name(name);
  NetworkSpec spec;
  auto fixed = [&](std::size_t h, std::size_t w) {
    if (height != h || width != w) {
      throw std::invalid_argument("preset " + canon + " expects " + std::to_string(h) + "x" + std::to_string(w) +
                                  " images, got " + std::to_string(height) + "x" + std::to_string(width));
    }
    spec.height = h;
    spec.width = w;
  };
  if (canon == "ExtendedYaleB") {
    fixed(48, 42);
    spec.encoder = {{5, 5, 10}, {3, 3, 20}, {3, 3, 30}};
  } else if (canon == "ORL") {
    fixed(32, 32);
    spec.encoder = {{3, 3, 3}, {3, 3, 3}, {3, 3, 5}};
  } else if (canon == "COIL20") {
    fixed(32, 32);
    spec.encoder = {{3, 3, 15}};
  } else if (canon == "COIL100") {
    fixed(32, 32);
    spec.encoder = {{5, 5, 50}};
  } else {
    if (height == 0 || width == 0) throw std::invalid_argument("synthetic preset needs image extents");
    spec.height = height;
    spec.width = width;
    spec.encoder = {{3, 3, 10}};
  }
  return spec;
}

}  // namespace s2cn
