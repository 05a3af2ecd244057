#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace s2cn {

struct GradcheckOptions {
  std::size_t scale = 1;   // 1: six 8x8 images; larger values grow images, samples, and depth
  std::string corrupt;     // component whose analytic gradient is perturbed (test hook)
  std::uint64_t seed = 7;
  double step = 1e-5;
  double tolerance = 1e-4;
};

struct ComponentCheck {
  std::string component;
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t entries = 0;
  bool pass = false;
};

/// Central finite differences against the analytic gradient of every loss
/// component, over all convolutional, coefficient, and head parameters.
/// Relative error is |a - f| / max(|a|, |f|, 1e-6 * max(1, |L|)) where L is
/// the component's value. Diagonal entries of C
/// are not free parameters and are skipped.
std::vector<ComponentCheck> run_gradcheck(const GradcheckOptions& options = {});

/// Names accepted by GradcheckOptions::corrupt.
std::vector<std::string> gradcheck_components();

}  // namespace s2cn
