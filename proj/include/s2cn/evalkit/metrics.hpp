#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "s2cn/spectral/spectral.hpp"

namespace s2cn {

/// 100 * (1 - accuracy) under the best one-to-one relabeling of `pred`,
/// found with the Hungarian method on the negated confusion matrix.
double clustering_error(std::span<const Label> pred, std::span<const Label> truth, std::size_t clusters);

struct EvalReport {
  std::string dataset;
  std::size_t clusters = 0;
  std::string loss_config;
  std::uint64_t seed = 0;
  double error_percent = 0.0;
  std::uint64_t hyper_hash = 0;
};

struct SummaryRow {
  std::string dataset;
  std::size_t clusters = 0;
  std::string loss_config;
  std::size_t runs = 0;
  double mean = 0.0;
  double median = 0.0;
};

/// Mean and median per (dataset, clusters, loss_config), in first-seen order.
std::vector<SummaryRow> aggregate(std::span<const EvalReport> reports);

double median_of(std::vector<double> values);

void write_report_csv(std::ostream& os, std::span<const EvalReport> reports);
void write_summary_csv(std::ostream& os, std::span<const SummaryRow> rows);

/// Shortest round-trip decimal form, used for every CSV number.
std::string format_number(double v);

}  // namespace s2cn
