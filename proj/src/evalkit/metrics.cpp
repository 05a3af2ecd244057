#include "s2cn/evalkit/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <stdexcept>

#include "s2cn/classifier/alignment.hpp"
#include "s2cn/classifier/hungarian.hpp"
#include "s2cn/numkit/errors.hpp"

namespace s2cn {

double clustering_error(std::span<const Label> pred, std::span<const Label> truth, std::size_t clusters) {
  if (pred.size() != truth.size()) {
    throw ShapeError("clustering_error: " + std::to_string(pred.size()) + " predictions for " +
                     std::to_string(truth.size()) + " ground-truth labels");
  }
  if (pred.empty()) throw std::invalid_argument("clustering_error: no points");
  const Tensor counts = overlap_counts({pred.begin(), pred.end()}, {truth.begin(), truth.end()}, clusters);
  Tensor cost = counts;
  for (double& v : cost.values()) v = -v;
  const double matched = -hungarian(cost).cost;
  return 100.0 * (1.0 - matched / static_cast<double>(pred.size()));
}

double median_of(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median_of: no values");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

std::vector<SummaryRow> aggregate(std::span<const EvalReport> reports) {
  if (reports.empty()) throw std::invalid_argument("aggregate: no reports");
  std::vector<SummaryRow> rows;
  std::vector<std::vector<double>> values;
  for (const EvalReport& r : reports) {
    if (!(r.error_percent >= 0.0 && r.error_percent <= 100.0)) {
      throw std::invalid_argument("aggregate: error percent outside [0, 100]");
    }
    auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& s) {
      return s.dataset == r.dataset && s.clusters == r.clusters && s.loss_config == r.loss_config;
    });
    if (it == rows.end()) {
      rows.push_back({r.dataset, r.clusters, r.loss_config, 0, 0.0, 0.0});
      values.emplace_back();
      it = rows.end() - 1;
    }
    values[static_cast<std::size_t>(it - rows.begin())].push_back(r.error_percent);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double sum = 0.0;
    for (double v : values[i]) sum += v;
    rows[i].runs = values[i].size();
    rows[i].mean = sum / static_cast<double>(values[i].size());
    rows[i].median = median_of(values[i]);
  }
  return rows;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_report_csv(std::ostream& os, std::span<const EvalReport> reports) {
  os << "dataset,n,loss_config,seed,error_percent\n";
  for (const EvalReport& r : reports) {
    os << r.dataset << ',' << r.clusters << ',' << r.loss_config << ',' << r.seed << ','
       << format_number(r.error_percent) << '\n';
  }
}

void write_summary_csv(std::ostream& os, std::span<const SummaryRow> rows) {
  os << "dataset,n,loss_config,runs,mean,median\n";
  for (const SummaryRow& r : rows) {
    os << r.dataset << ',' << r.clusters << ',' << r.loss_config << ',' << r.runs << ',' << format_number(r.mean)
       << ',' << format_number(r.median) << '\n';
  }
}

}  // namespace s2cn
