#include "s2cn/classifier/hungarian.hpp"

#include <limits>
#include <stdexcept>

#include "s2cn/numkit/errors.hpp"
#include "s2cn/numkit/linalg.hpp"

namespace s2cn {

Assignment hungarian(const Tensor& cost) {
  require_square(cost, "hungarian");
  if (!cost.all_finite()) throw std::invalid_argument("hungarian: cost matrix has non-finite entries");
  const std::size_t n = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();

  // 1-based potentials; column 0 is a virtual start.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> row_of_col(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    row_of_col[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = row_of_col[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment result{std::vector<std::size_t>(n, 0), 0.0};
  for (std::size_t j = 1; j <= n; ++j) result.column_of_row[row_of_col[j] - 1] = j - 1;
  for (std::size_t r = 0; r < n; ++r) result.cost += cost(r, result.column_of_row[r]);
  return result;
}

}  // namespace s2cn
