#include "checkout/assignment.hpp"

#include <algorithm>
#include <limits>

#include "checkout/errors.hpp"

namespace checkout::track {
namespace {

constexpr double kForbidden = 1e6;  // dwarfs any feasible 1-IoU total

}  // namespace

std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  if (n == 0) return {};
  for (const auto& row : cost)
    if (static_cast<int>(row.size()) != n)
      throw ValidationError("solve_assignment: matrix must be square");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost[static_cast<std::size_t>(i0 - 1)][static_cast<std::size_t>(j - 1)] -
                           u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (p[static_cast<std::size_t>(j)] > 0)
      row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  return row_to_col;
}

AssignmentResult gated_iou_assignment(const std::vector<BBox>& rows,
                                      const std::vector<BBox>& cols, double gate) {
  AssignmentResult result;
  const int nr = static_cast<int>(rows.size());
  const int nc = static_cast<int>(cols.size());
  if (nr == 0 || nc == 0) {
    for (int r = 0; r < nr; ++r) result.unmatched_rows.push_back(r);
    for (int c = 0; c < nc; ++c) result.unmatched_cols.push_back(c);
    return result;
  }

  // Pad to square; forbidden and dummy cells share one large cost, so the
  // minimum-cost perfect matching maximizes the gated match count first.
  const int n = std::max(nr, nc);
  std::vector<std::vector<double>> cost(static_cast<std::size_t>(n),
                                        std::vector<double>(static_cast<std::size_t>(n), kForbidden));
  for (int r = 0; r < nr; ++r) {
    for (int c = 0; c < nc; ++c) {
      const double overlap = iou(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
      if (overlap > gate)
        cost[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = 1.0 - overlap;
    }
  }

  const auto row_to_col = solve_assignment(cost);
  std::vector<char> col_matched(static_cast<std::size_t>(nc), 0);
  for (int r = 0; r < nr; ++r) {
    const int c = row_to_col[static_cast<std::size_t>(r)];
    if (c >= 0 && c < nc &&
        cost[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] < kForbidden) {
      result.matches.emplace_back(r, c);
      col_matched[static_cast<std::size_t>(c)] = 1;
    } else {
      result.unmatched_rows.push_back(r);
    }
  }
  for (int c = 0; c < nc; ++c)
    if (!col_matched[static_cast<std::size_t>(c)]) result.unmatched_cols.push_back(c);
  return result;
}

}  // namespace checkout::track
