#pragma once

#include <utility>
#include <vector>

#include "checkout/geometry.hpp"

namespace checkout::track {

// Minimum-cost perfect assignment on a square cost matrix (Hungarian method
// with potentials, O(n^3)). Returns col assigned to each row.
std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost);

struct AssignmentResult {
  std::vector<std::pair<int, int>> matches;  // (row, col)
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
};

// Optimal gated assignment: maximizes the number of matched pairs with
// IoU > gate, then minimizes the summed 1-IoU cost over them. Pairs at or
// below the gate never match.
AssignmentResult gated_iou_assignment(const std::vector<BBox>& rows,
                                      const std::vector<BBox>& cols, double gate);

}  // namespace checkout::track
