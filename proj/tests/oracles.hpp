#pragma once

// Test-only reference implementations, kept independent of the library's
// algorithm paths: a full-matrix edit-distance DP, an exhaustive tree-edit
// oracle over valid mappings, tree enumeration, and random layout results
// for property tests.

#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "anchordoc/layout.hpp"
#include "anchordoc/metrics.hpp"

namespace oracles {

// Full (m+1)x(n+1) matrix filled straight from the recurrence.
int edit_distance(std::string_view a, std::string_view b);

// Minimum-cost tree mapping by exhaustive search. Valid mappings are
// one-to-one and preserve postorder and ancestry; cost = unmapped nodes on
// both sides plus label renames.
int tree_edit_distance(const anchordoc::metrics::TreeNode& a,
                       const anchordoc::metrics::TreeNode& b);

// Every ordered rooted tree with exactly `nodes` nodes, labels drawn from
// `labels` at each node.
std::vector<anchordoc::metrics::TreeNode> all_labeled_trees(
    int nodes, const std::vector<std::string>& labels);

// Valid random StageOneResult: photographed or digital with n in [0,30]
// elements, canonical attrs, orders 0..n-1.
anchordoc::StageOneResult random_stage_one(std::mt19937& rng);

}  // namespace oracles
