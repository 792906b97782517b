#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsel/rng.hpp"
#include "tsel/schedule.hpp"

namespace tsel::tree {

/// A node of the infinite binary tree, identified by its root path.
/// The root is the empty path; a node covers itself and every ancestor,
/// so its shadow has depth + 1 vertices.
struct TreeNode {
    std::string path;  // characters 'L' and 'R'

    int depth() const { return static_cast<int>(path.size()); }
    std::int64_t cover_size() const { return depth() + 1; }

    static TreeNode parse(std::string_view text);

    auto operator<=>(const TreeNode&) const = default;
};

/// Prefix tree over root paths counting distinct covered vertices.
/// Inserting a node twice never changes the count.
class CoverageTrie {
public:
    CoverageTrie() = default;

    /// Returns how many vertices the node newly covers.
    std::int64_t insert(const TreeNode& node);

    std::int64_t vertex_count() const { return count_; }

private:
    struct Vertex {
        std::unique_ptr<Vertex> child[2];
    };
    Vertex root_;
    bool root_covered_ = false;
    std::int64_t count_ = 0;
};

/// |D(S)|: distinct vertices on the union of root paths.
std::int64_t coverage(std::span<const TreeNode> nodes);

/// Random walk from the root: stop at each vertex with probability p,
/// otherwise step to a uniformly random child. Depth is geometric.
TreeNode sample_tree_node(double p, Rng& rng);

struct TreeTrace {
    std::vector<TreeNode> selected;
    std::vector<TreeNode> rejected;
    std::int64_t seen_total = 0;
    std::vector<std::int64_t> wait_times;
};

/// Threshold rule on shadow size: the i-th selection accepts the first
/// node x with |D(x)| >= c_i.
TreeTrace run_tree_selection(const ThresholdSchedule& s, double p, std::int64_t n, Rng& rng);

/// Exact max coverage over n-subsets of the candidates, via long-path
/// decomposition of the candidate trie: every vertex joins the chain of
/// its deepest-reaching child, other children start new chains, and the
/// n longest chains sum to the optimum.
std::int64_t offline_optimal_coverage(std::span<const TreeNode> candidates, std::int64_t n);

/// Exhaustive reference oracle; guards |candidates| <= 16.
std::int64_t brute_force_optimal_coverage(std::span<const TreeNode> candidates, std::int64_t n);

/// Number of distinct depth-`level` ancestors among the nodes (the
/// occupancy quantity used as an experiment diagnostic). Every node must
/// have depth >= level.
std::int64_t independence_diagnostic(std::span<const TreeNode> selected, int level);

}  // namespace tsel::tree
