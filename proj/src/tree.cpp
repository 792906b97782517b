#include "tsel/tree.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <stdexcept>
#include <unordered_set>

namespace tsel::tree {

TreeNode TreeNode::parse(std::string_view text) {
    for (char c : text)
        if (c != 'L' && c != 'R')
            throw std::invalid_argument("tree path may contain only 'L' and 'R'");
    return TreeNode{std::string(text)};
}

std::int64_t CoverageTrie::insert(const TreeNode& node) {
    std::int64_t added = 0;
    if (!root_covered_) {
        root_covered_ = true;
        ++count_;
        ++added;
    }
    Vertex* v = &root_;
    for (char c : node.path) {
        auto& slot = v->child[c == 'R'];
        if (!slot) {
            slot = std::make_unique<Vertex>();
            ++count_;
            ++added;
        }
        v = slot.get();
    }
    return added;
}

std::int64_t coverage(std::span<const TreeNode> nodes) {
    CoverageTrie trie;
    for (const auto& node : nodes) trie.insert(node);
    return trie.vertex_count();
}

TreeNode sample_tree_node(double p, Rng& rng) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("need p in (0, 1)");
    TreeNode node;
    while (rng.uniform01() >= p) node.path.push_back(rng.coin() ? 'R' : 'L');
    return node;
}

TreeTrace run_tree_selection(const ThresholdSchedule& s, double p, std::int64_t n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("need n >= 1");
    if (s.domain() != ScheduleDomain::Integer)
        throw std::invalid_argument("tree model needs an integer-valued schedule");
    TreeTrace trace;
    trace.selected.reserve(static_cast<std::size_t>(n));
    trace.wait_times.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 1; i <= n; ++i) {
        const std::int64_t c = s.integer_at(i);
        std::int64_t wait = 0;
        for (;;) {
            TreeNode node = sample_tree_node(p, rng);
            ++trace.seen_total;
            ++wait;
            if (node.cover_size() >= c) {
                trace.selected.push_back(std::move(node));
                break;
            }
            trace.rejected.push_back(std::move(node));
        }
        trace.wait_times.push_back(wait);
    }
    return trace;
}

namespace {

// Explicit-index trie used by the offline oracle; children are created
// after their parents, so a reverse pass visits children first.
struct OracleTrie {
    struct Vertex {
        std::int32_t child[2] = {-1, -1};
        std::int32_t depth = 0;
    };
    std::vector<Vertex> vertices{Vertex{}};

    void insert(const TreeNode& node) {
        std::int32_t v = 0;
        for (char c : node.path) {
            int side = c == 'R';
            if (vertices[static_cast<std::size_t>(v)].child[side] < 0) {
                std::int32_t fresh = static_cast<std::int32_t>(vertices.size());
                vertices.push_back(Vertex{{-1, -1}, vertices[static_cast<std::size_t>(v)].depth + 1});
                vertices[static_cast<std::size_t>(v)].child[side] = fresh;
            }
            v = vertices[static_cast<std::size_t>(v)].child[side];
        }
    }
};

}  // namespace

std::int64_t offline_optimal_coverage(std::span<const TreeNode> candidates, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("need n >= 1");
    if (static_cast<std::int64_t>(candidates.size()) < n)
        throw std::invalid_argument("fewer candidates than the requested subset size");

    OracleTrie trie;
    for (const auto& node : candidates) trie.insert(node);
    const auto& vs = trie.vertices;

    // Deepest leaf depth reachable below each vertex; children precede
    // parents when walking the vertex array backwards.
    std::vector<std::int32_t> reach(vs.size());
    for (std::size_t v = vs.size(); v-- > 0;) {
        reach[v] = vs[v].depth;
        for (int side = 0; side < 2; ++side)
            if (vs[v].child[side] >= 0)
                reach[v] = std::max(reach[v], reach[static_cast<std::size_t>(vs[v].child[side])]);
    }

    // Chain heads: the root, plus every child not on its parent's
    // deepest-reaching side. Chain length = reach - head depth + 1.
    std::vector<std::int64_t> chains;
    chains.push_back(reach[0] + 1);
    for (std::size_t v = 0; v < vs.size(); ++v) {
        int left = vs[v].child[0], right = vs[v].child[1];
        if (left < 0 || right < 0) continue;
        auto lu = static_cast<std::size_t>(left), ru = static_cast<std::size_t>(right);
        std::size_t off = reach[lu] >= reach[ru] ? ru : lu;
        chains.push_back(reach[off] - vs[off].depth + 1);
    }

    std::sort(chains.begin(), chains.end(), std::greater<>());
    std::int64_t total = 0;
    for (std::size_t j = 0; j < chains.size() && j < static_cast<std::size_t>(n); ++j)
        total += chains[j];
    return total;
}

std::int64_t brute_force_optimal_coverage(std::span<const TreeNode> candidates, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("need n >= 1");
    if (candidates.size() > 16)
        throw std::invalid_argument(
            "brute_force_optimal_coverage is limited to 16 candidates; use "
            "offline_optimal_coverage");
    if (static_cast<std::int64_t>(candidates.size()) < n)
        throw std::invalid_argument("fewer candidates than the requested subset size");

    const int m = static_cast<int>(candidates.size());
    std::int64_t best = 0;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        if (std::popcount(mask) != static_cast<int>(n)) continue;
        CoverageTrie trie;
        for (int j = 0; j < m; ++j)
            if (mask & (1u << j)) trie.insert(candidates[static_cast<std::size_t>(j)]);
        best = std::max(best, trie.vertex_count());
    }
    return best;
}

std::int64_t independence_diagnostic(std::span<const TreeNode> selected, int level) {
    if (level < 0) throw std::invalid_argument("need level >= 0");
    std::unordered_set<std::string_view> ancestors;
    for (const auto& node : selected) {
        if (node.depth() < level)
            throw std::invalid_argument("node shallower than the requested level");
        ancestors.insert(std::string_view(node.path).substr(0, static_cast<std::size_t>(level)));
    }
    return static_cast<std::int64_t>(ancestors.size());
}

}  // namespace tsel::tree
