#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sacks/common.hpp"

namespace sacks {

// A node of the full binary tree: a finite string over {'0','1'}.
struct Node {
    std::string bits;

    Node() = default;
    explicit Node(std::string b);

    std::size_t size() const { return bits.size(); }
    bool empty() const { return bits.empty(); }
    int bit(std::size_t i) const { return bits[i] - '0'; }

    Node child(int b) const;
    Node prefix(std::size_t len) const;

    // s.is_prefix_of(t) is the relation s ⊑ t.
    bool is_prefix_of(const Node& other) const;
    bool comparable(const Node& other) const;

    auto operator<=>(const Node&) const = default;
};

std::ostream& operator<<(std::ostream& os, const Node& n);

// A Sacks condition in finite-stem form: a finite antichain of leaves whose
// downward closure is the explicit part, with the full binary tree continuing
// above every leaf. The denoted tree is always perfect, and these conditions
// are dense in the perfect-tree poset, so nothing is lost by the restriction.
//
// Canonical form: leaves are a sorted antichain with no two siblings present
// (sibling pairs merge into their parent), so equal denotations have equal
// representations.
class TreeCondition {
  public:
    // The full binary tree.
    TreeCondition();

    // Leaves are maximal nodes of the explicit part; non-maximal entries are
    // absorbed by their extensions, then the result is canonicalized.
    static TreeCondition from_leaves(std::vector<Node> leaves);

    // Condition whose denotation is the union of the operands' denotations.
    // The union of two perfect trees is perfect, so this is total.
    static TreeCondition union_of(const TreeCondition& a, const TreeCondition& b);

    const std::vector<Node>& leaves() const { return leaves_; }
    bool is_full() const;
    std::size_t max_leaf_depth() const;

    // Membership in the denoted tree.
    bool denotes(const Node& s) const;

    // T_s: everything comparable with s. Throws NodeNotInTree.
    TreeCondition restrict_node(const Node& s) const;

    // The unique minimal splitting node extending s. Throws NodeNotInTree.
    Node succ_split(const Node& s) const;

    Node stem() const { return succ_split(Node{}); }

    // The n-th splitting level, 2^n pairwise incomparable nodes, sorted.
    std::vector<Node> split_level(std::size_t n) const;

    // den(*this) ⊆ den(other); with level, additionally equal n-th splitting
    // levels (the ≤_n fusion ordering).
    bool leq(const TreeCondition& other,
             std::optional<std::size_t> level = std::nullopt) const;

    // All nodes of the denoted tree at exactly the given depth, sorted.
    std::vector<Node> layer(std::size_t depth) const;

    bool operator==(const TreeCondition&) const = default;
    auto operator<=>(const TreeCondition&) const = default;

  private:
    std::vector<Node> leaves_;

    void canonicalize();
};

std::ostream& operator<<(std::ostream& os, const TreeCondition& t);

// Checks that consecutive entries satisfy chain[n+1] ≤_n chain[n] and that
// the k-th splitting level is constant from index k+1 onwards.
Report verify_fusion_chain(const std::vector<TreeCondition>& chain);

// The induced homeomorphism between two conditions: the unique bijection of
// splitting levels that preserves level and lexicographic order, extended to
// arbitrary nodes by mapping s to the image of the minimal splitting node
// above s. The resolved skeleton grows lazily; resolution never mutates, it
// returns an extended copy.
class InducedMap {
  public:
    InducedMap(TreeCondition source, TreeCondition target);

    const TreeCondition& source() const { return source_; }
    const TreeCondition& target() const { return target_; }
    const std::map<Node, Node>& resolved() const { return resolved_; }

    // π(s). Throws NodeNotInTree if s is outside the source.
    Node map_node(const Node& s) const;

    // Copy with the skeleton resolved breadth-first through level n.
    InducedMap resolved_to_level(std::size_t n) const;

    // The condition whose branches are the π-images of the branches of r.
    // Throws NotARefinement unless r ≤ source.
    TreeCondition image_tree(const TreeCondition& r) const;

    InducedMap inverse() const;

  private:
    TreeCondition source_;
    TreeCondition target_;
    std::map<Node, Node> resolved_;
};

}  // namespace sacks
