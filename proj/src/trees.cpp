#include "sacks/trees.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace sacks {

namespace {

std::string quoted(const Node& n) {
    return "\"" + n.bits + "\"";
}

}  // namespace

Node::Node(std::string b) : bits(std::move(b)) {
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw Error(ErrorKind::BadInput,
                        "node digits must be 0 or 1, got '" + std::string(1, c) + "'");
        }
    }
}

Node Node::child(int b) const {
    Node r = *this;
    r.bits.push_back(b ? '1' : '0');
    return r;
}

Node Node::prefix(std::size_t len) const {
    Node r;
    r.bits = bits.substr(0, len);
    return r;
}

bool Node::is_prefix_of(const Node& other) const {
    return bits.size() <= other.bits.size() &&
           other.bits.compare(0, bits.size(), bits) == 0;
}

bool Node::comparable(const Node& other) const {
    return is_prefix_of(other) || other.is_prefix_of(*this);
}

std::ostream& operator<<(std::ostream& os, const Node& n) {
    return os << (n.bits.empty() ? std::string("<>") : n.bits);
}

TreeCondition::TreeCondition() : leaves_{Node{}} {}

TreeCondition TreeCondition::from_leaves(std::vector<Node> leaves) {
    if (leaves.empty()) {
        throw Error(ErrorKind::BadInput, "a tree condition needs at least one leaf");
    }
    // Keep maximal nodes only: the explicit part is the downward closure of
    // the input, so proper prefixes of other entries are interior nodes.
    std::sort(leaves.begin(), leaves.end());
    leaves.erase(std::unique(leaves.begin(), leaves.end()), leaves.end());
    std::vector<Node> maximal;
    for (const Node& cand : leaves) {
        bool has_extension = false;
        for (const Node& other : leaves) {
            if (cand != other && cand.is_prefix_of(other)) {
                has_extension = true;
                break;
            }
        }
        if (!has_extension) maximal.push_back(cand);
    }
    TreeCondition t;
    t.leaves_ = std::move(maximal);
    t.canonicalize();
    return t;
}

void TreeCondition::canonicalize() {
    // Merge sibling leaf pairs upward until none remain; the denotation is
    // unchanged and equal denotations end up with equal leaf sets.
    bool merged = true;
    while (merged) {
        merged = false;
        std::sort(leaves_.begin(), leaves_.end());
        for (std::size_t i = 0; i + 1 < leaves_.size(); ++i) {
            const Node& a = leaves_[i];
            const Node& b = leaves_[i + 1];
            if (!a.empty() && a.size() == b.size() &&
                a.prefix(a.size() - 1) == b.prefix(b.size() - 1) && a != b) {
                Node parent = a.prefix(a.size() - 1);
                leaves_.erase(leaves_.begin() + static_cast<std::ptrdiff_t>(i),
                              leaves_.begin() + static_cast<std::ptrdiff_t>(i) + 2);
                leaves_.push_back(parent);
                merged = true;
                break;
            }
        }
    }
    std::sort(leaves_.begin(), leaves_.end());
}

TreeCondition TreeCondition::union_of(const TreeCondition& a, const TreeCondition& b) {
    std::vector<Node> pool = a.leaves_;
    pool.insert(pool.end(), b.leaves_.begin(), b.leaves_.end());
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    // For denotation unions the minimal nodes win: a shorter leaf's cone
    // already covers every extension's cone.
    std::vector<Node> minimal;
    for (const Node& cand : pool) {
        bool has_prefix = false;
        for (const Node& other : pool) {
            if (cand != other && other.is_prefix_of(cand)) {
                has_prefix = true;
                break;
            }
        }
        if (!has_prefix) minimal.push_back(cand);
    }
    TreeCondition t;
    t.leaves_ = std::move(minimal);
    t.canonicalize();
    return t;
}

bool TreeCondition::is_full() const {
    return leaves_.size() == 1 && leaves_[0].empty();
}

std::size_t TreeCondition::max_leaf_depth() const {
    std::size_t d = 0;
    for (const Node& l : leaves_) d = std::max(d, l.size());
    return d;
}

bool TreeCondition::denotes(const Node& s) const {
    for (const Node& l : leaves_) {
        if (s.comparable(l)) return true;
    }
    return false;
}

TreeCondition TreeCondition::restrict_node(const Node& s) const {
    if (!denotes(s)) {
        throw Error(ErrorKind::NodeNotInTree,
                    "node " + quoted(s) + " is not in the tree");
    }
    std::vector<Node> kept;
    for (const Node& l : leaves_) {
        if (s.is_prefix_of(l)) kept.push_back(l);
    }
    if (kept.empty()) {
        // s lies strictly above a leaf; the restriction's cone starts at s.
        kept.push_back(s);
    }
    TreeCondition t;
    t.leaves_ = std::move(kept);
    t.canonicalize();
    return t;
}

Node TreeCondition::succ_split(const Node& s) const {
    if (!denotes(s)) {
        throw Error(ErrorKind::NodeNotInTree,
                    "node " + quoted(s) + " is not in the tree");
    }
    Node cur = s;
    for (;;) {
        bool c0 = denotes(cur.child(0));
        bool c1 = denotes(cur.child(1));
        if (c0 && c1) return cur;
        cur = cur.child(c1 ? 1 : 0);
    }
}

std::vector<Node> TreeCondition::split_level(std::size_t n) const {
    std::vector<Node> level{stem()};
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<Node> next;
        next.reserve(level.size() * 2);
        for (const Node& s : level) {
            next.push_back(succ_split(s.child(0)));
            next.push_back(succ_split(s.child(1)));
        }
        level = std::move(next);
    }
    std::sort(level.begin(), level.end());
    return level;
}

bool TreeCondition::leq(const TreeCondition& other,
                        std::optional<std::size_t> level) const {
    // den(this) ⊆ den(other) iff every leaf here extends a leaf there: the
    // full cone above a leaf must land inside the other denotation.
    for (const Node& l : leaves_) {
        bool covered = false;
        for (const Node& m : other.leaves_) {
            if (m.is_prefix_of(l)) {
                covered = true;
                break;
            }
        }
        if (!covered) return false;
    }
    if (level) {
        return split_level(*level) == other.split_level(*level);
    }
    return true;
}

std::vector<Node> TreeCondition::layer(std::size_t depth) const {
    std::vector<Node> out;
    std::vector<Node> frontier{Node{}};
    for (std::size_t d = 0; d < depth; ++d) {
        std::vector<Node> next;
        for (const Node& n : frontier) {
            for (int b = 0; b < 2; ++b) {
                Node c = n.child(b);
                if (denotes(c)) next.push_back(c);
            }
        }
        frontier = std::move(next);
    }
    std::sort(frontier.begin(), frontier.end());
    return frontier;
}

std::ostream& operator<<(std::ostream& os, const TreeCondition& t) {
    os << '{';
    bool first = true;
    for (const Node& l : t.leaves()) {
        if (!first) os << ',';
        os << '"' << l.bits << '"';
        first = false;
    }
    return os << '}';
}

Report verify_fusion_chain(const std::vector<TreeCondition>& chain) {
    Report report;
    for (std::size_t n = 0; n + 1 < chain.size(); ++n) {
        if (!chain[n + 1].leq(chain[n], n)) {
            std::ostringstream detail;
            detail << "chain[" << n + 1 << "] is not <=_" << n << " chain[" << n << "]";
            report.flag(n + 1, "step-refinement", detail.str());
        }
    }
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
        auto expected = chain[k + 1].split_level(k);
        for (std::size_t m = k + 2; m < chain.size(); ++m) {
            if (chain[m].split_level(k) != expected) {
                std::ostringstream detail;
                detail << "split level " << k << " changed at chain[" << m << "]";
                report.flag(m, "level-stabilization", detail.str());
            }
        }
    }
    return report;
}

InducedMap::InducedMap(TreeCondition source, TreeCondition target)
    : source_(std::move(source)), target_(std::move(target)) {}

Node InducedMap::map_node(const Node& s) const {
    if (!source_.denotes(s)) {
        throw Error(ErrorKind::NodeNotInTree,
                    "node " + quoted(s) + " is not in the source tree");
    }
    Node goal = source_.succ_split(s);
    if (auto it = resolved_.find(goal); it != resolved_.end()) return it->second;
    // Walk the splitting skeleton from the stems, mirroring the direction
    // bits; this realizes the level- and lex-preserving bijection.
    Node src = source_.stem();
    Node tgt = target_.stem();
    while (src != goal) {
        int b = goal.bit(src.size());
        src = source_.succ_split(src.child(b));
        tgt = target_.succ_split(tgt.child(b));
    }
    return tgt;
}

InducedMap InducedMap::resolved_to_level(std::size_t n) const {
    InducedMap out(source_, target_);
    out.resolved_ = resolved_;
    // Breadth-first, lex within a level: split_level returns sorted nodes.
    for (std::size_t k = 0; k <= n; ++k) {
        auto src_level = source_.split_level(k);
        auto tgt_level = target_.split_level(k);
        for (std::size_t i = 0; i < src_level.size(); ++i) {
            out.resolved_.emplace(src_level[i], tgt_level[i]);
        }
    }
    return out;
}

TreeCondition InducedMap::image_tree(const TreeCondition& r) const {
    if (!r.leq(source_)) {
        throw Error(ErrorKind::NotARefinement,
                    "condition is not a refinement of the map's source");
    }
    // Above each leaf of r both r and the source are full, so the branches
    // through that leaf map exactly onto the target's branches through the
    // leaf's image; the image tree is the union of those restrictions.
    TreeCondition out = target_.restrict_node(map_node(r.leaves()[0]));
    for (std::size_t i = 1; i < r.leaves().size(); ++i) {
        out = TreeCondition::union_of(out, target_.restrict_node(map_node(r.leaves()[i])));
    }
    return out;
}

InducedMap InducedMap::inverse() const {
    return InducedMap(target_, source_);
}

}  // namespace sacks
