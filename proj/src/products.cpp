#include "sacks/products.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace sacks {

ProductCondition::ProductCondition(std::map<std::size_t, TreeCondition> coords)
    : coords_(std::move(coords)) {
    for (auto it = coords_.begin(); it != coords_.end();) {
        if (it->second.is_full()) {
            it = coords_.erase(it);
        } else {
            ++it;
        }
    }
}

std::set<std::size_t> ProductCondition::support() const {
    std::set<std::size_t> s;
    for (const auto& [alpha, _] : coords_) s.insert(alpha);
    return s;
}

TreeCondition ProductCondition::at(std::size_t alpha) const {
    auto it = coords_.find(alpha);
    return it == coords_.end() ? TreeCondition{} : it->second;
}

ProductCondition ProductCondition::with(std::size_t alpha, TreeCondition tree) const {
    auto coords = coords_;
    if (tree.is_full()) {
        coords.erase(alpha);
    } else {
        coords[alpha] = std::move(tree);
    }
    ProductCondition out;
    out.coords_ = std::move(coords);
    return out;
}

std::ostream& operator<<(std::ostream& os, const ProductCondition& p) {
    os << '{';
    bool first = true;
    for (const auto& [alpha, tree] : p.coords()) {
        if (!first) os << ',';
        os << alpha << ':' << tree;
        first = false;
    }
    return os << '}';
}

std::ostream& operator<<(std::ostream& os, const SuitableFunction& s) {
    os << '{';
    bool first = true;
    for (const auto& [alpha, node] : s.entries) {
        if (!first) os << ',';
        os << alpha << "->\"" << node.bits << '"';
        first = false;
    }
    return os << '}';
}

std::vector<SuitableFunction> suitable_functions(const ProductCondition& p,
                                                 const std::set<std::size_t>& F,
                                                 std::size_t n) {
    // Per coordinate, the 2^{n+1} successors of the level-n splitting nodes,
    // sorted; then the cartesian product with earlier coordinates varying
    // slowest.
    std::vector<std::size_t> coords(F.begin(), F.end());
    std::vector<std::vector<Node>> options;
    options.reserve(coords.size());
    for (std::size_t alpha : coords) {
        std::vector<Node> opts;
        for (const Node& s : p.at(alpha).split_level(n)) {
            opts.push_back(s.child(0));
            opts.push_back(s.child(1));
        }
        std::sort(opts.begin(), opts.end());
        options.push_back(std::move(opts));
    }
    std::vector<SuitableFunction> out;
    std::vector<std::size_t> idx(coords.size(), 0);
    for (;;) {
        SuitableFunction sigma;
        for (std::size_t i = 0; i < coords.size(); ++i) {
            sigma.entries[coords[i]] = options[i][idx[i]];
        }
        out.push_back(std::move(sigma));
        std::size_t i = coords.size();
        while (i > 0) {
            --i;
            if (++idx[i] < options[i].size()) break;
            idx[i] = 0;
            if (i == 0) return out;
        }
        if (coords.empty()) return out;
    }
}

ProductCondition restrict_suitable(const ProductCondition& p, const SuitableFunction& sigma) {
    ProductCondition out = p;
    for (const auto& [alpha, node] : sigma.entries) {
        TreeCondition tree = p.at(alpha);
        if (!tree.denotes(node)) {
            std::ostringstream msg;
            msg << "suitable choice " << alpha << "->\"" << node.bits
                << "\" is outside the coordinate tree";
            throw Error(ErrorKind::IncompatibleSuitable, msg.str());
        }
        out = out.with(alpha, tree.restrict_node(node));
    }
    return out;
}

bool leq_product(const ProductCondition& q, const ProductCondition& p,
                 const std::optional<std::set<std::size_t>>& F,
                 std::optional<std::size_t> n) {
    if (F.has_value() != n.has_value()) {
        throw Error(ErrorKind::BadInput, "F and n must be both present or both absent");
    }
    for (const auto& [alpha, tree] : p.coords()) {
        if (!q.at(alpha).leq(tree)) return false;
    }
    for (const auto& [alpha, tree] : q.coords()) {
        if (!tree.leq(p.at(alpha))) return false;
    }
    if (F) {
        for (std::size_t alpha : *F) {
            if (q.at(alpha).split_level(*n) != p.at(alpha).split_level(*n)) return false;
        }
    }
    return true;
}

namespace {

// Depth at which all structural differences of the finite-stem cells are
// visible: beyond every leaf both dens continue as full cones.
std::size_t probe_depth(const ProductCondition& p, const std::set<std::size_t>& F,
                        std::size_t n) {
    std::size_t d = 0;
    for (std::size_t alpha : F) d = std::max(d, p.at(alpha).max_leaf_depth());
    return d + n + 2;
}

}  // namespace

Report antichain_report(const ProductCondition& p, const std::set<std::size_t>& F,
                        std::size_t n, const std::vector<ProductCondition>& cells) {
    Report report;
    const std::size_t depth = probe_depth(p, F, n);
    // Pairwise incompatibility: compatible conditions share a node tuple at
    // every depth, so a shared tuple at the probe depth (where both trees are
    // already unions of full cones) witnesses compatibility exactly.
    for (std::size_t i = 0; i < cells.size(); ++i) {
        for (std::size_t j = i + 1; j < cells.size(); ++j) {
            bool compatible = true;
            for (std::size_t alpha : F) {
                auto la = cells[i].at(alpha).layer(depth);
                auto lb = cells[j].at(alpha).layer(depth);
                std::vector<Node> common;
                std::set_intersection(la.begin(), la.end(), lb.begin(), lb.end(),
                                      std::back_inserter(common));
                if (common.empty()) {
                    compatible = false;
                    break;
                }
            }
            if (compatible) {
                std::ostringstream detail;
                detail << "cells " << i << " and " << j << " are compatible";
                report.flag(i, "pairwise-incompatible", detail.str());
            }
        }
    }
    // Unique coverage of every branch tuple through p over the F-coordinates.
    // Per-cell membership along each coordinate layer is precomputed so the
    // tuple sweep is a table walk.
    std::vector<std::size_t> coords(F.begin(), F.end());
    std::vector<std::vector<Node>> layers;
    for (std::size_t alpha : coords) layers.push_back(p.at(alpha).layer(depth));
    std::vector<std::vector<std::vector<char>>> member(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        member[c].resize(coords.size());
        for (std::size_t i = 0; i < coords.size(); ++i) {
            member[c][i].resize(layers[i].size());
            TreeCondition tree = cells[c].at(coords[i]);
            for (std::size_t k = 0; k < layers[i].size(); ++k) {
                member[c][i][k] = tree.denotes(layers[i][k]) ? 1 : 0;
            }
        }
    }
    std::vector<std::size_t> idx(coords.size(), 0);
    std::size_t tuple_index = 0;
    for (;;) {
        std::size_t hits = 0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            bool inside = true;
            for (std::size_t i = 0; i < coords.size(); ++i) {
                if (!member[c][i][idx[i]]) {
                    inside = false;
                    break;
                }
            }
            if (inside && ++hits > 1) break;
        }
        if (hits != 1) {
            std::ostringstream detail;
            detail << "branch tuple #" << tuple_index << " covered by " << hits
                   << " cells";
            report.flag(tuple_index, "unique-coverage", detail.str());
        }
        ++tuple_index;
        std::size_t i = coords.size();
        bool advanced = false;
        while (i > 0) {
            --i;
            if (++idx[i] < layers[i].size()) {
                advanced = true;
                break;
            }
            idx[i] = 0;
        }
        if (!advanced) break;
    }
    return report;
}

bool check_antichain(const ProductCondition& p, const std::set<std::size_t>& F,
                     std::size_t n) {
    std::vector<ProductCondition> cells;
    for (const SuitableFunction& sigma : suitable_functions(p, F, n)) {
        cells.push_back(restrict_suitable(p, sigma));
    }
    return antichain_report(p, F, n, cells).ok();
}

ProductCondition amalgamate(const ProductCondition& p, const std::set<std::size_t>& F,
                            std::size_t n,
                            const std::map<SuitableFunction, ProductCondition>& replace) {
    auto sigmas = suitable_functions(p, F, n);
    for (const auto& [sigma, _] : replace) {
        if (std::find(sigmas.begin(), sigmas.end(), sigma) == sigmas.end()) {
            throw Error(ErrorKind::BadInput,
                        "replacement key is not suitable for (p, F, n)");
        }
    }
    ProductCondition q = p;
    for (const SuitableFunction& sigma : sigmas) {
        auto it = replace.find(sigma);
        if (it == replace.end()) continue;
        const ProductCondition& r = it->second;
        ProductCondition cell = restrict_suitable(q, sigma);
        if (!leq_product(r, cell)) {
            std::ostringstream msg;
            msg << "replacement for " << sigma << " does not refine its cell";
            throw Error(ErrorKind::NotARefinement, msg.str());
        }
        // Graft: on F-coordinates keep the sibling successor cones and swap
        // in the replacement below σ(α); elsewhere take the replacement tree.
        std::set<std::size_t> touched = q.support();
        for (const auto& [alpha, t] : r.coords()) {
            (void)t;
            touched.insert(alpha);
        }
        for (std::size_t alpha : F) touched.insert(alpha);
        ProductCondition next = q;
        for (std::size_t alpha : touched) {
            if (F.count(alpha)) {
                TreeCondition grafted = r.at(alpha);
                for (const Node& s : q.at(alpha).split_level(n)) {
                    for (int b = 0; b < 2; ++b) {
                        Node succ = s.child(b);
                        if (succ == sigma.entries.at(alpha)) continue;
                        grafted = TreeCondition::union_of(
                            grafted, q.at(alpha).restrict_node(succ));
                    }
                }
                next = next.with(alpha, grafted);
            } else {
                next = next.with(alpha, r.at(alpha));
            }
        }
        q = next;
    }
    return q;
}

Report verify_product_fusion(const std::vector<ProductCondition>& chain,
                             const std::vector<std::set<std::size_t>>& fs) {
    Report report;
    if (!chain.empty() && fs.size() + 1 != chain.size() && fs.size() != chain.size()) {
        report.flag(0, "shape", "need |chain| = |Fseq| + 1 or equal lengths");
        return report;
    }
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
        if (!leq_product(chain[k + 1], chain[k], fs[k], k)) {
            std::ostringstream detail;
            detail << "chain[" << k + 1 << "] is not <=_{F_" << k << "," << k
                   << "} chain[" << k << "]";
            report.flag(k + 1, "step-refinement", detail.str());
        }
    }
    for (std::size_t k = 0; k + 1 < fs.size() && k + 1 < chain.size(); ++k) {
        if (!std::includes(fs[k + 1].begin(), fs[k + 1].end(), fs[k].begin(),
                           fs[k].end())) {
            std::ostringstream detail;
            detail << "F_" << k << " is not a subset of F_" << k + 1;
            report.flag(k, "support-growth", detail.str());
        }
    }
    // Split-level stabilization: once a coordinate enters F_k, its level-k
    // splitting nodes are frozen from stage k+1 on.
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
        for (std::size_t alpha : fs[std::min(k, fs.size() - 1)]) {
            auto expected = chain[k + 1].at(alpha).split_level(k);
            for (std::size_t m = k + 2; m < chain.size(); ++m) {
                if (chain[m].at(alpha).split_level(k) != expected) {
                    std::ostringstream detail;
                    detail << "coordinate " << alpha << " split level " << k
                           << " changed at chain[" << m << "]";
                    report.flag(m, "level-stabilization", detail.str());
                }
            }
        }
    }
    return report;
}

}  // namespace sacks
