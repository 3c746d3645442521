#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "sacks/common.hpp"
#include "sacks/trees.hpp"

namespace sacks {

// A condition of the countable-support product: finitely many nontrivial
// coordinates, every other coordinate is the full tree. Trivial coordinates
// are normalized away, so equality is semantic.
class ProductCondition {
  public:
    ProductCondition() = default;
    explicit ProductCondition(std::map<std::size_t, TreeCondition> coords);

    const std::map<std::size_t, TreeCondition>& coords() const { return coords_; }
    std::set<std::size_t> support() const;

    // The tree at a coordinate; full if the coordinate is trivial.
    TreeCondition at(std::size_t alpha) const;

    ProductCondition with(std::size_t alpha, TreeCondition tree) const;

    bool operator==(const ProductCondition&) const = default;
    auto operator<=>(const ProductCondition&) const = default;

  private:
    std::map<std::size_t, TreeCondition> coords_;
};

std::ostream& operator<<(std::ostream& os, const ProductCondition& p);

// σ: one immediate successor of a level-n splitting node per coordinate of F.
struct SuitableFunction {
    std::map<std::size_t, Node> entries;

    bool operator==(const SuitableFunction&) const = default;
    auto operator<=>(const SuitableFunction&) const = default;
};

std::ostream& operator<<(std::ostream& os, const SuitableFunction& s);

// All (2^{n+1})^{|F|} suitable functions for (p, F, n) in canonical order:
// coordinates ascending, successor nodes lex within a coordinate.
std::vector<SuitableFunction> suitable_functions(const ProductCondition& p,
                                                 const std::set<std::size_t>& F,
                                                 std::size_t n);

// (p ↾ σ): restrict each coordinate of dom(σ) to its chosen successor.
// Throws IncompatibleSuitable when σ picks a node outside the coordinate.
ProductCondition restrict_suitable(const ProductCondition& p, const SuitableFunction& sigma);

// q ≤ p, and with (F, n) additionally q(α) ≤_n p(α) for α ∈ F.
bool leq_product(const ProductCondition& q, const ProductCondition& p,
                 const std::optional<std::set<std::size_t>>& F = std::nullopt,
                 std::optional<std::size_t> n = std::nullopt);

// Exact antichain verification for an arbitrary cell family below p: pairwise
// incompatibility plus unique coverage of every deep enough branch tuple over
// the F-coordinates. Exposed so tests can mutate the family.
Report antichain_report(const ProductCondition& p, const std::set<std::size_t>& F,
                        std::size_t n, const std::vector<ProductCondition>& cells);

// The suitable-restriction family of (p, F, n) forms a maximal antichain.
bool check_antichain(const ProductCondition& p, const std::set<std::size_t>& F,
                     std::size_t n);

// Cell-by-cell union construction: walks the suitable functions in canonical
// order and grafts each supplied replacement into its cell, leaving the other
// level-n successors untouched on F and shrinking shared coordinates only as
// the replacements demand. Result q satisfies q ≤_{F,n} p, q ↾ σ ≤ replace(σ),
// with equality whenever the replacements touch only their own cell region.
// Throws NotARefinement if a replacement does not refine its cell at its turn.
ProductCondition amalgamate(const ProductCondition& p, const std::set<std::size_t>& F,
                            std::size_t n,
                            const std::map<SuitableFunction, ProductCondition>& replace);

// Checks p_{k+1} ≤_{F_k,k} p_k, F_k ⊆ F_{k+1}, and per-coordinate split-level
// stabilization along the chain.
Report verify_product_fusion(const std::vector<ProductCondition>& chain,
                             const std::vector<std::set<std::size_t>>& fs);

}  // namespace sacks
