#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sacks/codes.hpp"
#include "sacks/cofinitary.hpp"
#include "sacks/common.hpp"
#include "sacks/formulas.hpp"
#include "sacks/products.hpp"
#include "sacks/words.hpp"

namespace sacks {

// An eventually periodic subset of the naturals: explicit prefix bits, then a
// repeating pattern. Membership, boolean algebra, and finiteness are exact.
class PeriodicSet {
  public:
    PeriodicSet();  // empty set
    PeriodicSet(std::vector<bool> prefix, std::vector<bool> period);

    static PeriodicSet evens();
    static PeriodicSet full();
    static PeriodicSet from_residues(std::uint64_t modulus,
                                     const std::vector<std::uint64_t>& residues);

    const std::vector<bool>& prefix() const { return prefix_; }
    const std::vector<bool>& period() const { return period_; }

    bool contains(std::uint64_t n) const;
    bool is_empty() const;
    bool is_infinite() const;

    PeriodicSet intersect(const PeriodicSet& other) const;
    PeriodicSet unite(const PeriodicSet& other) const;
    PeriodicSet complement() const;
    bool subset_of(const PeriodicSet& other) const;
    bool finite_intersection(const PeriodicSet& other) const;
    bool splits(const PeriodicSet& other) const;

    // The two infinite halves of an infinite set: elements at even and odd
    // positions of the increasing enumeration.
    std::pair<PeriodicSet, PeriodicSet> parity_split() const;

    bool operator==(const PeriodicSet&) const = default;

  private:
    std::vector<bool> prefix_;
    std::vector<bool> period_;

    void canonicalize();
};

std::ostream& operator<<(std::ostream& os, const PeriodicSet& s);

// A finitely splitting tree on the naturals with an eventually periodic
// branching pattern above a single stem: level i of the cone allows exactly
// pattern[(i - |stem|) mod |pattern|] as successors.
class PeriodicTree {
  public:
    PeriodicTree();  // full binary-branching tree {0,1}*
    PeriodicTree(std::vector<std::uint64_t> stem,
                 std::vector<std::vector<std::uint64_t>> pattern);

    const std::vector<std::uint64_t>& stem() const { return stem_; }
    const std::vector<std::vector<std::uint64_t>>& pattern() const { return pattern_; }

    bool contains(const std::vector<std::uint64_t>& node) const;
    std::vector<std::uint64_t> allowed_at(std::uint64_t level) const;

    // Almost disjointness: the node intersection is finite exactly when the
    // trees share no branch.
    bool almost_disjoint(const PeriodicTree& other) const;
    bool branch_member(const EPReal& x) const;

    bool operator==(const PeriodicTree&) const = default;

  private:
    std::vector<std::uint64_t> stem_;
    std::vector<std::vector<std::uint64_t>> pattern_;
};

std::ostream& operator<<(std::ostream& os, const PeriodicTree& t);

using Backend = std::variant<EPReal, PeriodicSet, EAPermutation, PeriodicTree>;

enum class BackendKind { Real, Set, Permutation, Tree };

BackendKind backend_kind(const Backend& b);

// An arithmetical type: the family predicate ψ_n over (n+1)-tuples of
// members, the intruder predicate χ_n over a candidate and n members, the
// backends they expect, and documentation-grade bounded formula templates.
struct ArithmeticalType {
    std::string name;
    BackendKind member_kind = BackendKind::Real;
    BackendKind intruder_kind = BackendKind::Real;
    // tuple.size() = n + 1; unspecified n default to true.
    std::function<bool(const std::vector<Backend>&)> psi;
    // members.size() = n; includes the n = 0 clause.
    std::function<bool(const Backend&, const std::vector<Backend>&)> chi;
    std::map<std::size_t, Formula> psi_templates;
    std::map<std::size_t, Formula> chi_templates;
};

// Registered names: mad, med, adfs, mcg, independent, ultrafilter_subbasis,
// unbounded, dominating, splitting, reaping. Throws UnknownType otherwise.
ArithmeticalType builtin_type(const std::string& name);
std::vector<std::string> builtin_type_names();

struct FamilyInstance {
    std::vector<Backend> members;
};

// ψ_n over every (n+1)-subset in index order, for n+1 ≤ |F|.
bool is_of_type(const ArithmeticalType& t, const FamilyInstance& F);

// χ_n over every n-subset, n ≤ |F|, including the n = 0 clause.
bool is_intruder(const ArithmeticalType& t, const Backend& g, const FamilyInstance& F);

// ---------------------------------------------------------------------------
// Elimination engines

struct EliminationRound {
    std::string tag;  // ed.k | ed.h | ad.k | ad.point | ad.block
    ProductCondition condition;
    std::uint64_t k = 0;                        // extracted bound, k rounds
    std::map<std::uint64_t, std::uint64_t> h;   // ed.h: the new block of f
    std::vector<std::uint64_t> points;          // ad: collected values
    std::vector<McgAgreement> agreements;       // per-cell forced decisions
    std::vector<EngineCheck> checks;
};

struct EliminationTrace {
    std::vector<EliminationRound> rounds;
    std::optional<EPReal> completed;            // ed: the total real
    std::optional<PeriodicSet> new_member;      // ad finite branch: D or E
    std::vector<std::vector<std::uint64_t>> blocks;  // ad infinite branch

    bool all_ok() const {
        for (const auto& r : rounds) {
            for (const auto& c : r.checks) {
                if (!c.ok) return false;
            }
        }
        return true;
    }
};

// Eventually-different elimination: phase 1 extracts per-member agreement
// bounds k_n through the forcing engine and amalgamation; phase 2 builds an
// interval partition and a partial function h deciding the code on each
// interval cell by cell, filling the rest with the least value avoiding the
// processed members. The trace carries the completed eventually periodic
// real, which extends the family.
EliminationTrace ed_eliminate(const std::vector<EPReal>& family,
                              const ProductCondition& p, const Code& g,
                              std::size_t rounds);

enum class AdMode { FiniteBranch, InfiniteBranch };

// Almost-disjoint elimination. The finite branch splits the complement of
// the family union into two halves and forces infinitely many decided points
// of the code into one of them (one point per round); the infinite branch
// alternates value-bound extraction with block collection, recording the
// disjointness of each block from the processed members.
EliminationTrace ad_eliminate(const std::vector<PeriodicSet>& family,
                              const ProductCondition& p, const Code& g,
                              std::size_t rounds, AdMode mode = AdMode::InfiniteBranch);

std::vector<std::string> trace_log(const EliminationTrace& trace);

}  // namespace sacks
