#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "sacks/common.hpp"

namespace sacks {

// One letter of a group word: a generator symbol with exponent ±1. The symbol
// "x" is reserved for the distinguished generator adjoined to the alphabet.
struct Letter {
    std::string sym;
    int exp = 1;

    bool operator==(const Letter&) const = default;
    auto operator<=>(const Letter&) const = default;
};

struct Word {
    std::vector<Letter> letters;

    static Word empty() { return {}; }
    // Parses "a x^-1 b" style syntax: whitespace-separated letters, each an
    // identifier with an optional ^-1 (or ^1) suffix.
    static Word parse(const std::string& text);

    std::size_t size() const { return letters.size(); }
    bool is_empty() const { return letters.empty(); }
    std::size_t x_degree() const;
    bool mentions_x() const;

    Word concat(const Word& other) const;  // no reduction
    Word inverse() const;
    Word subrange(std::size_t from, std::size_t to) const;

    std::string str() const;

    bool operator==(const Word&) const = default;
    auto operator<=>(const Word&) const = default;
};

std::ostream& operator<<(std::ostream& os, const Word& w);

// The unique reduced form: cancel adjacent inverse pairs to a fixpoint.
Word reduce(const Word& w);

// Swap x and x^{-1}, leaving alphabet letters alone. An involution.
Word perp(const Word& w);

// A finite partial injection on the naturals.
class PartialInjection {
  public:
    PartialInjection() = default;
    explicit PartialInjection(std::map<std::uint64_t, std::uint64_t> pairs);

    const std::map<std::uint64_t, std::uint64_t>& pairs() const { return pairs_; }
    std::size_t size() const { return pairs_.size(); }

    std::optional<std::uint64_t> apply(std::uint64_t n) const;
    std::optional<std::uint64_t> apply_inverse(std::uint64_t m) const;
    bool defined(std::uint64_t n) const { return pairs_.count(n) > 0; }
    bool hits(std::uint64_t m) const;

    std::set<std::uint64_t> domain() const;
    std::set<std::uint64_t> range() const;

    // Throws BadInput if the extension breaks injectivity or functionality.
    PartialInjection extended(std::uint64_t n, std::uint64_t m) const;
    PartialInjection inverse() const;

    bool extends(const PartialInjection& other) const;

    bool operator==(const PartialInjection&) const = default;

  private:
    std::map<std::uint64_t, std::uint64_t> pairs_;
};

std::ostream& operator<<(std::ostream& os, const PartialInjection& f);

// An eventually residue-affine permutation of the naturals: an explicit
// injective table below the threshold, and n ↦ n + offsets[n mod period]
// beyond it. The class is closed under composition and inverse, global
// bijectivity is checked on construction, and fixpoint finiteness is
// decidable from the tail offsets.
class EAPermutation {
  public:
    EAPermutation();  // identity

    static EAPermutation from_parts(std::uint64_t threshold,
                                    std::vector<std::int64_t> offsets,
                                    std::map<std::uint64_t, std::uint64_t> table);
    // The involution swapping 2k and 2k+1.
    static EAPermutation pair_swap();
    // Finite cycle on the given values, identity elsewhere.
    static EAPermutation cycle(const std::vector<std::uint64_t>& values);

    std::uint64_t threshold() const { return threshold_; }
    std::uint64_t period() const { return offsets_.size(); }
    const std::vector<std::int64_t>& offsets() const { return offsets_; }
    const std::map<std::uint64_t, std::uint64_t>& table() const { return table_; }

    std::uint64_t apply(std::uint64_t n) const;
    std::uint64_t apply_inverse(std::uint64_t m) const;

    EAPermutation compose(const EAPermutation& g) const;  // this after g
    EAPermutation inverse() const;

    bool is_identity() const;

    // Residue classes with a zero tail offset: each carries cofinally many
    // fixpoints, so the fixpoint set is finite iff this is empty.
    std::vector<std::uint64_t> zero_offset_classes() const;
    std::set<std::uint64_t> fixpoints_below(std::uint64_t bound) const;
    // All fixpoints when there are finitely many; throws InfiniteFix else.
    std::set<std::uint64_t> finite_fixpoints() const;

    bool operator==(const EAPermutation&) const = default;

  private:
    std::uint64_t threshold_ = 0;
    std::vector<std::int64_t> offsets_{0};
    std::map<std::uint64_t, std::uint64_t> table_;

    void canonicalize();
    void validate() const;
};

std::ostream& operator<<(std::ostream& os, const EAPermutation& p);

using XValue = std::variant<PartialInjection, EAPermutation>;

// ρ: alphabet → permutations, with an optional value for x.
struct Representation {
    std::map<std::string, EAPermutation> alphabet;
    std::optional<XValue> x_value;

    Representation with_x(XValue x) const {
        Representation r = *this;
        r.x_value = std::move(x);
        return r;
    }
    Representation without_x() const {
        Representation r = *this;
        r.x_value.reset();
        return r;
    }
    bool x_total() const {
        return x_value && std::holds_alternative<EAPermutation>(*x_value);
    }
};

// Right-to-left application of the word. Undefinedness propagates from
// partial x lookups. Throws MissingX when the word mentions x but no value is
// set, BadInput for unknown alphabet symbols.
std::optional<std::uint64_t> evaluate(const Representation& rho, const Word& w,
                                      std::uint64_t n);

// True when every letter has a total backend (alphabet letters, and x only if
// its value is an EAPermutation).
bool totally_evaluable(const Representation& rho, const Word& w);

// Folds a totally evaluable word into one EAPermutation.
EAPermutation compose_word(const Representation& rho, const Word& w);

struct FixReport {
    enum class Tail { Finite, Cofinal, UnknownPartial };
    std::set<std::uint64_t> fixpoints;  // below the requested bound
    Tail tail = Tail::Finite;
    std::vector<std::uint64_t> cofinal_classes;  // residues mod `period`
    std::uint64_t period = 1;
};

FixReport fix_report(const Representation& rho, const Word& w, std::uint64_t bound);

// Exact finite form of the cyclic-rotation fixpoint bijection: for every
// n < bound, n fixes ρ(uv) exactly when ρ(v)(n) fixes ρ(vu).
bool conjugation_check(const Representation& rho, const Word& u, const Word& v,
                       std::uint64_t bound);

// A nice word is x^{±n} or u_l x^{k_l} … u_0 x^{k_0} with every A-block
// outside the kernel of ρ. Blocks are stored leftmost-first.
struct NiceDecomposition {
    std::optional<std::int64_t> pure_power;
    std::vector<std::pair<Word, std::int64_t>> blocks;
    std::uint64_t degree = 0;
};

std::optional<NiceDecomposition> is_nice(const Representation& rho, const Word& w);

struct SplitResult {
    enum class Class { InWA, Nice };
    Word u, v;      // w = u·v without reducing
    Word rotated;   // ~ρ-equivalent to v·u, in W_A or nice
    Class cls;
};

// Rotation search from the splitting lemma: try every split w = u·v, reduce
// v·u and delete kernel A-blocks, then pick the candidate of minimal length,
// minimal trailing A-part, leftmost split. Words in W_A win outright.
SplitResult split_to_nice(const Representation& rho, const Word& w);

// Sweeps every reduced word up to max_len over the alphabet plus x: each must
// evaluate to the identity or have finitely many fixpoints, and each word is
// cross-checked against its split_to_nice image via conjugation_check.
Report cofinitary_audit(const Representation& rho, const EAPermutation& x_value,
                        std::size_t max_len, std::uint64_t bound);

// All reduced words over the representation's alphabet (plus x when
// include_x) of length 1..max_len, ordered by length then lexicographically.
std::vector<Word> enumerate_reduced_words(const Representation& rho, bool include_x,
                                          std::size_t max_len);

}  // namespace sacks
