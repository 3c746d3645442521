#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sacks/codes.hpp"
#include "sacks/common.hpp"
#include "sacks/products.hpp"
#include "sacks/words.hpp"

namespace sacks {

// Witness for one domain/range extension step: the computed bound M, the
// added pair, the extended injection, and the words whose fixpoint sets were
// certified unchanged up to verified_bound.
struct ExtensionCertificate {
    std::uint64_t M = 0;
    std::pair<std::uint64_t, std::uint64_t> chosen;  // (n, m) added to s
    PartialInjection t;
    std::vector<Word> checked_words;
    std::uint64_t verified_bound = 0;
};

// Least M with (M1) dom(s) ∪ ran(s) ∪ {n} ⊆ M, (M2) the ρ(u_i)-images of
// that set below M, (M3) the same for inverse images, (M4) fix(ρ(u_i)) ⊆ M,
// over all A-blocks u_i of all words in W0. Pure powers contribute only (M1).
// Throws NotNice when a word has no nice decomposition, InfiniteFix when a
// block has cofinal fixpoints.
std::uint64_t bound_M(const Representation& rho, const PartialInjection& s,
                      const std::vector<Word>& W0, std::uint64_t n);

// Adds n to the domain with the least admissible image: at least M when W0
// contains block words, outside dom(s) ∪ ran(s) ∪ {n} when it contains pure
// powers, least value outside ran(s) otherwise. The certificate is verified
// before it is returned.
ExtensionCertificate extend_domain(const Representation& rho, const PartialInjection& s,
                                   const std::vector<Word>& W0, std::uint64_t n);

// The mirror step through the x ↔ x^{-1} involution: runs extend_domain on
// s^{-1} with the perp'd words and transposes the result.
ExtensionCertificate extend_range(const Representation& rho, const PartialInjection& s,
                                  const std::vector<Word>& W0, std::uint64_t m);

// Exhaustive fixpoint-preservation oracle: for every w in W0 and k < bound,
// k is a defined fixpoint of ρ[s](w) exactly when it is one of ρ[t](w).
bool verify_preserved(const Representation& rho, const PartialInjection& s,
                      const PartialInjection& t, const std::vector<Word>& W0,
                      std::uint64_t bound);

// Exact fixpoint set of ρ[f](w) for a finite partial x-value: the scan
// horizon is derived from the displacement bounds of the alphabet
// permutations, beyond which no evaluation chain can return to its start.
std::set<std::uint64_t> partial_fixpoints(const Representation& rho,
                                          const PartialInjection& f, const Word& w);

// Nice words in length-then-lex order; subwords always precede their hosts.
std::vector<Word> enumerate_nice_words(const Representation& rho, std::size_t count);

struct EngineCheck {
    std::string name;
    bool ok = false;
    std::string detail;
};

struct McgAgreement {
    SuitableFunction cell;
    std::uint64_t index = 0;  // the fresh point l
    std::uint64_t value = 0;  // the decided g(l) = f(l)
};

struct McgRound {
    Word word;
    std::uint64_t K = 0;
    PartialInjection f;
    ProductCondition p_next;
    std::vector<McgAgreement> agreements;
    std::vector<EngineCheck> checks;
};

struct McgTrace {
    std::vector<McgRound> rounds;

    bool all_ok() const {
        for (const auto& r : rounds) {
            for (const auto& c : r.checks) {
                if (!c.ok) return false;
            }
        }
        return true;
    }
};

// Finite-round maximal-cofinitary-group elimination: per round n, extends f
// so n sits in its domain and range (preserving earlier words' fixpoints),
// bounds the fixpoints of the n-th nice word when it has a single x, and
// sweeps the level-n suitable cells to force one fresh agreement point
// between f and the code per cell. Rounds record checks (1)-(4).
McgTrace mcg_eliminate(const Representation& rho, const ProductCondition& p,
                       const Code& g, std::size_t rounds);

// Line-oriented trace log shared by the CLI and golden tests.
std::vector<std::string> trace_log(const McgTrace& trace);
std::vector<std::string> certificate_log(const ExtensionCertificate& cert);

}  // namespace sacks
