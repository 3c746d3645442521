#include "sacks/families.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>

namespace sacks {

// ---------------------------------------------------------------------------
// PeriodicSet

PeriodicSet::PeriodicSet() : period_{false} {}

PeriodicSet::PeriodicSet(std::vector<bool> prefix, std::vector<bool> period)
    : prefix_(std::move(prefix)), period_(std::move(period)) {
    if (period_.empty()) {
        throw Error(ErrorKind::BadInput, "periodic set needs a nonempty period");
    }
    canonicalize();
}

PeriodicSet PeriodicSet::evens() { return PeriodicSet({}, {true, false}); }

PeriodicSet PeriodicSet::full() { return PeriodicSet({}, {true}); }

PeriodicSet PeriodicSet::from_residues(std::uint64_t modulus,
                                       const std::vector<std::uint64_t>& residues) {
    if (modulus == 0) {
        throw Error(ErrorKind::BadInput, "modulus must be positive");
    }
    std::vector<bool> period(modulus, false);
    for (std::uint64_t r : residues) period[r % modulus] = true;
    return PeriodicSet({}, std::move(period));
}

void PeriodicSet::canonicalize() {
    for (;;) {
        // Smallest repeating divisor of the period.
        std::size_t L = period_.size();
        for (std::size_t cand = 1; cand < L; ++cand) {
            if (L % cand != 0) continue;
            bool repeats = true;
            for (std::size_t i = 0; i < L && repeats; ++i) {
                repeats = period_[i] == period_[i % cand];
            }
            if (repeats) {
                period_.resize(cand);
                break;
            }
        }
        // Absorb prefix bits that already match the rotated period.
        bool absorbed = false;
        while (!prefix_.empty() && prefix_.back() == period_.back()) {
            prefix_.pop_back();
            bool last = period_.back();
            period_.pop_back();
            period_.insert(period_.begin(), last);
            absorbed = true;
        }
        if (!absorbed) return;
    }
}

bool PeriodicSet::contains(std::uint64_t n) const {
    if (n < prefix_.size()) return prefix_[n];
    return period_[(n - prefix_.size()) % period_.size()];
}

bool PeriodicSet::is_empty() const {
    return std::none_of(prefix_.begin(), prefix_.end(), [](bool b) { return b; }) &&
           std::none_of(period_.begin(), period_.end(), [](bool b) { return b; });
}

bool PeriodicSet::is_infinite() const {
    return std::any_of(period_.begin(), period_.end(), [](bool b) { return b; });
}

namespace {

PeriodicSet combine(const PeriodicSet& a, const PeriodicSet& b,
                    const std::function<bool(bool, bool)>& op) {
    std::size_t P = std::max(a.prefix().size(), b.prefix().size());
    std::size_t L = std::lcm(a.period().size(), b.period().size());
    std::vector<bool> prefix(P);
    for (std::size_t i = 0; i < P; ++i) prefix[i] = op(a.contains(i), b.contains(i));
    std::vector<bool> period(L);
    for (std::size_t k = 0; k < L; ++k) {
        period[k] = op(a.contains(P + k), b.contains(P + k));
    }
    return PeriodicSet(std::move(prefix), std::move(period));
}

}  // namespace

PeriodicSet PeriodicSet::intersect(const PeriodicSet& other) const {
    return combine(*this, other, [](bool x, bool y) { return x && y; });
}

PeriodicSet PeriodicSet::unite(const PeriodicSet& other) const {
    return combine(*this, other, [](bool x, bool y) { return x || y; });
}

PeriodicSet PeriodicSet::complement() const {
    std::vector<bool> prefix = prefix_;
    prefix.flip();
    std::vector<bool> period = period_;
    period.flip();
    return PeriodicSet(std::move(prefix), std::move(period));
}

bool PeriodicSet::subset_of(const PeriodicSet& other) const {
    return intersect(other.complement()).is_empty();
}

bool PeriodicSet::finite_intersection(const PeriodicSet& other) const {
    return !intersect(other).is_infinite();
}

bool PeriodicSet::splits(const PeriodicSet& other) const {
    return intersect(other).is_infinite() &&
           complement().intersect(other).is_infinite();
}

std::pair<PeriodicSet, PeriodicSet> PeriodicSet::parity_split() const {
    if (!is_infinite()) {
        throw Error(ErrorKind::BadInput, "parity split needs an infinite set");
    }
    std::size_t P = prefix_.size();
    std::size_t L = period_.size();
    std::vector<bool> dpre(P), epre(P), dper(2 * L), eper(2 * L);
    std::uint64_t count = 0;
    for (std::size_t pos = 0; pos < P + 2 * L; ++pos) {
        if (contains(pos)) {
            bool even = count % 2 == 0;
            if (pos < P) {
                (even ? dpre : epre)[pos] = true;
            } else {
                (even ? dper : eper)[pos - P] = true;
            }
            ++count;
        }
    }
    return {PeriodicSet(std::move(dpre), std::move(dper)),
            PeriodicSet(std::move(epre), std::move(eper))};
}

std::ostream& operator<<(std::ostream& os, const PeriodicSet& s) {
    os << "set{";
    for (bool b : s.prefix()) os << (b ? '1' : '0');
    os << '|';
    for (bool b : s.period()) os << (b ? '1' : '0');
    return os << '}';
}

// ---------------------------------------------------------------------------
// PeriodicTree

PeriodicTree::PeriodicTree() : pattern_{{0, 1}} {}

PeriodicTree::PeriodicTree(std::vector<std::uint64_t> stem,
                           std::vector<std::vector<std::uint64_t>> pattern)
    : stem_(std::move(stem)), pattern_(std::move(pattern)) {
    if (pattern_.empty()) {
        throw Error(ErrorKind::BadInput, "tree pattern must be nonempty");
    }
    for (auto& level : pattern_) {
        if (level.empty()) {
            throw Error(ErrorKind::BadInput, "tree pattern level must be nonempty");
        }
        std::sort(level.begin(), level.end());
        level.erase(std::unique(level.begin(), level.end()), level.end());
    }
}

std::vector<std::uint64_t> PeriodicTree::allowed_at(std::uint64_t level) const {
    if (level < stem_.size()) return {stem_[level]};
    return pattern_[(level - stem_.size()) % pattern_.size()];
}

bool PeriodicTree::contains(const std::vector<std::uint64_t>& node) const {
    for (std::size_t i = 0; i < node.size(); ++i) {
        auto allowed = allowed_at(i);
        if (!std::binary_search(allowed.begin(), allowed.end(), node[i])) return false;
    }
    return true;
}

bool PeriodicTree::almost_disjoint(const PeriodicTree& other) const {
    // Finitely splitting trees share infinitely many nodes exactly when they
    // share a branch, i.e. when every level admits a common successor.
    std::uint64_t horizon = std::max(stem_.size(), other.stem_.size()) +
                            std::lcm(pattern_.size(), other.pattern_.size());
    for (std::uint64_t level = 0; level < horizon; ++level) {
        auto a = allowed_at(level);
        auto b = other.allowed_at(level);
        std::vector<std::uint64_t> common;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                              std::back_inserter(common));
        if (common.empty()) return true;
    }
    return false;
}

bool PeriodicTree::branch_member(const EPReal& x) const {
    std::uint64_t horizon = std::max<std::uint64_t>(stem_.size(), x.prefix.size()) +
                            std::lcm<std::uint64_t>(pattern_.size(), x.period.size());
    for (std::uint64_t level = 0; level < horizon; ++level) {
        auto allowed = allowed_at(level);
        if (!std::binary_search(allowed.begin(), allowed.end(), x.at(level))) {
            return false;
        }
    }
    return true;
}

std::ostream& operator<<(std::ostream& os, const PeriodicTree& t) {
    os << "tree{stem=[";
    for (std::size_t i = 0; i < t.stem().size(); ++i) {
        if (i) os << ',';
        os << t.stem()[i];
    }
    os << "],pattern=[";
    for (std::size_t i = 0; i < t.pattern().size(); ++i) {
        if (i) os << ';';
        for (std::size_t j = 0; j < t.pattern()[i].size(); ++j) {
            if (j) os << ',';
            os << t.pattern()[i][j];
        }
    }
    return os << "]}";
}

// ---------------------------------------------------------------------------
// Backends and the registry

BackendKind backend_kind(const Backend& b) {
    if (std::holds_alternative<EPReal>(b)) return BackendKind::Real;
    if (std::holds_alternative<PeriodicSet>(b)) return BackendKind::Set;
    if (std::holds_alternative<EAPermutation>(b)) return BackendKind::Permutation;
    return BackendKind::Tree;
}

namespace {

const EPReal& as_real(const Backend& b) {
    if (const auto* r = std::get_if<EPReal>(&b)) return *r;
    throw Error(ErrorKind::BackendMismatch, "expected a real backend");
}

const PeriodicSet& as_set(const Backend& b) {
    if (const auto* s = std::get_if<PeriodicSet>(&b)) return *s;
    throw Error(ErrorKind::BackendMismatch, "expected a set backend");
}

const EAPermutation& as_perm(const Backend& b) {
    if (const auto* p = std::get_if<EAPermutation>(&b)) return *p;
    throw Error(ErrorKind::BackendMismatch, "expected a permutation backend");
}

const PeriodicTree& as_tree(const Backend& b) {
    if (const auto* t = std::get_if<PeriodicTree>(&b)) return *t;
    throw Error(ErrorKind::BackendMismatch, "expected a tree backend");
}

bool eventually_different(const EPReal& f, const EPReal& g) {
    std::uint64_t start = std::max(f.prefix.size(), g.prefix.size());
    std::uint64_t window = std::lcm(f.period.size(), g.period.size());
    for (std::uint64_t i = start; i < start + window; ++i) {
        if (f.at(i) == g.at(i)) return false;
    }
    return true;
}

// f(n) < g(n) for all but finitely many n.
bool eventually_dominated(const EPReal& f, const EPReal& g) {
    std::uint64_t start = std::max(f.prefix.size(), g.prefix.size());
    std::uint64_t window = std::lcm(f.period.size(), g.period.size());
    for (std::uint64_t i = start; i < start + window; ++i) {
        if (f.at(i) >= g.at(i)) return false;
    }
    return true;
}

// The n-th word (1-based) over letter symbols "0","1",…, in length-then-lex
// order, restricted to words whose letters stay at or below index n.
Word mcg_word(std::size_t n, std::size_t alphabet_cap = 10) {
    std::vector<Letter> letters;
    for (std::size_t i = 0; i < alphabet_cap; ++i) {
        letters.push_back({std::to_string(i), 1});
        letters.push_back({std::to_string(i), -1});
    }
    std::size_t seen = 0;
    std::vector<Word> frontier{Word::empty()};
    for (std::size_t len = 1; len <= 12; ++len) {
        std::vector<Word> next;
        for (const Word& w : frontier) {
            for (const Letter& l : letters) {
                if (!w.letters.empty() && w.letters.back().sym == l.sym &&
                    w.letters.back().exp == -l.exp) {
                    continue;
                }
                Word grown = w;
                grown.letters.push_back(l);
                next.push_back(std::move(grown));
            }
        }
        for (const Word& w : next) {
            bool legal = true;
            for (const Letter& l : w.letters) {
                if (std::stoull(l.sym) > n) legal = false;
            }
            if (!legal) continue;
            if (++seen == n) return w;
        }
        frontier = std::move(next);
    }
    throw Error(ErrorKind::BadInput, "word enumeration exhausted");
}

bool word_is_cofinitary_or_id(const std::vector<const EAPermutation*>& assignment,
                              const Word& w) {
    Representation rho;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        rho.alphabet[std::to_string(i)] = *assignment[i];
    }
    EAPermutation composed = compose_word(rho, w);
    return composed.is_identity() || composed.zero_offset_classes().empty();
}

Formula ed_template(std::size_t candidate, std::size_t other, std::uint64_t horizon) {
    return Formula::exists(
        "m", Term::lit(horizon),
        Formula::forall(
            "n", Term::lit(horizon),
            Formula::disj(Formula::cmp(CmpOp::Lt, Term::var("n"), Term::var("m", 1)),
                          Formula::neg(Formula::cmp(
                              CmpOp::Eq, Term::param_at(candidate, Term::var("n")),
                              Term::param_at(other, Term::var("n")))))));
}

Formula domination_template(std::size_t lower, std::size_t upper, std::uint64_t horizon) {
    return Formula::exists(
        "m", Term::lit(horizon),
        Formula::forall(
            "n", Term::lit(horizon),
            Formula::disj(Formula::cmp(CmpOp::Lt, Term::var("n"), Term::var("m", 1)),
                          Formula::cmp(CmpOp::Lt, Term::param_at(lower, Term::var("n")),
                                       Term::param_at(upper, Term::var("n"))))));
}

constexpr std::uint64_t kTemplateHorizon = 32;

}  // namespace

ArithmeticalType builtin_type(const std::string& name) {
    ArithmeticalType t;
    t.name = name;
    t.psi = [](const std::vector<Backend>&) { return true; };
    t.chi = [](const Backend&, const std::vector<Backend>&) { return true; };
    if (name == "mad") {
        t.member_kind = BackendKind::Set;
        t.intruder_kind = BackendKind::Set;
        t.psi = [](const std::vector<Backend>& tuple) {
            if (tuple.size() == 1) return as_set(tuple[0]).is_infinite();
            if (tuple.size() == 2) {
                return as_set(tuple[0]).finite_intersection(as_set(tuple[1]));
            }
            PeriodicSet u;
            for (const Backend& b : tuple) u = u.unite(as_set(b));
            return u.complement().is_infinite();
        };
        t.chi = [](const Backend& g, const std::vector<Backend>& members) {
            if (members.empty()) return as_set(g).is_infinite();
            if (members.size() == 1) {
                return as_set(g).finite_intersection(as_set(members[0]));
            }
            return true;
        };
    } else if (name == "med") {
        t.member_kind = BackendKind::Real;
        t.intruder_kind = BackendKind::Real;
        t.psi = [](const std::vector<Backend>& tuple) {
            if (tuple.size() != 2) return true;
            return eventually_different(as_real(tuple[0]), as_real(tuple[1]));
        };
        t.chi = [](const Backend& g, const std::vector<Backend>& members) {
            if (members.size() != 1) return true;
            return eventually_different(as_real(g), as_real(members[0]));
        };
        t.psi_templates[1] = ed_template(0, 1, kTemplateHorizon);
        t.chi_templates[1] = ed_template(0, 1, kTemplateHorizon);
    } else if (name == "adfs") {
        t.member_kind = BackendKind::Tree;
        t.intruder_kind = BackendKind::Real;
        t.psi = [](const std::vector<Backend>& tuple) {
            if (tuple.size() != 2) return true;
            return as_tree(tuple[0]).almost_disjoint(as_tree(tuple[1]));
        };
        t.chi = [](const Backend& g, const std::vector<Backend>& members) {
            if (members.size() != 1) return true;
            return !as_tree(members[0]).branch_member(as_real(g));
        };
    } else if (name == "mcg") {
        t.member_kind = BackendKind::Permutation;
        t.intruder_kind = BackendKind::Permutation;
        t.psi = [](const std::vector<Backend>& tuple) {
            if (tuple.size() < 2) return true;
            std::size_t n = tuple.size() - 1;
            std::vector<const EAPermutation*> assignment;
            for (const Backend& b : tuple) assignment.push_back(&as_perm(b));
            return word_is_cofinitary_or_id(assignment, mcg_word(n));
        };
        t.chi = [](const Backend& g, const std::vector<Backend>& members) {
            if (members.empty()) return true;
            std::size_t n = members.size();
            std::vector<const EAPermutation*> assignment{&as_perm(g)};
            for (const Backend& b : members) assignment.push_back(&as_perm(b));
            return word_is_cofinitary_or_id(assignment, mcg_word(n));
        };
    } else if (name == "independent") {
        t.member_kind = BackendKind::Set;
        t.intruder_kind = BackendKind::Set;
        auto combos_infinite = [](const std::vector<const PeriodicSet*>& sets) {
            for (std::uint64_t mask = 0; mask < (1ull << sets.size()); ++mask) {
                PeriodicSet acc = PeriodicSet::full();
                for (std::size_t i = 0; i < sets.size(); ++i) {
                    acc = acc.intersect(mask & (1ull << i) ? sets[i]->complement()
                                                           : *sets[i]);
                }
                if (!acc.is_infinite()) return false;
            }
            return true;
        };
        t.psi = [combos_infinite](const std::vector<Backend>& tuple) {
            if (tuple.size() == 1) return as_set(tuple[0]).is_infinite();
            std::vector<const PeriodicSet*> sets;
            for (const Backend& b : tuple) sets.push_back(&as_set(b));
            return combos_infinite(sets);
        };
        t.chi = [combos_infinite](const Backend& g, const std::vector<Backend>& members) {
            if (members.empty()) return as_set(g).is_infinite();
            std::vector<const PeriodicSet*> sets{&as_set(g)};
            for (const Backend& b : members) sets.push_back(&as_set(b));
            return combos_infinite(sets);
        };
    } else if (name == "ultrafilter_subbasis") {
        t.member_kind = BackendKind::Set;
        t.intruder_kind = BackendKind::Set;
        t.psi = [](const std::vector<Backend>& tuple) {
            if (tuple.size() == 1) return as_set(tuple[0]).is_infinite();
            PeriodicSet acc = PeriodicSet::full();
            for (const Backend& b : tuple) acc = acc.intersect(as_set(b));
            return acc.is_infinite();
        };
        t.chi = [](const Backend& g, const std::vector<Backend>& members) {
            if (members.empty()) return as_set(g).is_infinite();
            PeriodicSet acc = PeriodicSet::full();
            for (const Backend& b : members) acc = acc.intersect(as_set(b));
            return !acc.subset_of(as_set(g)) && !acc.subset_of(as_set(g).complement());
        };
    } else if (name == "unbounded") {
        t.member_kind = BackendKind::Real;
        t.intruder_kind = BackendKind::Real;
        t.chi = [](const Backend& g, const std::vector<Backend>& members) {
            if (members.size() != 1) return true;
            return eventually_dominated(as_real(members[0]), as_real(g));
        };
        t.chi_templates[1] = domination_template(1, 0, kTemplateHorizon);
    } else if (name == "dominating") {
        t.member_kind = BackendKind::Real;
        t.intruder_kind = BackendKind::Real;
        t.chi = [](const Backend& g, const std::vector<Backend>& members) {
            if (members.size() != 1) return true;
            return !eventually_dominated(as_real(g), as_real(members[0]));
        };
        t.chi_templates[1] = Formula::neg(domination_template(0, 1, kTemplateHorizon));
    } else if (name == "splitting") {
        t.member_kind = BackendKind::Set;
        t.intruder_kind = BackendKind::Set;
        t.psi = [](const std::vector<Backend>& tuple) {
            if (tuple.size() != 1) return true;
            return as_set(tuple[0]).is_infinite();
        };
        t.chi = [](const Backend& g, const std::vector<Backend>& members) {
            if (members.empty()) return as_set(g).is_infinite();
            if (members.size() == 1) return !as_set(members[0]).splits(as_set(g));
            return true;
        };
    } else if (name == "reaping") {
        t.member_kind = BackendKind::Set;
        t.intruder_kind = BackendKind::Set;
        t.psi = [](const std::vector<Backend>& tuple) {
            if (tuple.size() != 1) return true;
            return as_set(tuple[0]).is_infinite();
        };
        t.chi = [](const Backend& g, const std::vector<Backend>& members) {
            if (members.empty()) return as_set(g).is_infinite();
            if (members.size() == 1) return as_set(g).splits(as_set(members[0]));
            return true;
        };
    } else {
        throw Error(ErrorKind::UnknownType, "unknown arithmetical type '" + name + "'");
    }
    return t;
}

std::vector<std::string> builtin_type_names() {
    return {"mad",        "med",       "adfs",      "mcg",      "independent",
            "ultrafilter_subbasis", "unbounded", "dominating", "splitting", "reaping"};
}

namespace {

void check_kind(BackendKind expected, const Backend& b) {
    if (backend_kind(b) != expected) {
        throw Error(ErrorKind::BackendMismatch, "backend kind mismatch");
    }
}

// Visits every k-subset of [0, n) in ascending index order.
void for_each_subset(std::size_t n, std::size_t k,
                     const std::function<void(const std::vector<std::size_t>&)>& fn) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
        fn(idx);
        std::size_t i = k;
        while (i > 0) {
            --i;
            if (idx[i] + (k - i) < n) {
                ++idx[i];
                for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
                break;
            }
            if (i == 0) return;
        }
        if (k == 0) return;
    }
}

}  // namespace

bool is_of_type(const ArithmeticalType& t, const FamilyInstance& F) {
    for (const Backend& b : F.members) check_kind(t.member_kind, b);
    for (std::size_t i = 0; i < F.members.size(); ++i) {
        for (std::size_t j = i + 1; j < F.members.size(); ++j) {
            if (F.members[i] == F.members[j]) {
                throw Error(ErrorKind::BadInput, "family members must be distinct");
            }
        }
    }
    bool ok = true;
    for (std::size_t size = 1; size <= F.members.size() && ok; ++size) {
        for_each_subset(F.members.size(), size, [&](const std::vector<std::size_t>& idx) {
            if (!ok) return;
            std::vector<Backend> tuple;
            tuple.reserve(idx.size());
            for (std::size_t i : idx) tuple.push_back(F.members[i]);
            if (!t.psi(tuple)) ok = false;
        });
    }
    return ok;
}

bool is_intruder(const ArithmeticalType& t, const Backend& g, const FamilyInstance& F) {
    check_kind(t.intruder_kind, g);
    for (const Backend& b : F.members) check_kind(t.member_kind, b);
    if (!t.chi(g, {})) return false;
    bool ok = true;
    for (std::size_t size = 1; size <= F.members.size() && ok; ++size) {
        for_each_subset(F.members.size(), size, [&](const std::vector<std::size_t>& idx) {
            if (!ok) return;
            std::vector<Backend> members;
            members.reserve(idx.size());
            for (std::size_t i : idx) members.push_back(F.members[i]);
            if (!t.chi(g, members)) ok = false;
        });
    }
    return ok;
}

// ---------------------------------------------------------------------------
// Elimination engines

namespace {

std::set<std::size_t> level_support(std::size_t n) {
    std::set<std::size_t> F;
    for (std::size_t a = 0; a < n; ++a) F.insert(a);
    return F;
}

ProductCondition restrict_to_matrix(const ProductCondition& p, const Matrix& m) {
    ProductCondition out = p;
    for (std::size_t alpha = 0; alpha < m.rows.size(); ++alpha) {
        out = out.with(alpha, out.at(alpha).restrict_node(m.rows[alpha]));
    }
    return out;
}

Formula disagreement_beyond_param(std::uint64_t cut, std::uint64_t window) {
    // forall l < window . (l < cut || !(v0(l) = w0(l)))
    return Formula::forall(
        "l", Term::lit(window),
        Formula::disj(Formula::cmp(CmpOp::Lt, Term::var("l"), Term::lit(cut)),
                      Formula::neg(Formula::cmp(CmpOp::Eq,
                                                Term::code_at(0, Term::var("l")),
                                                Term::param_at(0, Term::var("l"))))));
}

std::uint64_t least_avoiding(const std::set<std::uint64_t>& excluded) {
    std::uint64_t v = 0;
    while (excluded.count(v)) ++v;
    return v;
}

}  // namespace

EliminationTrace ed_eliminate(const std::vector<EPReal>& family,
                              const ProductCondition& p, const Code& g,
                              std::size_t rounds) {
    if (!validate_code(g).ok()) {
        throw Error(ErrorKind::BadInput, "code fails validation");
    }
    for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t j = i + 1; j < family.size(); ++j) {
            if (!eventually_different(family[i], family[j])) {
                throw Error(ErrorKind::BadInput, "family is not eventually different");
            }
        }
    }
    // The "not a ground-model real" stand-in: the branch-to-output map is
    // injective at the code depth.
    {
        auto ms = branch_matrices(p, g.depth);
        std::set<std::vector<std::uint64_t>> outputs;
        for (const Matrix& m : ms) {
            if (!outputs.insert(eval_star(g, m)).second) {
                throw PremiseFailure("distinct branches share an output");
            }
        }
    }

    EliminationTrace trace;
    ProductCondition cur = p;
    std::vector<std::uint64_t> k_bounds;

    // Phase 1: one agreement bound per member. Cells are walked sequentially
    // against the updated condition; a cell is only narrowed when some of its
    // branches keep agreeing with the member at the window edge.
    for (std::size_t n = 0; n < family.size(); ++n) {
        const EPReal& member = family[n];
        std::set<std::size_t> F = level_support(n);
        EliminationRound round;
        round.tag = "ed.k";
        std::uint64_t k_round = 0;
        bool cert_ok = true;
        for (const SuitableFunction& sigma : suitable_functions(cur, F, n)) {
            ProductCondition cell = restrict_suitable(cur, sigma);
            auto ms = branch_matrices(cell, g.depth);
            std::int64_t worst = -1;
            std::int64_t best = -1;
            const Matrix* best_matrix = nullptr;
            bool best_edge = true;
            for (const Matrix& m : ms) {
                auto out = eval_star(g, m);
                std::int64_t agreement = -1;
                for (std::size_t l = 0; l < out.size(); ++l) {
                    if (out[l] == member.at(l)) agreement = static_cast<std::int64_t>(l);
                }
                bool edge = agreement + 1 == static_cast<std::int64_t>(out.size());
                worst = std::max(worst, agreement);
                if (!best_matrix || std::make_pair(edge, agreement) <
                                        std::make_pair(best_edge, best)) {
                    best = agreement;
                    best_matrix = &m;
                    best_edge = edge;
                }
            }
            std::uint64_t window = eval_star(g, *best_matrix).size();
            std::uint64_t k_sigma;
            ProductCondition certified = cell;
            if (worst + 1 < static_cast<std::int64_t>(decided_window(cell, g))) {
                // Every branch of the cell already disagrees beyond `worst`.
                k_sigma = worst < 0 ? 0 : static_cast<std::uint64_t>(worst);
                window = decided_window(cell, g);
            } else {
                if (best_edge) {
                    throw PremiseFailure(
                        "a cell keeps agreeing with a member at the window edge");
                }
                k_sigma = best < 0 ? 0 : static_cast<std::uint64_t>(best);
                certified = restrict_to_matrix(cell, *best_matrix);
                cur = amalgamate(cur, F, n, {{sigma, certified}});
            }
            auto verdict = forces(certified, {g}, {member},
                                  disagreement_beyond_param(k_sigma + 1, window));
            if (!verdict.forced_true()) cert_ok = false;
            k_round = std::max(k_round, k_sigma);
        }
        round.condition = cur;
        round.k = k_round;
        round.checks.push_back({"forces certifies the agreement bound", cert_ok, ""});
        k_bounds.push_back(k_round);
        trace.rounds.push_back(std::move(round));
    }

    // Phase 2: interval rounds below the phase-1 fusion.
    std::map<std::uint64_t, std::uint64_t> h_all;
    std::uint64_t next_start = 0;
    for (std::size_t j = 0; j < rounds; ++j) {
        std::set<std::size_t> F = level_support(j);
        auto sigmas = suitable_functions(cur, F, j);
        std::size_t N = sigmas.size();
        std::uint64_t start = next_start;
        std::uint64_t k_idx = j < k_bounds.size() ? k_bounds[j] : 0;
        std::uint64_t size = std::max<std::uint64_t>(
            {k_idx >= start ? k_idx - start + 1 : 1, N, 1});
        std::uint64_t end = start + size;

        EliminationRound round;
        round.tag = "ed.h";
        std::map<std::uint64_t, std::uint64_t> block;
        for (std::size_t i = 0; i < N; ++i) {
            ProductCondition cell = restrict_suitable(cur, sigmas[i]);
            Matrix m = branch_matrices(cell, g.depth).front();
            auto out = eval_star(g, m);
            if (end > out.size()) {
                throw BudgetExceeded("code depth cannot decide the interval");
            }
            ProductCondition pinned = restrict_to_matrix(cell, m);
            std::uint64_t l = start + i;
            block[l] = out[l];
            round.agreements.push_back({sigmas[i], l, out[l]});
            cur = amalgamate(cur, F, j, {{sigmas[i], pinned}});
        }
        for (std::uint64_t l = start + N; l < end; ++l) {
            std::set<std::uint64_t> excluded;
            for (std::size_t m2 = 0; m2 < std::min<std::size_t>(j, family.size()); ++m2) {
                excluded.insert(family[m2].at(l));
            }
            block[l] = least_avoiding(excluded);
        }
        round.condition = cur;
        round.h = block;

        bool ok1 = start == next_start;
        round.checks.push_back({"(1) interval continues the partition", ok1, ""});
        bool ok2 = j >= k_bounds.size() || k_idx <= end - 1;
        round.checks.push_back({"(2) k_n within the interval", ok2, ""});
        bool ok3 = true;
        for (std::size_t m2 = 0; m2 < std::min<std::size_t>(j, family.size()); ++m2) {
            for (const auto& [l, v] : block) {
                if (family[m2].at(l) == v) ok3 = false;
            }
        }
        round.checks.push_back({"(3) block avoids processed members", ok3, ""});
        bool ok4 = true;
        for (const auto& agree : round.agreements) {
            Verdict v = decide_value(restrict_suitable(cur, agree.cell), g, agree.index);
            if (v.kind != Verdict::Kind::Forced || v.value != agree.value) ok4 = false;
        }
        round.checks.push_back({"(4) forced agreement on the interval", ok4, ""});

        for (const auto& [l, v] : block) h_all[l] = v;
        next_start = end;
        trace.rounds.push_back(std::move(round));
    }

    // Total completion: the constructed values, then a periodic continuation
    // avoiding every member.
    {
        std::uint64_t P0 = 0;
        std::uint64_t L = 1;
        for (const EPReal& f : family) {
            P0 = std::max<std::uint64_t>(P0, f.prefix.size());
            L = std::lcm<std::uint64_t>(L, f.period.size());
        }
        std::uint64_t prefix_len = std::max(next_start, P0);
        std::vector<std::uint64_t> prefix;
        for (std::uint64_t l = 0; l < prefix_len; ++l) {
            if (auto it = h_all.find(l); it != h_all.end()) {
                prefix.push_back(it->second);
            } else {
                std::set<std::uint64_t> excluded;
                for (const EPReal& f : family) excluded.insert(f.at(l));
                prefix.push_back(least_avoiding(excluded));
            }
        }
        std::vector<std::uint64_t> period;
        for (std::uint64_t r = 0; r < L; ++r) {
            std::set<std::uint64_t> excluded;
            for (const EPReal& f : family) excluded.insert(f.at(prefix_len + r));
            period.push_back(least_avoiding(excluded));
        }
        trace.completed = EPReal{std::move(prefix), std::move(period)};
    }
    return trace;
}

EliminationTrace ad_eliminate(const std::vector<PeriodicSet>& family,
                              const ProductCondition& p, const Code& g,
                              std::size_t rounds, AdMode mode) {
    if (!validate_code(g).ok()) {
        throw Error(ErrorKind::BadInput, "code fails validation");
    }
    {
        ArithmeticalType mad = builtin_type("mad");
        FamilyInstance F;
        for (const PeriodicSet& s : family) F.members.emplace_back(s);
        if (!is_of_type(mad, F)) {
            throw Error(ErrorKind::BadInput, "family is not almost disjoint");
        }
    }
    for (const Matrix& m : branch_matrices(p, g.depth)) {
        auto out = eval_star(g, m);
        for (std::size_t l = 0; l + 1 < out.size(); ++l) {
            if (out[l] >= out[l + 1]) {
                throw Error(ErrorKind::BadInput,
                            "code outputs must strictly increase per branch");
            }
        }
    }

    EliminationTrace trace;
    ProductCondition cur = p;
    std::vector<std::uint64_t> k_bounds;

    // Value-bound extraction, one round per member. Cells are narrowed only
    // when some branch keeps hitting the member at the window edge.
    for (std::size_t n = 0; n < family.size(); ++n) {
        const PeriodicSet& member = family[n];
        std::set<std::size_t> F = level_support(n);
        EliminationRound round;
        round.tag = "ad.k";
        std::uint64_t k_round = 0;
        for (const SuitableFunction& sigma : suitable_functions(cur, F, n)) {
            ProductCondition cell = restrict_suitable(cur, sigma);
            auto ms = branch_matrices(cell, g.depth);
            std::int64_t best = -1;
            std::uint64_t best_value = 0;
            const Matrix* best_matrix = nullptr;
            bool best_edge = true;
            bool any_edge = false;
            std::uint64_t worst_value = 0;
            for (const Matrix& m : ms) {
                auto out = eval_star(g, m);
                std::int64_t hit = -1;
                for (std::size_t l = 0; l < out.size(); ++l) {
                    if (member.contains(out[l])) hit = static_cast<std::int64_t>(l);
                }
                bool edge = hit + 1 == static_cast<std::int64_t>(out.size());
                any_edge |= edge;
                if (hit >= 0) {
                    worst_value =
                        std::max(worst_value, out[static_cast<std::size_t>(hit)] + 1);
                }
                if (!best_matrix ||
                    std::make_pair(edge, hit) < std::make_pair(best_edge, best)) {
                    best = hit;
                    best_matrix = &m;
                    best_edge = edge;
                    best_value = hit < 0 ? 0 : out[static_cast<std::size_t>(hit)] + 1;
                }
            }
            std::uint64_t k_sigma;
            if (!any_edge) {
                // The whole cell already bounds the intersection.
                k_sigma = worst_value;
            } else {
                if (best_edge) {
                    throw PremiseFailure(
                        "decided outputs enter a member cofinally within depth");
                }
                k_sigma = best_value;
                cur = amalgamate(cur, F, n,
                                 {{sigma, restrict_to_matrix(cell, *best_matrix)}});
            }
            k_round = std::max(k_round, k_sigma);
        }
        round.condition = cur;
        round.k = k_round;
        round.checks.push_back(
            {"intersection with the member bounded on every cell", true, ""});
        k_bounds.push_back(k_round);
        trace.rounds.push_back(std::move(round));
    }

    std::uint64_t k_max = 0;
    for (std::uint64_t k : k_bounds) k_max = std::max(k_max, k);

    if (mode == AdMode::FiniteBranch) {
        PeriodicSet uni;
        for (const PeriodicSet& s : family) uni = uni.unite(s);
        PeriodicSet comp = uni.complement();
        if (!comp.is_infinite()) {
            throw Error(ErrorKind::BadInput, "family union leaves a finite complement");
        }
        auto [D, E] = comp.parity_split();
        // Force one decided point per round into one half along a single
        // narrowing chain, falling back to the other half.
        for (int attempt = 0; attempt < 2; ++attempt) {
            const PeriodicSet& half = attempt == 0 ? D : E;
            ProductCondition probe = cur;
            std::vector<EliminationRound> point_rounds;
            std::uint64_t prev = k_max;
            bool failed = false;
            for (std::size_t j = 0; j < rounds && !failed; ++j) {
                EliminationRound round;
                round.tag = "ad.point";
                const Matrix* chosen = nullptr;
                std::optional<std::uint64_t> value;
                std::optional<std::uint64_t> index;
                auto ms = branch_matrices(probe, g.depth);
                for (const Matrix& m : ms) {
                    auto out = eval_star(g, m);
                    for (std::size_t l = 0; l < out.size(); ++l) {
                        if (out[l] > prev && half.contains(out[l])) {
                            chosen = &m;
                            value = out[l];
                            index = l;
                            break;
                        }
                    }
                    if (chosen) break;
                }
                if (!chosen) {
                    failed = true;
                    break;
                }
                probe = restrict_to_matrix(probe, *chosen);
                round.condition = probe;
                round.points.push_back(*value);
                round.agreements.push_back({SuitableFunction{}, *index, *value});
                Verdict v = decide_value(probe, g, *index);
                bool ok = v.kind == Verdict::Kind::Forced && v.value == *value &&
                          half.contains(*value);
                round.checks.push_back({"forced point lands in the half", ok, ""});
                point_rounds.push_back(std::move(round));
                prev = *value;
            }
            if (!failed) {
                for (auto& r : point_rounds) trace.rounds.push_back(std::move(r));
                trace.new_member = half;
                return trace;
            }
        }
        throw PremiseFailure("neither half receives the decided points");
    }

    // Infinite branch: block collection rounds.
    std::uint64_t prev = k_max;
    for (std::size_t j = 0; j < rounds; ++j) {
        std::set<std::size_t> F = level_support(j);
        EliminationRound round;
        round.tag = "ad.block";
        std::vector<std::uint64_t> block;
        std::uint64_t round_max = prev;
        for (const SuitableFunction& sigma : suitable_functions(cur, F, j)) {
            ProductCondition cell = restrict_suitable(cur, sigma);
            Matrix m = branch_matrices(cell, g.depth).front();
            auto out = eval_star(g, m);
            std::optional<std::uint64_t> value;
            std::optional<std::uint64_t> index;
            for (std::size_t l = 0; l < out.size(); ++l) {
                if (out[l] > prev) {
                    value = out[l];
                    index = l;
                    break;
                }
            }
            if (!value) {
                throw BudgetExceeded("window exhausted before a fresh block point");
            }
            block.push_back(*value);
            round.agreements.push_back({sigma, *index, *value});
            round_max = std::max(round_max, *value);
            cur = amalgamate(cur, F, j, {{sigma, restrict_to_matrix(cell, m)}});
        }
        std::sort(block.begin(), block.end());
        block.erase(std::unique(block.begin(), block.end()), block.end());
        round.condition = cur;
        round.points = block;

        bool disjoint_members = true;
        for (std::uint64_t v : block) {
            for (const PeriodicSet& s : family) {
                if (s.contains(v)) disjoint_members = false;
            }
        }
        round.checks.push_back({"block avoids every member", disjoint_members, ""});
        bool disjoint_blocks = true;
        for (const auto& earlier : trace.blocks) {
            for (std::uint64_t v : block) {
                if (std::find(earlier.begin(), earlier.end(), v) != earlier.end()) {
                    disjoint_blocks = false;
                }
            }
        }
        round.checks.push_back({"block disjoint from earlier blocks", disjoint_blocks, ""});
        bool forced_ok = true;
        for (const auto& agree : round.agreements) {
            Verdict v = decide_value(restrict_suitable(cur, agree.cell), g, agree.index);
            if (v.kind != Verdict::Kind::Forced || v.value != agree.value) forced_ok = false;
        }
        round.checks.push_back({"forced membership of each point", forced_ok, ""});

        trace.blocks.push_back(block);
        prev = round_max;
        trace.rounds.push_back(std::move(round));
    }
    return trace;
}

std::vector<std::string> trace_log(const EliminationTrace& trace) {
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
        const EliminationRound& r = trace.rounds[i];
        {
            std::ostringstream os;
            os << r.tag << " round=" << i;
            if (r.tag == "ed.k" || r.tag == "ad.k") os << " k=" << r.k;
            if (!r.h.empty()) {
                os << " h={";
                bool first = true;
                for (const auto& [l, v] : r.h) {
                    if (!first) os << ',';
                    os << l << "->" << v;
                    first = false;
                }
                os << '}';
            }
            if (!r.points.empty()) {
                os << " points=[";
                for (std::size_t k = 0; k < r.points.size(); ++k) {
                    if (k) os << ',';
                    os << r.points[k];
                }
                os << ']';
            }
            lines.push_back(os.str());
        }
        for (const auto& agree : r.agreements) {
            std::ostringstream os;
            os << r.tag << " round=" << i << " agree cell=" << agree.cell
               << " l=" << agree.index << " value=" << agree.value;
            lines.push_back(os.str());
        }
        for (const auto& check : r.checks) {
            std::ostringstream os;
            os << r.tag << " round=" << i << " check '" << check.name << "' "
               << (check.ok ? "pass" : "FAIL");
            lines.push_back(os.str());
        }
    }
    return lines;
}

}  // namespace sacks
