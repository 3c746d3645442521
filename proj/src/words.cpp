#include "sacks/words.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <ostream>
#include <sstream>

namespace sacks {

// ---------------------------------------------------------------------------
// Words

Word Word::parse(const std::string& text) {
    Word w;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        int exp = 1;
        auto caret = tok.find('^');
        std::string sym = tok.substr(0, caret);
        if (caret != std::string::npos) {
            std::string suffix = tok.substr(caret + 1);
            if (suffix == "-1") {
                exp = -1;
            } else if (suffix == "1" || suffix == "+1") {
                exp = 1;
            } else {
                throw Error(ErrorKind::BadInput,
                            "letter exponent must be 1 or -1, got '" + suffix + "'");
            }
        }
        if (sym.empty() || !(std::isalpha(static_cast<unsigned char>(sym[0])) || sym[0] == '_')) {
            throw Error(ErrorKind::BadInput, "bad letter '" + tok + "'");
        }
        w.letters.push_back({sym, exp});
    }
    return w;
}

std::size_t Word::x_degree() const {
    std::size_t n = 0;
    for (const Letter& l : letters) {
        if (l.sym == "x") ++n;
    }
    return n;
}

bool Word::mentions_x() const { return x_degree() > 0; }

Word Word::concat(const Word& other) const {
    Word w = *this;
    w.letters.insert(w.letters.end(), other.letters.begin(), other.letters.end());
    return w;
}

Word Word::inverse() const {
    Word w;
    w.letters.reserve(letters.size());
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
        w.letters.push_back({it->sym, -it->exp});
    }
    return w;
}

Word Word::subrange(std::size_t from, std::size_t to) const {
    Word w;
    w.letters.assign(letters.begin() + static_cast<std::ptrdiff_t>(from),
                     letters.begin() + static_cast<std::ptrdiff_t>(to));
    return w;
}

std::string Word::str() const {
    std::ostringstream os;
    os << *this;
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const Word& w) {
    if (w.letters.empty()) return os << "<e>";
    for (std::size_t i = 0; i < w.letters.size(); ++i) {
        if (i) os << ' ';
        os << w.letters[i].sym;
        if (w.letters[i].exp < 0) os << "^-1";
    }
    return os;
}

Word reduce(const Word& w) {
    Word out;
    for (const Letter& l : w.letters) {
        if (!out.letters.empty() && out.letters.back().sym == l.sym &&
            out.letters.back().exp == -l.exp) {
            out.letters.pop_back();
        } else {
            out.letters.push_back(l);
        }
    }
    return out;
}

Word perp(const Word& w) {
    Word out = w;
    for (Letter& l : out.letters) {
        if (l.sym == "x") l.exp = -l.exp;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Partial injections

PartialInjection::PartialInjection(std::map<std::uint64_t, std::uint64_t> pairs)
    : pairs_(std::move(pairs)) {
    std::set<std::uint64_t> seen;
    for (const auto& [n, m] : pairs_) {
        (void)n;
        if (!seen.insert(m).second) {
            throw Error(ErrorKind::BadInput, "partial injection has a repeated value");
        }
    }
}

std::optional<std::uint64_t> PartialInjection::apply(std::uint64_t n) const {
    auto it = pairs_.find(n);
    if (it == pairs_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::uint64_t> PartialInjection::apply_inverse(std::uint64_t m) const {
    for (const auto& [n, v] : pairs_) {
        if (v == m) return n;
    }
    return std::nullopt;
}

bool PartialInjection::hits(std::uint64_t m) const {
    return apply_inverse(m).has_value();
}

std::set<std::uint64_t> PartialInjection::domain() const {
    std::set<std::uint64_t> out;
    for (const auto& [n, m] : pairs_) {
        (void)m;
        out.insert(n);
    }
    return out;
}

std::set<std::uint64_t> PartialInjection::range() const {
    std::set<std::uint64_t> out;
    for (const auto& [n, m] : pairs_) {
        (void)n;
        out.insert(m);
    }
    return out;
}

PartialInjection PartialInjection::extended(std::uint64_t n, std::uint64_t m) const {
    if (defined(n)) {
        throw Error(ErrorKind::BadInput,
                    "point " + std::to_string(n) + " already in the domain");
    }
    if (hits(m)) {
        throw Error(ErrorKind::BadInput,
                    "value " + std::to_string(m) + " already in the range");
    }
    PartialInjection out = *this;
    out.pairs_[n] = m;
    return out;
}

PartialInjection PartialInjection::inverse() const {
    std::map<std::uint64_t, std::uint64_t> inv;
    for (const auto& [n, m] : pairs_) inv[m] = n;
    PartialInjection out;
    out.pairs_ = std::move(inv);
    return out;
}

bool PartialInjection::extends(const PartialInjection& other) const {
    for (const auto& [n, m] : other.pairs_) {
        auto it = pairs_.find(n);
        if (it == pairs_.end() || it->second != m) return false;
    }
    return true;
}

std::ostream& operator<<(std::ostream& os, const PartialInjection& f) {
    os << '{';
    bool first = true;
    for (const auto& [n, m] : f.pairs()) {
        if (!first) os << ',';
        os << n << "->" << m;
        first = false;
    }
    return os << '}';
}

// ---------------------------------------------------------------------------
// Eventually affine permutations

EAPermutation::EAPermutation() = default;

EAPermutation EAPermutation::from_parts(std::uint64_t threshold,
                                        std::vector<std::int64_t> offsets,
                                        std::map<std::uint64_t, std::uint64_t> table) {
    EAPermutation p;
    p.threshold_ = threshold;
    p.offsets_ = std::move(offsets);
    p.table_ = std::move(table);
    p.validate();
    p.canonicalize();
    return p;
}

EAPermutation EAPermutation::pair_swap() {
    return from_parts(0, {1, -1}, {});
}

EAPermutation EAPermutation::cycle(const std::vector<std::uint64_t>& values) {
    if (values.empty()) return {};
    std::uint64_t top = *std::max_element(values.begin(), values.end());
    std::map<std::uint64_t, std::uint64_t> table;
    for (std::uint64_t n = 0; n <= top; ++n) table[n] = n;
    for (std::size_t i = 0; i < values.size(); ++i) {
        table[values[i]] = values[(i + 1) % values.size()];
    }
    return from_parts(top + 1, {0}, std::move(table));
}

void EAPermutation::validate() const {
    const std::uint64_t d = offsets_.size();
    if (d == 0) throw Error(ErrorKind::BadInput, "permutation period must be positive");
    // The tail must permute the residue classes.
    std::set<std::uint64_t> shifted;
    for (std::uint64_t r = 0; r < d; ++r) {
        std::int64_t img = (static_cast<std::int64_t>(r) + offsets_[r]) %
                           static_cast<std::int64_t>(d);
        if (img < 0) img += static_cast<std::int64_t>(d);
        if (!shifted.insert(static_cast<std::uint64_t>(img)).second) {
            throw Error(ErrorKind::BadInput, "tail offsets collapse two residue classes");
        }
    }
    // First tail element of each class stays a natural.
    for (std::uint64_t r = 0; r < d; ++r) {
        std::uint64_t first = threshold_ + (r + d - threshold_ % d) % d;
        if (static_cast<std::int64_t>(first) + offsets_[r] < 0) {
            throw Error(ErrorKind::BadInput, "tail maps a natural below zero");
        }
    }
    // Table covers exactly [0, threshold) injectively.
    if (table_.size() != threshold_) {
        throw Error(ErrorKind::BadInput, "table must cover exactly [0, threshold)");
    }
    std::set<std::uint64_t> values;
    for (const auto& [n, m] : table_) {
        if (n >= threshold_) {
            throw Error(ErrorKind::BadInput, "table key beyond threshold");
        }
        if (!values.insert(m).second) {
            throw Error(ErrorKind::BadInput, "table is not injective");
        }
    }
    // The table range must patch exactly the complement of the tail image.
    std::int64_t max_off = 0;
    for (std::int64_t o : offsets_) max_off = std::max(max_off, o);
    std::uint64_t scan = threshold_ + static_cast<std::uint64_t>(max_off) + d + 1;
    std::vector<std::uint64_t> pre(d);
    for (std::uint64_t r = 0; r < d; ++r) {
        std::int64_t img = (static_cast<std::int64_t>(r) + offsets_[r]) %
                           static_cast<std::int64_t>(d);
        if (img < 0) img += static_cast<std::int64_t>(d);
        pre[static_cast<std::uint64_t>(img)] = r;
    }
    std::set<std::uint64_t> complement;
    for (std::uint64_t m = 0; m < scan; ++m) {
        std::uint64_t r = pre[m % d];
        std::int64_t n = static_cast<std::int64_t>(m) - offsets_[r];
        if (n < static_cast<std::int64_t>(threshold_)) complement.insert(m);
    }
    if (complement != values) {
        throw Error(ErrorKind::BadInput,
                    "table range does not patch the tail image complement");
    }
}

void EAPermutation::canonicalize() {
    // Trim table rows that already follow the tail formula.
    while (threshold_ > 0) {
        std::uint64_t n = threshold_ - 1;
        std::int64_t tail = static_cast<std::int64_t>(n) + offsets_[n % offsets_.size()];
        auto it = table_.find(n);
        if (tail >= 0 && it != table_.end() &&
            it->second == static_cast<std::uint64_t>(tail)) {
            table_.erase(it);
            --threshold_;
        } else {
            break;
        }
    }
    // Shrink the period to the smallest repeating divisor.
    const std::uint64_t d = offsets_.size();
    for (std::uint64_t cand = 1; cand < d; ++cand) {
        if (d % cand != 0) continue;
        bool repeats = true;
        for (std::uint64_t r = 0; r < d && repeats; ++r) {
            repeats = offsets_[r] == offsets_[r % cand];
        }
        if (repeats) {
            offsets_.resize(cand);
            break;
        }
    }
}

std::uint64_t EAPermutation::apply(std::uint64_t n) const {
    if (n < threshold_) return table_.at(n);
    return static_cast<std::uint64_t>(static_cast<std::int64_t>(n) +
                                      offsets_[n % offsets_.size()]);
}

std::uint64_t EAPermutation::apply_inverse(std::uint64_t m) const {
    for (const auto& [n, v] : table_) {
        if (v == m) return n;
    }
    const std::uint64_t d = offsets_.size();
    for (std::uint64_t r = 0; r < d; ++r) {
        std::int64_t img = (static_cast<std::int64_t>(r) + offsets_[r]) %
                           static_cast<std::int64_t>(d);
        if (img < 0) img += static_cast<std::int64_t>(d);
        if (static_cast<std::uint64_t>(img) == m % d) {
            std::int64_t n = static_cast<std::int64_t>(m) - offsets_[r];
            if (n >= static_cast<std::int64_t>(threshold_)) {
                return static_cast<std::uint64_t>(n);
            }
        }
    }
    throw Error(ErrorKind::BadInput, "no preimage for " + std::to_string(m));
}

EAPermutation EAPermutation::compose(const EAPermutation& g) const {
    const EAPermutation& f = *this;
    std::uint64_t d = std::lcm<std::uint64_t>(f.offsets_.size(), g.offsets_.size());
    std::vector<std::int64_t> offsets(d);
    std::int64_t min_g = 0;
    for (std::int64_t o : g.offsets_) min_g = std::min(min_g, o);
    std::int64_t thr = std::max<std::int64_t>(
        static_cast<std::int64_t>(g.threshold_),
        static_cast<std::int64_t>(f.threshold_) - min_g);
    std::uint64_t threshold = thr < 0 ? 0 : static_cast<std::uint64_t>(thr);
    for (std::uint64_t r = 0; r < d; ++r) {
        std::int64_t og = g.offsets_[r % g.offsets_.size()];
        std::int64_t mid = (static_cast<std::int64_t>(r) + og) %
                           static_cast<std::int64_t>(f.offsets_.size());
        if (mid < 0) mid += static_cast<std::int64_t>(f.offsets_.size());
        offsets[r] = og + f.offsets_[static_cast<std::uint64_t>(mid)];
    }
    std::map<std::uint64_t, std::uint64_t> table;
    for (std::uint64_t n = 0; n < threshold; ++n) {
        table[n] = f.apply(g.apply(n));
    }
    EAPermutation out;
    out.threshold_ = threshold;
    out.offsets_ = std::move(offsets);
    out.table_ = std::move(table);
    out.canonicalize();
    return out;
}

EAPermutation EAPermutation::inverse() const {
    const std::uint64_t d = offsets_.size();
    std::vector<std::int64_t> offsets(d);
    std::int64_t max_off = 0;
    for (std::uint64_t r = 0; r < d; ++r) {
        std::int64_t img = (static_cast<std::int64_t>(r) + offsets_[r]) %
                           static_cast<std::int64_t>(d);
        if (img < 0) img += static_cast<std::int64_t>(d);
        offsets[static_cast<std::uint64_t>(img)] = -offsets_[r];
        max_off = std::max(max_off, offsets_[r]);
    }
    std::uint64_t threshold =
        threshold_ + static_cast<std::uint64_t>(std::max<std::int64_t>(0, max_off));
    std::map<std::uint64_t, std::uint64_t> table;
    for (std::uint64_t m = 0; m < threshold; ++m) {
        table[m] = apply_inverse(m);
    }
    EAPermutation out;
    out.threshold_ = threshold;
    out.offsets_ = std::move(offsets);
    out.table_ = std::move(table);
    out.canonicalize();
    return out;
}

bool EAPermutation::is_identity() const {
    return threshold_ == 0 && offsets_.size() == 1 && offsets_[0] == 0;
}

std::vector<std::uint64_t> EAPermutation::zero_offset_classes() const {
    std::vector<std::uint64_t> out;
    for (std::uint64_t r = 0; r < offsets_.size(); ++r) {
        if (offsets_[r] == 0) out.push_back(r);
    }
    return out;
}

std::set<std::uint64_t> EAPermutation::fixpoints_below(std::uint64_t bound) const {
    std::set<std::uint64_t> out;
    for (std::uint64_t n = 0; n < bound; ++n) {
        if (apply(n) == n) out.insert(n);
    }
    return out;
}

std::set<std::uint64_t> EAPermutation::finite_fixpoints() const {
    if (!zero_offset_classes().empty()) {
        throw Error(ErrorKind::InfiniteFix, "permutation has cofinal fixpoints");
    }
    return fixpoints_below(threshold_);
}

std::ostream& operator<<(std::ostream& os, const EAPermutation& p) {
    os << "ea{N=" << p.threshold() << ",off=[";
    for (std::size_t i = 0; i < p.offsets().size(); ++i) {
        if (i) os << ',';
        os << p.offsets()[i];
    }
    os << "],t={";
    bool first = true;
    for (const auto& [n, m] : p.table()) {
        if (!first) os << ',';
        os << n << "->" << m;
        first = false;
    }
    return os << "}}";
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

const EAPermutation& alphabet_perm(const Representation& rho, const std::string& sym) {
    auto it = rho.alphabet.find(sym);
    if (it == rho.alphabet.end()) {
        throw Error(ErrorKind::BadInput, "symbol '" + sym + "' has no assigned permutation");
    }
    return it->second;
}

}  // namespace

std::optional<std::uint64_t> evaluate(const Representation& rho, const Word& w,
                                      std::uint64_t n) {
    std::uint64_t cur = n;
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
        if (it->sym == "x") {
            if (!rho.x_value) {
                throw Error(ErrorKind::MissingX, "word mentions x but no value is set");
            }
            if (const auto* part = std::get_if<PartialInjection>(&*rho.x_value)) {
            auto next = it->exp > 0 ? part->apply(cur) : part->apply_inverse(cur);
                if (!next) return std::nullopt;
                cur = *next;
            } else {
                const auto& perm = std::get<EAPermutation>(*rho.x_value);
                cur = it->exp > 0 ? perm.apply(cur) : perm.apply_inverse(cur);
            }
        } else {
            const EAPermutation& perm = alphabet_perm(rho, it->sym);
            cur = it->exp > 0 ? perm.apply(cur) : perm.apply_inverse(cur);
        }
    }
    return cur;
}

bool totally_evaluable(const Representation& rho, const Word& w) {
    for (const Letter& l : w.letters) {
        if (l.sym == "x") {
            if (!rho.x_total()) return false;
        } else if (!rho.alphabet.count(l.sym)) {
            return false;
        }
    }
    return true;
}

EAPermutation compose_word(const Representation& rho, const Word& w) {
    EAPermutation acc;
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
        const EAPermutation* base;
        if (it->sym == "x") {
            if (!rho.x_total()) {
                throw Error(ErrorKind::MissingX, "x has no total backend");
            }
            base = &std::get<EAPermutation>(*rho.x_value);
        } else {
            base = &alphabet_perm(rho, it->sym);
        }
        acc = (it->exp > 0 ? *base : base->inverse()).compose(acc);
    }
    return acc;
}

FixReport fix_report(const Representation& rho, const Word& w, std::uint64_t bound) {
    FixReport report;
    if (totally_evaluable(rho, w)) {
        EAPermutation perm = compose_word(rho, w);
        report.fixpoints = perm.fixpoints_below(bound);
        auto zero = perm.zero_offset_classes();
        if (zero.empty()) {
            report.tail = FixReport::Tail::Finite;
        } else {
            report.tail = FixReport::Tail::Cofinal;
            report.cofinal_classes = zero;
            report.period = perm.period();
        }
        return report;
    }
    report.tail = FixReport::Tail::UnknownPartial;
    for (std::uint64_t n = 0; n < bound; ++n) {
        auto v = evaluate(rho, w, n);
        if (v && *v == n) report.fixpoints.insert(n);
    }
    return report;
}

bool conjugation_check(const Representation& rho, const Word& u, const Word& v,
                       std::uint64_t bound) {
    EAPermutation uv = compose_word(rho, reduce(u.concat(v)));
    EAPermutation vu = compose_word(rho, reduce(v.concat(u)));
    EAPermutation pi = compose_word(rho, v);
    for (std::uint64_t n = 0; n < bound; ++n) {
        bool fix_uv = uv.apply(n) == n;
        std::uint64_t m = pi.apply(n);
        bool fix_vu = vu.apply(m) == m;
        if (fix_uv != fix_vu) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Nice words

namespace {

struct Block {
    bool is_x;
    Word word;  // alphabet letters for A-blocks
    std::int64_t x_power = 0;
    std::size_t length = 0;
};

std::vector<Block> split_blocks(const Word& w) {
    std::vector<Block> blocks;
    for (const Letter& l : w.letters) {
        bool is_x = l.sym == "x";
        if (blocks.empty() || blocks.back().is_x != is_x) {
            blocks.push_back({is_x, Word{}, 0, 0});
        }
        if (is_x) {
            blocks.back().x_power += l.exp;
        } else {
            blocks.back().word.letters.push_back(l);
        }
        blocks.back().length += 1;
    }
    return blocks;
}

}  // namespace

std::optional<NiceDecomposition> is_nice(const Representation& rho, const Word& w_in) {
    Word w = reduce(w_in);
    if (w.is_empty()) return std::nullopt;
    auto blocks = split_blocks(w);
    NiceDecomposition out;
    out.degree = w.x_degree();
    if (blocks.size() == 1 && blocks[0].is_x) {
        out.pure_power = blocks[0].x_power;
        return out;
    }
    // Shape u_l x^{k_l} … u_0 x^{k_0}: alternation starting with an A-block
    // and ending with an x-power, every A-block outside ker(ρ).
    if (blocks.size() % 2 != 0 || blocks.front().is_x || !blocks.back().is_x) {
        return std::nullopt;
    }
    for (std::size_t i = 0; i < blocks.size(); i += 2) {
        const Block& a = blocks[i];
        const Block& x = blocks[i + 1];
        if (a.is_x || !x.is_x) return std::nullopt;
        if (compose_word(rho, a.word).is_identity()) return std::nullopt;
        out.blocks.emplace_back(a.word, x.x_power);
    }
    return out;
}

namespace {

// Deletes kernel A-blocks until none remain, reducing in between. This is the
// only ~ρ rewriting the splitting lemma's minimality argument needs.
Word simplify_mod_kernel(const Representation& rho, Word w) {
    w = reduce(w);
    for (;;) {
        auto blocks = split_blocks(w);
        bool deleted = false;
        std::size_t pos = 0;
        for (const Block& b : blocks) {
            if (!b.is_x && compose_word(rho, b.word).is_identity()) {
                Word next = w.subrange(0, pos).concat(w.subrange(pos + b.length, w.size()));
                w = reduce(next);
                deleted = true;
                break;
            }
            pos += b.length;
        }
        if (!deleted) return w;
    }
}

std::size_t trailing_alphabet_length(const Word& w) {
    std::size_t n = 0;
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
        if (it->sym == "x") break;
        ++n;
    }
    return n;
}

}  // namespace

SplitResult split_to_nice(const Representation& rho, const Word& w_in) {
    Word w = reduce(w_in);
    struct Candidate {
        std::size_t p = 0;
        Word rotated;
        std::size_t trailing = 0;
    };
    std::optional<Candidate> best_wa;
    std::optional<Candidate> best_nice;
    for (std::size_t p = 0; p <= w.size(); ++p) {
        Word u = w.subrange(0, p);
        Word v = w.subrange(p, w.size());
        Word cand = simplify_mod_kernel(rho, v.concat(u));
        if (!cand.mentions_x()) {
            if (!best_wa || cand.size() < best_wa->rotated.size()) {
                best_wa = Candidate{p, cand, cand.size()};
            }
            continue;
        }
        if (is_nice(rho, cand)) {
            std::size_t trailing = trailing_alphabet_length(cand);
            if (!best_nice ||
                std::make_pair(cand.size(), trailing) <
                    std::make_pair(best_nice->rotated.size(), best_nice->trailing)) {
                best_nice = Candidate{p, cand, trailing};
            }
        }
    }
    const std::optional<Candidate>& winner = best_wa ? best_wa : best_nice;
    if (!winner) {
        throw Error(ErrorKind::NotNice,
                    "no rotation of '" + w.str() + "' reaches W_A or a nice word");
    }
    SplitResult out;
    out.u = w.subrange(0, winner->p);
    out.v = w.subrange(winner->p, w.size());
    out.rotated = winner->rotated;
    out.cls = best_wa ? SplitResult::Class::InWA : SplitResult::Class::Nice;
    return out;
}

std::vector<Word> enumerate_reduced_words(const Representation& rho, bool include_x,
                                          std::size_t max_len) {
    std::vector<Letter> letters;
    for (const auto& [sym, perm] : rho.alphabet) {
        (void)perm;
        letters.push_back({sym, 1});
        letters.push_back({sym, -1});
    }
    if (include_x) {
        letters.push_back({std::string("x"), 1});
        letters.push_back({std::string("x"), -1});
    }
    std::sort(letters.begin(), letters.end(), [](const Letter& a, const Letter& b) {
        return std::make_pair(a.sym, -a.exp) < std::make_pair(b.sym, -b.exp);
    });
    std::vector<Word> out;
    std::vector<Word> frontier{Word::empty()};
    for (std::size_t len = 1; len <= max_len; ++len) {
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
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

Report cofinitary_audit(const Representation& rho, const EAPermutation& x_value,
                        std::size_t max_len, std::uint64_t bound) {
    Report report;
    Representation total = rho.with_x(XValue{x_value});
    auto words = enumerate_reduced_words(rho, true, max_len);
    for (std::size_t i = 0; i < words.size(); ++i) {
        const Word& w = words[i];
        EAPermutation perm = compose_word(total, w);
        if (!perm.is_identity() && !perm.zero_offset_classes().empty()) {
            std::ostringstream detail;
            detail << "word '" << w << "' has cofinal fixpoints";
            report.flag(i, "cofinal-fixpoints", detail.str());
            continue;
        }
        SplitResult split = split_to_nice(rho, w);
        if (!conjugation_check(total, split.u, split.v, bound)) {
            std::ostringstream detail;
            detail << "conjugation mismatch for '" << w << "'";
            report.flag(i, "conjugation", detail.str());
        }
        // The rotated word evaluates to the same permutation as v·u.
        EAPermutation rotated = compose_word(total, split.rotated);
        EAPermutation vu = compose_word(total, reduce(split.v.concat(split.u)));
        if (!(rotated == vu)) {
            std::ostringstream detail;
            detail << "rotated image of '" << w << "' differs from v u";
            report.flag(i, "rotation-image", detail.str());
        }
    }
    return report;
}

}  // namespace sacks
