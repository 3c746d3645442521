#include "sacks/cofinitary.hpp"

#include <algorithm>
#include <sstream>

#include "sacks/formulas.hpp"

namespace sacks {

namespace {

std::set<std::uint64_t> base_set(const PartialInjection& s, std::uint64_t n) {
    std::set<std::uint64_t> base = s.domain();
    for (std::uint64_t m : s.range()) base.insert(m);
    base.insert(n);
    return base;
}

void raise_to_cover(std::uint64_t& M, std::uint64_t element) {
    M = std::max(M, element + 1);
}

}  // namespace

std::uint64_t bound_M(const Representation& rho, const PartialInjection& s,
                      const std::vector<Word>& W0, std::uint64_t n) {
    if (s.defined(n)) {
        throw Error(ErrorKind::BadInput, "n is already in the domain");
    }
    std::set<std::uint64_t> base = base_set(s, n);
    std::uint64_t M = 0;
    for (std::uint64_t b : base) raise_to_cover(M, b);
    for (const Word& w : W0) {
        auto nd = is_nice(rho, w);
        if (!nd) {
            throw Error(ErrorKind::NotNice, "word '" + w.str() + "' is not nice");
        }
        if (nd->pure_power) continue;
        for (const auto& [block, power] : nd->blocks) {
            (void)power;
            EAPermutation perm = compose_word(rho, block);
            for (std::uint64_t b : base) {
                raise_to_cover(M, perm.apply(b));
                raise_to_cover(M, perm.apply_inverse(b));
            }
            for (std::uint64_t fx : perm.finite_fixpoints()) raise_to_cover(M, fx);
        }
    }
    return M;
}

namespace {

bool has_block_word(const Representation& rho, const std::vector<Word>& W0) {
    for (const Word& w : W0) {
        auto nd = is_nice(rho, w);
        if (nd && !nd->pure_power) return true;
    }
    return false;
}

bool has_pure_power(const Representation& rho, const std::vector<Word>& W0) {
    for (const Word& w : W0) {
        auto nd = is_nice(rho, w);
        if (nd && nd->pure_power) return true;
    }
    return false;
}

}  // namespace

ExtensionCertificate extend_domain(const Representation& rho, const PartialInjection& s,
                                   const std::vector<Word>& W0, std::uint64_t n) {
    std::uint64_t M = bound_M(rho, s, W0, n);
    std::set<std::uint64_t> base = base_set(s, n);
    bool blocks = has_block_word(rho, W0);
    bool pures = has_pure_power(rho, W0);
    std::uint64_t m = blocks ? M : 0;
    for (;; ++m) {
        if (s.hits(m)) continue;
        if (pures && base.count(m)) continue;
        break;
    }
    ExtensionCertificate cert;
    cert.M = M;
    cert.chosen = {n, m};
    cert.t = s.extended(n, m);
    cert.checked_words = W0;
    cert.verified_bound = 256;
    if (!verify_preserved(rho, s, cert.t, W0, cert.verified_bound)) {
        throw Error(ErrorKind::BadInput,
                    "domain extension failed fixpoint preservation; the "
                    "representation is not cofinitary on the given words");
    }
    return cert;
}

ExtensionCertificate extend_range(const Representation& rho, const PartialInjection& s,
                                  const std::vector<Word>& W0, std::uint64_t m) {
    if (s.hits(m)) {
        throw Error(ErrorKind::BadInput, "m is already in the range");
    }
    std::vector<Word> flipped;
    flipped.reserve(W0.size());
    for (const Word& w : W0) flipped.push_back(perp(w));
    ExtensionCertificate dual = extend_domain(rho, s.inverse(), flipped, m);
    ExtensionCertificate cert;
    cert.M = dual.M;
    cert.chosen = {dual.chosen.second, m};
    cert.t = dual.t.inverse();
    cert.checked_words = W0;
    cert.verified_bound = dual.verified_bound;
    if (!verify_preserved(rho, s, cert.t, W0, cert.verified_bound)) {
        throw Error(ErrorKind::BadInput,
                    "range extension failed fixpoint preservation");
    }
    return cert;
}

bool verify_preserved(const Representation& rho, const PartialInjection& s,
                      const PartialInjection& t, const std::vector<Word>& W0,
                      std::uint64_t bound) {
    if (!t.extends(s)) {
        throw Error(ErrorKind::BadInput, "t does not extend s");
    }
    Representation with_s = rho.with_x(XValue{s});
    Representation with_t = rho.with_x(XValue{t});
    for (const Word& w : W0) {
        for (std::uint64_t k = 0; k < bound; ++k) {
            auto a = evaluate(with_s, w, k);
            auto b = evaluate(with_t, w, k);
            bool fix_s = a && *a == k;
            bool fix_t = b && *b == k;
            if (fix_s != fix_t) return false;
        }
    }
    return true;
}

std::set<std::uint64_t> partial_fixpoints(const Representation& rho,
                                          const PartialInjection& f, const Word& w) {
    // Any defined evaluation chain passes through an x lookup, whose
    // endpoints live in dom(f) or ran(f); each permutation step displaces a
    // value by less than threshold + max|offset| + 1, so chains returning to
    // their start are confined to an explicit horizon.
    if (!w.mentions_x()) {
        EAPermutation perm = compose_word(rho, w);
        return perm.finite_fixpoints();
    }
    std::uint64_t anchor = 0;
    for (const auto& [a, b] : f.pairs()) anchor = std::max({anchor, a, b});
    std::uint64_t step = 1;
    for (const auto& [sym, perm] : rho.alphabet) {
        (void)sym;
        std::int64_t max_abs = 0;
        for (std::int64_t o : perm.offsets()) max_abs = std::max<std::int64_t>(max_abs, o < 0 ? -o : o);
        step = std::max(step, perm.threshold() + static_cast<std::uint64_t>(max_abs) + 1);
    }
    std::uint64_t horizon = anchor + (w.size() + 2) * step + 2;
    Representation with_f = rho.with_x(XValue{f});
    std::set<std::uint64_t> out;
    for (std::uint64_t k = 0; k <= horizon; ++k) {
        auto v = evaluate(with_f, w, k);
        if (v && *v == k) out.insert(k);
    }
    return out;
}

std::vector<Word> enumerate_nice_words(const Representation& rho, std::size_t count) {
    std::vector<Word> out;
    for (std::size_t len = 1; out.size() < count && len < 32; ++len) {
        for (const Word& w : enumerate_reduced_words(rho, true, len)) {
            if (w.size() != len) continue;
            if (is_nice(rho, w)) {
                out.push_back(w);
                if (out.size() == count) break;
            }
        }
    }
    if (out.size() < count) {
        throw Error(ErrorKind::BadInput, "nice-word enumeration exhausted");
    }
    return out;
}

// ---------------------------------------------------------------------------
// The elimination engine

namespace {

ProductCondition pin_first_branch(const ProductCondition& p, std::size_t K) {
    auto ms = branch_matrices(p, K);
    ProductCondition out = p;
    const Matrix& m = ms.front();
    for (std::size_t alpha = 0; alpha < m.rows.size(); ++alpha) {
        out = out.with(alpha, out.at(alpha).restrict_node(m.rows[alpha]));
    }
    return out;
}

std::set<std::size_t> level_support(std::size_t n) {
    std::set<std::size_t> F;
    for (std::size_t a = 0; a < n; ++a) F.insert(a);
    return F;
}

// Ground-sequence code: index l maps to seq(l), ignoring the branch, with
// output lengths mirroring the template code's table.
Code ground_code(const Code& shape, const EAPermutation& seq) {
    return Code::tabulate(shape.depth, [&shape, &seq](const Matrix& m) {
        std::size_t len = shape.table.at(m).size();
        std::vector<std::uint64_t> out;
        out.reserve(len);
        for (std::size_t l = 0; l < len; ++l) out.push_back(seq.apply(l));
        return out;
    });
}

Formula disagreement_beyond(std::uint64_t cut, std::uint64_t window) {
    // forall l < window . (l < cut || !(v0(l) = v1(l)))
    return Formula::forall(
        "l", Term::lit(window),
        Formula::disj(Formula::cmp(CmpOp::Lt, Term::var("l"), Term::lit(cut)),
                      Formula::neg(Formula::cmp(CmpOp::Eq, Term::code_at(0, Term::var("l")),
                                                Term::code_at(1, Term::var("l"))))));
}

PartialInjection branch_as_injection(const std::vector<std::uint64_t>& out) {
    std::map<std::uint64_t, std::uint64_t> pairs;
    for (std::size_t l = 0; l < out.size(); ++l) pairs[l] = out[l];
    return PartialInjection{std::move(pairs)};
}

}  // namespace

McgTrace mcg_eliminate(const Representation& rho, const ProductCondition& p,
                       const Code& g, std::size_t rounds) {
    if (!validate_code(g).ok()) {
        throw Error(ErrorKind::BadInput, "code fails validation");
    }
    // Entry checks standing in for the premises on the name: every branch
    // output is an injective sequence, and the outputs vary across branches.
    {
        auto ms = branch_matrices(p, g.depth);
        std::optional<std::vector<std::uint64_t>> first;
        bool varies = false;
        for (const Matrix& m : ms) {
            auto out = eval_star(g, m);
            std::set<std::uint64_t> seen(out.begin(), out.end());
            if (seen.size() != out.size()) {
                throw PremiseFailure("branch output collides with injectivity");
            }
            if (!first) {
                first = out;
            } else if (out != *first) {
                varies = true;
            }
        }
        if (!varies && ms.size() > 1) {
            throw PremiseFailure(
                "agreement-point search found outputs constant across branches");
        }
    }

    McgTrace trace;
    if (rounds == 0) return trace;
    std::vector<Word> nice = enumerate_nice_words(rho, rounds);
    PartialInjection f;
    ProductCondition cur = p;
    std::vector<std::uint64_t> k_bounds;

    for (std::size_t n = 0; n < rounds; ++n) {
        const Word& word = nice[n];
        McgRound round;
        round.word = word;
        std::vector<Word> prev_words(nice.begin(),
                                     nice.begin() + static_cast<std::ptrdiff_t>(n));
        std::set<std::size_t> F = level_support(n);

        // (1): bring n into the domain and range, preserving earlier words.
        if (!f.defined(n)) {
            f = extend_domain(rho, f, prev_words, n).t;
        }
        if (!f.hits(n)) {
            f = extend_range(rho, f, prev_words, n).t;
        }

        // (2): for single-x words, bound the fixpoints of the word applied to
        // the name by refining every level-n cell to a branch deciding the
        // agreement set, certified through the forcing engine.
        std::optional<std::uint64_t> k_from_forces;
        bool inverse_x = false;
        if (word.x_degree() == 1) {
            auto nd = is_nice(rho, word);
            Word ablock = nd->pure_power ? Word::empty() : nd->blocks[0].first;
            std::int64_t power = nd->pure_power ? *nd->pure_power : nd->blocks[0].second;
            inverse_x = power < 0;
            EAPermutation ground = inverse_x ? compose_word(rho, ablock)
                                             : compose_word(rho, ablock).inverse();
            Code cu = ground_code(g, ground);
            std::uint64_t K = 0;
            for (const SuitableFunction& sigma : suitable_functions(cur, F, n)) {
                ProductCondition cell = restrict_suitable(cur, sigma);
                // The unrefined cell may already force the agreement bound;
                // pin a branch only when it does not.
                std::optional<std::uint64_t> found;
                std::uint64_t window = decided_window(cell, g);
                for (std::uint64_t cut = 0; cut < window; ++cut) {
                    if (forces(cell, {g, cu}, {}, disagreement_beyond(cut, window))
                            .forced_true()) {
                        found = cut;
                        break;
                    }
                }
                if (!found) {
                    ProductCondition pinned = pin_first_branch(cell, g.depth);
                    window = decided_window(pinned, g);
                    for (std::uint64_t cut = 0; cut < window; ++cut) {
                        if (forces(pinned, {g, cu}, {}, disagreement_beyond(cut, window))
                                .forced_true()) {
                            found = cut;
                            break;
                        }
                    }
                    if (!found) {
                        throw BudgetExceeded(
                            "code depth exhausted while bounding fixpoints");
                    }
                    cur = amalgamate(cur, F, n, {{sigma, pinned}});
                }
                K = std::max(K, *found);
            }
            if (inverse_x) {
                // The agreement set bounds the rotated word; push it through
                // the decided outputs to bound the original word's fixpoints.
                std::uint64_t image_bound = 0;
                for (const Matrix& m : branch_matrices(cur, g.depth)) {
                    auto out = eval_star(g, m);
                    for (std::uint64_t l = 0; l < K && l < out.size(); ++l) {
                        image_bound = std::max(image_bound, out[l] + 1);
                    }
                }
                k_from_forces = image_bound;
            } else {
                k_from_forces = K;
            }
        }

        // (4): sweep the level-n cells, decide one fresh agreement point per
        // cell above the round bound, and graft the decisions back in.
        auto sigmas = suitable_functions(cur, F, n);
        for (const SuitableFunction& sigma : sigmas) {
            std::uint64_t M = 0;
            for (const auto& [a, b] : f.pairs()) {
                raise_to_cover(M, a);
                raise_to_cover(M, b);
            }
            for (std::size_t m2 = 0; m2 < n; ++m2) {
                auto nd = is_nice(rho, nice[m2]);
                if (nd && !nd->pure_power) {
                    std::set<std::uint64_t> base = f.domain();
                    for (std::uint64_t v : f.range()) base.insert(v);
                    for (const auto& [block, pw] : nd->blocks) {
                        (void)pw;
                        EAPermutation perm = compose_word(rho, block);
                        for (std::uint64_t b : base) {
                            raise_to_cover(M, perm.apply(b));
                            raise_to_cover(M, perm.apply_inverse(b));
                        }
                        for (std::uint64_t fx : perm.finite_fixpoints()) {
                            raise_to_cover(M, fx);
                        }
                    }
                }
                M = std::max(M, k_bounds[m2]);
            }
            ProductCondition cell = restrict_suitable(cur, sigma);
            ProductCondition pinned = pin_first_branch(cell, g.depth);
            auto out = eval_star(g, branch_matrices(pinned, g.depth).front());
            std::optional<std::uint64_t> fresh;
            for (std::uint64_t l = M; l < out.size(); ++l) {
                if (out[l] >= M) {
                    fresh = l;
                    break;
                }
            }
            if (!fresh) {
                throw BudgetExceeded("decided window exhausted before a fresh point");
            }
            f = f.extended(*fresh, out[*fresh]);
            round.agreements.push_back({sigma, *fresh, out[*fresh]});
            cur = amalgamate(cur, F, n, {{sigma, pinned}});
        }

        // Close the round: bound the new word's own fixpoints.
        auto own_fix = partial_fixpoints(rho, f, word);
        std::uint64_t k_prime = own_fix.empty() ? 0 : *own_fix.rbegin() + 1;
        round.K = std::max(k_from_forces.value_or(0), k_prime);
        k_bounds.push_back(round.K);
        round.f = f;
        round.p_next = cur;

        // Recorded checks (1)-(4).
        {
            bool ok1 = f.defined(n) && f.hits(n);
            round.checks.push_back({"(1) n in dom and ran", ok1, ""});

            bool ok2 = true;
            std::string detail2 = "not a single-x word";
            if (word.x_degree() == 1) {
                detail2.clear();
                for (const Matrix& m : branch_matrices(cur, g.depth)) {
                    auto hout = branch_as_injection(eval_star(g, m));
                    auto fixes = partial_fixpoints(rho, hout, word);
                    if (!fixes.empty() && *fixes.rbegin() >= round.K) {
                        ok2 = false;
                        detail2 = "branch fixpoint above K";
                    }
                }
            }
            round.checks.push_back({"(2) branch fixpoints within K", ok2, detail2});

            bool ok3 = true;
            for (std::size_t m2 = 0; m2 <= n && ok3; ++m2) {
                auto fixes = partial_fixpoints(rho, f, nice[m2]);
                if (!fixes.empty() && *fixes.rbegin() >= k_bounds[m2]) ok3 = false;
            }
            round.checks.push_back({"(3) earlier words stay bounded", ok3, ""});

            bool ok4 = !round.agreements.empty();
            std::string detail4;
            for (const auto& agree : round.agreements) {
                Verdict v = decide_value(restrict_suitable(cur, agree.cell), g, agree.index);
                if (v.kind != Verdict::Kind::Forced || v.value != agree.value ||
                    !f.apply(agree.index) || *f.apply(agree.index) != agree.value) {
                    ok4 = false;
                    std::ostringstream os;
                    os << "agreement at l=" << agree.index << " not forced";
                    detail4 = os.str();
                }
            }
            round.checks.push_back({"(4) fresh agreement forced per cell", ok4, detail4});
        }
        trace.rounds.push_back(std::move(round));
    }
    return trace;
}

std::vector<std::string> trace_log(const McgTrace& trace) {
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
        const McgRound& r = trace.rounds[i];
        {
            std::ostringstream os;
            os << "mcg round=" << i << " word='" << r.word << "' K=" << r.K
               << " f=" << r.f;
            lines.push_back(os.str());
        }
        for (const auto& agree : r.agreements) {
            std::ostringstream os;
            os << "mcg round=" << i << " agree cell=" << agree.cell
               << " l=" << agree.index << " value=" << agree.value;
            lines.push_back(os.str());
        }
        for (const auto& check : r.checks) {
            std::ostringstream os;
            os << "mcg round=" << i << " check '" << check.name << "' "
               << (check.ok ? "pass" : "FAIL");
            if (!check.detail.empty()) os << " (" << check.detail << ")";
            lines.push_back(os.str());
        }
    }
    return lines;
}

std::vector<std::string> certificate_log(const ExtensionCertificate& cert) {
    std::vector<std::string> lines;
    std::ostringstream head;
    head << "extend M=" << cert.M << " chosen=(" << cert.chosen.first << ","
         << cert.chosen.second << ") t=" << cert.t << " bound=" << cert.verified_bound;
    lines.push_back(head.str());
    for (const Word& w : cert.checked_words) {
        lines.push_back("extend word '" + w.str() + "' preserved");
    }
    return lines;
}

}  // namespace sacks
