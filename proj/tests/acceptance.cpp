// Acceptance suite: one criterion per function, one pass/fail line each.
// Exits nonzero when any criterion fails.

#include <chrono>
#include <iostream>
#include <random>
#include <set>

#include "sacks/serialize.hpp"
#include "support/gen.hpp"

using namespace sacks;

namespace {

std::string g_fixtures;
int g_failures = 0;

void report(int index, const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << index << ": " << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
    if (!ok) ++g_failures;
}

Json fixture(const std::string& name) { return load_json_file(g_fixtures + "/" + name); }

// --- 1. Antichain exactness -------------------------------------------------

void criterion_antichains() {
    std::mt19937_64 rng(101);
    bool ok = true;
    std::string detail;
    for (int iter = 0; iter < 200 && ok; ++iter) {
        ProductCondition p;
        std::size_t coords = 1 + rng() % 3;
        for (std::size_t a = 0; a < coords; ++a) p = p.with(a, gen::random_tree(rng, 4));
        std::set<std::size_t> support = p.support();
        if (support.empty()) {
            p = p.with(0, TreeCondition::from_leaves({Node{std::string("0")}}));
            support = p.support();
        }
        std::set<std::size_t> F;
        for (std::size_t alpha : support) {
            F.insert(alpha);
            if (F.size() == 1 + rng() % support.size()) break;
        }
        std::size_t n = rng() % 3;
        std::vector<ProductCondition> cells;
        for (const auto& sigma : suitable_functions(p, F, n)) {
            cells.push_back(restrict_suitable(p, sigma));
        }
        if (!antichain_report(p, F, n, cells).ok()) {
            ok = false;
            detail = "antichain failed at instance " + std::to_string(iter);
            break;
        }
        auto mutated = cells;
        mutated.erase(mutated.begin() +
                      static_cast<std::ptrdiff_t>(rng() % mutated.size()));
        if (antichain_report(p, F, n, mutated).ok()) {
            ok = false;
            detail = "dropped cell not detected at instance " + std::to_string(iter);
        }
    }
    report(1, "antichain exactness with mutation detection", ok, detail);
}

// --- 2. Fusion stabilization ------------------------------------------------

void criterion_fusion() {
    std::mt19937_64 rng(202);
    bool ok = true;
    std::string detail;
    for (int iter = 0; iter < 50 && ok; ++iter) {
        std::vector<ProductCondition> chain;
        std::vector<std::set<std::size_t>> fs;
        ProductCondition p;
        for (std::size_t a = 0; a < 2; ++a) p = p.with(a, gen::random_tree(rng, 2));
        chain.push_back(p);
        for (std::size_t k = 0; k + 1 < 5; ++k) {
            std::set<std::size_t> F;
            for (std::size_t a = 0; a <= std::min<std::size_t>(k, 1); ++a) F.insert(a);
            const ProductCondition& cur = chain.back();
            auto sigmas = suitable_functions(cur, F, k);
            // Narrow one random cell one step below its chosen successor.
            std::map<SuitableFunction, ProductCondition> replace;
            const SuitableFunction& sigma = sigmas[rng() % sigmas.size()];
            ProductCondition cell = restrict_suitable(cur, sigma);
            std::size_t alpha = *F.begin();
            Node chosen = sigma.entries.at(alpha);
            Node deeper = cell.at(alpha).succ_split(chosen).child(rng() % 2);
            replace[sigma] = cell.with(alpha, cell.at(alpha).restrict_node(deeper));
            chain.push_back(amalgamate(cur, F, k, replace));
            fs.push_back(F);
        }
        Report rep = verify_product_fusion(chain, fs);
        if (!rep.ok()) {
            ok = false;
            detail = "chain " + std::to_string(iter) + ": " + rep.failures[0].detail;
        }
    }
    report(2, "fusion chains verify and split levels stabilize", ok, detail);
}

// --- 3. Forcing-to-absoluteness equivalence ---------------------------------

void criterion_equivalence() {
    std::mt19937_64 rng(303);
    int budget_exceeded = 0;
    int mismatches = 0;
    const int total = 100;
    for (int iter = 0; iter < total; ++iter) {
        auto inst = gen::random_lemma_instance(rng);
        try {
            if (!equivalence_check(inst.p, {inst.code}, {inst.param}, inst.formula)) {
                ++mismatches;
            }
        } catch (const BudgetExceeded&) {
            ++budget_exceeded;
        }
    }
    std::ostringstream detail;
    detail << "budget-exceeded " << budget_exceeded << "/" << total;
    bool ok = mismatches == 0 && budget_exceeded * 5 < total;
    report(3, "bounded forcing equivalence on random instances", ok, detail.str());
}

// --- 4. Conjugation bijection -----------------------------------------------

void criterion_conjugation() {
    std::mt19937_64 rng(404);
    bool ok = true;
    std::string detail;
    for (int iter = 0; iter < 500 && ok; ++iter) {
        Representation rho = gen::random_representation(rng, 2, 4, 8);
        rho.x_value = XValue{gen::random_ea_permutation(rng, 4, 8)};
        Word u = gen::random_reduced_word(rng, rho, true, rng() % 7);
        Word v = gen::random_reduced_word(rng, rho, true, rng() % 7);
        if (!conjugation_check(rho, u, v, 64)) {
            ok = false;
            detail = "instance " + std::to_string(iter) + ": u='" + u.str() + "' v='" +
                     v.str() + "'";
        }
    }
    report(4, "cyclic rotation preserves fixpoint counts", ok, detail);
}

// --- 5. Split-to-nice soundness ----------------------------------------------

void criterion_split() {
    std::mt19937_64 rng(505);
    bool ok = true;
    std::string detail;
    for (int iter = 0; iter < 300 && ok; ++iter) {
        Representation rho = gen::random_representation(rng, 2, 4, 8);
        EAPermutation xperm = gen::random_ea_permutation(rng, 4, 8);
        Word w = reduce(gen::random_reduced_word(rng, rho, true, 1 + rng() % 8));
        SplitResult split = split_to_nice(rho, w);
        bool sound = split.u.concat(split.v) == w;
        if (split.cls == SplitResult::Class::InWA) {
            sound = sound && !split.rotated.mentions_x();
        } else {
            sound = sound && is_nice(rho, split.rotated).has_value();
        }
        Representation total = rho.with_x(XValue{xperm});
        sound = sound && conjugation_check(total, split.u, split.v, 64);
        sound = sound && compose_word(total, split.rotated) ==
                             compose_word(total, reduce(split.v.concat(split.u)));
        if (!sound) {
            ok = false;
            detail = "word '" + w.str() + "'";
        }
    }
    report(5, "every word splits into a W_A or nice rotation", ok, detail);
}

// --- 6. Extension lemma window ----------------------------------------------

void criterion_extension_window() {
    std::mt19937_64 rng(606);
    bool ok = true;
    std::string detail;
    int tested = 0;
    for (int attempt = 0; attempt < 4000 && tested < 100 && ok; ++attempt) {
        Representation rho = gen::random_representation(rng, 2, 4, 8);
        PartialInjection s = gen::random_partial_injection(rng, 4);
        std::vector<Word> w0;
        std::size_t want = 1 + rng() % 3;
        for (std::size_t k = 0; k < want; ++k) {
            Word w = reduce(gen::random_reduced_word(rng, rho, true, 1 + rng() % 6));
            if (w.x_degree() >= 1 && w.x_degree() <= 3 && is_nice(rho, w)) {
                w0.push_back(w);
            }
        }
        if (w0.empty()) continue;
        std::uint64_t n = 0;
        while (s.defined(n)) ++n;
        std::uint64_t M;
        ExtensionCertificate cert;
        try {
            M = bound_M(rho, s, w0, n);
            cert = extend_domain(rho, s, w0, n);
        } catch (const Error&) {
            continue;
        }
        if (!verify_preserved(rho, s, cert.t, w0, 256)) {
            ok = false;
            detail = "certificate extension not preserved";
        }
        for (std::uint64_t m = M; m < M + 21 && ok; ++m) {
            if (s.hits(m)) continue;
            if (!verify_preserved(rho, s, s.extended(n, m), w0, 256)) {
                ok = false;
                detail = "window violation at m=" + std::to_string(m);
            }
        }
        ++tested;
    }
    if (tested < 100) {
        ok = false;
        detail = "only " + std::to_string(tested) + " instances generated";
    }
    // The bound is not vacuous: a crafted small m breaks preservation.
    if (ok) {
        Representation rho;
        rho.alphabet["a"] = EAPermutation::pair_swap();
        PartialInjection s;
        Word ax = Word::parse("a x");
        std::uint64_t n = 2;
        std::uint64_t bad_m = rho.alphabet["a"].apply_inverse(n);
        std::uint64_t M = bound_M(rho, s, {ax}, n);
        if (!(bad_m < M) || verify_preserved(rho, s, s.extended(n, bad_m), {ax}, 256)) {
            ok = false;
            detail = "crafted sub-threshold extension was not rejected";
        }
    }
    report(6, "extension certificates hold across the successor window", ok, detail);
}

// --- 7. Perp duality ----------------------------------------------------------

void criterion_perp() {
    std::mt19937_64 rng(707);
    bool ok = true;
    std::string detail;
    for (int iter = 0; iter < 200 && ok; ++iter) {
        Representation rho = gen::random_representation(rng, 2, 4, 8);
        PartialInjection t = gen::random_partial_injection(rng);
        Word w = gen::random_reduced_word(rng, rho, true, 1 + rng() % 6);
        Representation with_t = rho.with_x(XValue{t});
        Representation with_tinv = rho.with_x(XValue{t.inverse()});
        for (std::uint64_t n = 0; n < 128; ++n) {
            if (evaluate(with_t, w, n) != evaluate(with_tinv, perp(w), n)) {
                ok = false;
                detail = "word '" + w.str() + "' at n=" + std::to_string(n);
                break;
            }
        }
    }
    report(7, "evaluation commutes with the x-inversion duality", ok, detail);
}

// --- 8. Eventually different elimination -------------------------------------

void criterion_ed_engine() {
    bool ok = true;
    std::string detail;
    try {
        Code g = code_from_json(fixture("ed_code.json"));
        auto [type, fam] = family_from_json(fixture("ed_family.json"));
        std::vector<EPReal> family;
        for (const Backend& b : fam.members) family.push_back(std::get<EPReal>(b));
        ProductCondition p = product_from_json(fixture("full_condition.json"));
        EliminationTrace trace = ed_eliminate(family, p, g, 3);
        ok = trace.all_ok();
        if (!ok) detail = "a recorded check failed";
        std::uint64_t expected_start = 0;
        for (const auto& round : trace.rounds) {
            if (round.tag != "ed.h") continue;
            if (round.h.begin()->first != expected_start) {
                ok = false;
                detail = "interval partition broken";
            }
            expected_start = round.h.rbegin()->first + 1;
            for (const auto& agree : round.agreements) {
                Verdict v =
                    decide_value(restrict_suitable(round.condition, agree.cell), g,
                                 agree.index);
                if (v.kind != Verdict::Kind::Forced || v.value != agree.value ||
                    round.h.at(agree.index) != agree.value) {
                    ok = false;
                    detail = "agreement point not confirmed by decide_value";
                }
            }
        }
        if (ok && trace.completed) {
            FamilyInstance extended = fam;
            extended.members.emplace_back(*trace.completed);
            if (!is_of_type(type, extended)) {
                ok = false;
                detail = "completed real does not extend the family";
            }
        }
    } catch (const Error& e) {
        ok = false;
        detail = e.what();
    }
    report(8, "eventually-different elimination rounds verify", ok, detail);
}

// --- 9. Cofinitary elimination -----------------------------------------------

void criterion_mcg_engine() {
    bool ok = true;
    std::string detail;
    try {
        Code g = code_from_json(fixture("mcg_code.json"));
        Representation rho = representation_from_json(fixture("mcg_rep.json"));
        ProductCondition p = product_from_json(fixture("full_condition.json"));
        McgTrace trace = mcg_eliminate(rho, p, g, 2);
        ok = trace.all_ok() && trace.rounds.size() == 2;
        if (!ok) detail = "a recorded check failed";
        if (ok && !(trace.rounds[1].f.extends(trace.rounds[0].f) &&
                    trace.rounds[1].f.size() > trace.rounds[0].f.size())) {
            ok = false;
            detail = "f_1 does not properly extend f_0";
        }
        if (ok) {
            for (const auto& agree : trace.rounds[0].agreements) {
                Verdict v = decide_value(
                    restrict_suitable(trace.rounds[0].p_next, agree.cell), g, agree.index);
                if (v.kind != Verdict::Kind::Forced || v.value != agree.value) {
                    ok = false;
                    detail = "round-0 agreement not confirmed by decide_value";
                }
            }
        }
    } catch (const Error& e) {
        ok = false;
        detail = e.what();
    }
    report(9, "cofinitary elimination rounds verify", ok, detail);
}

// --- 10. Type registry coherence ----------------------------------------------

namespace oracle {

constexpr std::uint64_t kHorizon = 512;

bool ev_diff(const EPReal& f, const EPReal& g) {
    for (std::uint64_t n = kHorizon / 2; n < kHorizon; ++n) {
        if (f.at(n) == g.at(n)) return false;
    }
    return true;
}

bool dominated(const EPReal& f, const EPReal& g) {
    for (std::uint64_t n = kHorizon / 2; n < kHorizon; ++n) {
        if (f.at(n) >= g.at(n)) return false;
    }
    return true;
}

bool infinite(const PeriodicSet& s) {
    for (std::uint64_t n = kHorizon / 2; n < kHorizon; ++n) {
        if (s.contains(n)) return true;
    }
    return false;
}

bool finite_meet(const PeriodicSet& a, const PeriodicSet& b) {
    for (std::uint64_t n = kHorizon / 2; n < kHorizon; ++n) {
        if (a.contains(n) && b.contains(n)) return false;
    }
    return true;
}

bool splits(const PeriodicSet& s, const PeriodicSet& a) {
    bool in = false, out = false;
    for (std::uint64_t n = kHorizon / 2; n < kHorizon; ++n) {
        if (a.contains(n) && s.contains(n)) in = true;
        if (a.contains(n) && !s.contains(n)) out = true;
    }
    return in && out;
}

PeriodicSet random_set(std::mt19937_64& rng) {
    std::vector<bool> prefix(rng() % 4);
    for (auto&& b : prefix) b = rng() % 2;
    std::vector<bool> period(1 + rng() % 4);
    for (auto&& b : period) b = rng() % 2;
    return PeriodicSet(std::move(prefix), std::move(period));
}

}  // namespace oracle

void criterion_type_registry() {
    std::mt19937_64 rng(1010);
    bool ok = true;
    std::string detail;

    ArithmeticalType med = builtin_type("med");
    ArithmeticalType mad = builtin_type("mad");
    ArithmeticalType unbounded = builtin_type("unbounded");
    ArithmeticalType dominating = builtin_type("dominating");
    ArithmeticalType splitting = builtin_type("splitting");
    ArithmeticalType reaping = builtin_type("reaping");
    ArithmeticalType independent = builtin_type("independent");
    ArithmeticalType ultra = builtin_type("ultrafilter_subbasis");
    ArithmeticalType mcg = builtin_type("mcg");
    ArithmeticalType adfs = builtin_type("adfs");

    auto expect = [&](bool got, bool want, const std::string& what, int iter) {
        if (got != want && ok) {
            ok = false;
            detail = what + " mismatch at instance " + std::to_string(iter);
        }
    };

    for (int iter = 0; iter < 50 && ok; ++iter) {
        // Reals: med / unbounded / dominating.
        EPReal f = gen::random_ep_real(rng, 3);
        EPReal g = gen::random_ep_real(rng, 3);
        if (!(f == g)) {
            expect(is_of_type(med, {{Backend{f}, Backend{g}}}), oracle::ev_diff(f, g),
                   "med psi", iter);
            expect(is_intruder(med, Backend{g}, {{Backend{f}}}), oracle::ev_diff(g, f),
                   "med chi", iter);
        }
        expect(is_intruder(unbounded, Backend{g}, {{Backend{f}}}),
               oracle::dominated(f, g), "unbounded chi", iter);
        expect(is_intruder(dominating, Backend{g}, {{Backend{f}}}),
               !oracle::dominated(g, f), "dominating chi", iter);

        // Sets: mad / splitting / reaping / independent / ultrafilter.
        PeriodicSet a = oracle::random_set(rng);
        PeriodicSet b = oracle::random_set(rng);
        PeriodicSet c = oracle::random_set(rng);
        expect(a.is_infinite(), oracle::infinite(a), "set finiteness", iter);
        if (!(a == b) && oracle::infinite(a) && oracle::infinite(b)) {
            expect(is_of_type(mad, {{Backend{a}, Backend{b}}}), oracle::finite_meet(a, b),
                   "mad psi", iter);
            if (oracle::infinite(c)) {
                expect(is_intruder(mad, Backend{c}, {{Backend{a}, Backend{b}}}),
                       oracle::finite_meet(c, a) && oracle::finite_meet(c, b), "mad chi",
                       iter);
            }
            expect(is_intruder(splitting, Backend{b}, {{Backend{a}}}),
                   !oracle::splits(a, b), "splitting chi", iter);
            expect(is_intruder(reaping, Backend{b}, {{Backend{a}}}),
                   oracle::splits(b, a), "reaping chi", iter);
            bool indep = true;
            for (int mask = 0; mask < 4; ++mask) {
                PeriodicSet x = mask & 1 ? a.complement() : a;
                PeriodicSet y = mask & 2 ? b.complement() : b;
                bool inf = false;
                for (std::uint64_t n = oracle::kHorizon / 2; n < oracle::kHorizon; ++n) {
                    if (x.contains(n) && y.contains(n)) inf = true;
                }
                indep = indep && inf;
            }
            expect(is_of_type(independent, {{Backend{a}, Backend{b}}}), indep,
                   "independent psi", iter);
            expect(is_of_type(ultra, {{Backend{a}, Backend{b}}}),
                   !oracle::finite_meet(a, b), "ultrafilter psi", iter);
        }

        // Permutations: id-or-finite-fix of the indexed word.
        EAPermutation p1 = gen::random_ea_permutation(rng, 3, 4);
        EAPermutation p2 = gen::random_ea_permutation(rng, 3, 4);
        if (!(p1 == p2)) {
            Representation rho;
            rho.alphabet["0"] = p1;
            rho.alphabet["1"] = p2;
            Word u1{{{"0", 1}}};
            EAPermutation composed = compose_word(rho, u1);
            bool is_id = true;
            bool fix_tail = false;
            for (std::uint64_t n = 0; n < oracle::kHorizon; ++n) {
                if (composed.apply(n) != n) is_id = false;
                if (n >= oracle::kHorizon / 2 && composed.apply(n) == n) fix_tail = true;
            }
            expect(is_of_type(mcg, {{Backend{p1}, Backend{p2}}}), is_id || !fix_tail,
                   "mcg psi", iter);
        }

        // Trees: almost disjointness and branch membership.
        PeriodicTree t1({}, {{rng() % 3, 3 + rng() % 3}});
        PeriodicTree t2({}, {{rng() % 3, 3 + rng() % 3}});
        if (!(t1 == t2)) {
            bool shares = true;
            for (std::uint64_t level = 0; level < 16; ++level) {
                auto x = t1.allowed_at(level);
                auto y = t2.allowed_at(level);
                std::vector<std::uint64_t> common;
                std::set_intersection(x.begin(), x.end(), y.begin(), y.end(),
                                      std::back_inserter(common));
                if (common.empty()) shares = false;
            }
            expect(is_of_type(adfs, {{Backend{t1}, Backend{t2}}}), !shares, "adfs psi",
                   iter);
            EPReal candidate = gen::random_ep_real(rng, 4);
            bool inside = true;
            for (std::uint64_t level = 0; level < 64; ++level) {
                auto allowed = t1.allowed_at(level);
                if (!std::binary_search(allowed.begin(), allowed.end(),
                                        candidate.at(level))) {
                    inside = false;
                }
            }
            expect(is_intruder(adfs, Backend{candidate}, {{Backend{t1}}}), !inside,
                   "adfs chi", iter);
        }
    }
    report(10, "type registry matches the brute-force checker", ok, detail);
}

// --- 11. Parser robustness ------------------------------------------------------

void criterion_parser() {
    std::mt19937_64 rng(1111);
    bool ok = true;
    std::string detail;
    gen::FormulaSpec spec;
    for (int iter = 0; iter < 1000 && ok; ++iter) {
        Formula f = gen::random_formula(rng, spec);
        std::string text = pretty_print(f);
        try {
            if (!(parse_formula(text) == f)) {
                ok = false;
                detail = "round-trip mismatch: " + text;
            }
        } catch (const Error&) {
            ok = false;
            detail = "round-trip parse failure: " + text;
        }
    }
    for (int iter = 0; iter < 100 && ok; ++iter) {
        Formula f = gen::random_formula(rng, spec);
        std::string text = pretty_print(f);
        // Mutate: corrupt one character or truncate.
        if (rng() % 2 == 0 && !text.empty()) {
            text[rng() % text.size()] = "#$;@%"[rng() % 5];
        } else {
            text = text.substr(0, rng() % (text.size() + 1));
        }
        try {
            Formula parsed = parse_formula(text);
            (void)parsed;  // accidental validity is fine
        } catch (const ParseError& e) {
            if (e.position() > text.size()) {
                ok = false;
                detail = "parse error position out of range";
            }
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("unexpected exception: ") + e.what();
        }
    }
    report(11, "formula parser round-trips and fails gracefully", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
    g_fixtures = argc > 1 ? argv[1] : "tests/fixtures";
    auto start = std::chrono::steady_clock::now();
    criterion_antichains();
    criterion_fusion();
    criterion_equivalence();
    criterion_conjugation();
    criterion_split();
    criterion_extension_window();
    criterion_perp();
    criterion_ed_engine();
    criterion_mcg_engine();
    criterion_type_registry();
    criterion_parser();
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES PRESENT")
              << " in " << elapsed.count() << " ms" << std::endl;
    return g_failures == 0 ? 0 : 1;
}
