#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sacks/cofinitary.hpp"
#include "support/gen.hpp"

using namespace sacks;

namespace {

Word W(const char* s) { return Word::parse(s); }

Representation swap_rep() {
    Representation rho;
    rho.alphabet["a"] = EAPermutation::pair_swap();
    return rho;
}

// Branch-dependent injective code: out[l] = l + 1 + (first bit of row 0),
// with the output growing as the determining bit becomes visible.
Code demo_injection_code(std::size_t K, std::size_t window) {
    return Code::tabulate(K, [K, window](const Matrix& m) {
        std::vector<std::uint64_t> out;
        if (m.rows.empty()) return out;
        std::uint64_t shift = 1 + static_cast<std::uint64_t>(m.rows[0].bit(0));
        std::size_t len = m.rows.size() == K ? window : m.rows.size();
        for (std::size_t l = 0; l < len; ++l) out.push_back(l + shift);
        return out;
    });
}

}  // namespace

TEST_CASE("bound_M on the worked examples") {
    Representation rho = swap_rep();

    PartialInjection s{{{0, 1}}};
    CHECK(bound_M(rho, s, {W("a x")}, 2) == 4);
    CHECK(bound_M(rho, PartialInjection{}, {W("x x")}, 0) == 1);
    CHECK(bound_M(rho, PartialInjection{}, {}, 0) == 1);

    CHECK_THROWS_AS(bound_M(rho, PartialInjection{}, {W("x a x^-1")}, 0), Error);
    Representation bad;
    bad.alphabet["a"] = EAPermutation::from_parts(0, {0, 1, -1}, {});
    CHECK_THROWS_AS(bound_M(bad, PartialInjection{}, {W("a x")}, 0), Error);
}

TEST_CASE("extend_domain") {
    Representation rho = swap_rep();

    PartialInjection s{{{0, 1}}};
    auto cert = extend_domain(rho, s, {W("a x")}, 2);
    CHECK(cert.M == 4);
    CHECK(cert.chosen == std::make_pair<std::uint64_t, std::uint64_t>(2, 4));
    CHECK(cert.t == PartialInjection{{{0, 1}, {2, 4}}});
    CHECK(verify_preserved(rho, s, cert.t, {W("a x")}, 256));
    // fix(ρ[s]) = fix(ρ[t]) = {0} for a x: a(s(0)) = a(1) = 0.
    auto fixes = partial_fixpoints(rho, cert.t, W("a x"));
    CHECK(fixes == std::set<std::uint64_t>{0});

    auto pure = extend_domain(rho, PartialInjection{}, {W("x")}, 0);
    CHECK(pure.chosen == std::make_pair<std::uint64_t, std::uint64_t>(0, 1));
    CHECK(partial_fixpoints(rho, pure.t, W("x")).empty());

    auto trivial = extend_domain(rho, PartialInjection{}, {}, 5);
    CHECK(trivial.chosen.first == 5);
    CHECK(verify_preserved(rho, PartialInjection{}, trivial.t, {}, 256));
}

TEST_CASE("extend_range mirrors extend_domain through perp") {
    Representation rho = swap_rep();

    auto cert = extend_range(rho, PartialInjection{}, {W("x^-1")}, 0);
    CHECK(cert.chosen == std::make_pair<std::uint64_t, std::uint64_t>(1, 0));
    CHECK(cert.t == PartialInjection{{{1, 0}}});

    // Exact agreement with the transposed dual on random instances.
    std::mt19937_64 rng(7);
    for (int i = 0; i < 40; ++i) {
        Representation r = gen::random_representation(rng);
        PartialInjection s = gen::random_partial_injection(rng);
        Word w = reduce(gen::random_reduced_word(rng, r, true, 1 + rng() % 5));
        if (!is_nice(r, w)) continue;
        std::uint64_t m = 0;
        while (s.hits(m)) ++m;
        ExtensionCertificate via_range;
        ExtensionCertificate via_dual;
        try {
            via_range = extend_range(r, s, {w}, m);
            via_dual = extend_domain(r, s.inverse(), {perp(w)}, m);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::InfiniteFix);
            continue;
        }
        CHECK(via_range.M == via_dual.M);
        CHECK(via_range.t == via_dual.t.inverse());
        CHECK(via_range.chosen.first == via_dual.chosen.second);
    }
}

TEST_CASE("verify_preserved flags a bad extension") {
    Representation rho = swap_rep();
    PartialInjection s;
    // t(n) = a(n) makes n a fixpoint of a x that s does not have.
    std::uint64_t n = 2;
    std::uint64_t bad_m = rho.alphabet["a"].apply_inverse(n);
    PartialInjection t = s.extended(n, bad_m);
    CHECK_FALSE(verify_preserved(rho, s, t, {W("a x")}, 256));
    CHECK(verify_preserved(rho, s, s, {W("a x")}, 256));
}

TEST_CASE("almost-all window for extensions") {
    std::mt19937_64 rng(13);
    int tested = 0;
    for (int i = 0; i < 400 && tested < 25; ++i) {
        Representation rho = gen::random_representation(rng);
        PartialInjection s = gen::random_partial_injection(rng, 4);
        std::vector<Word> w0;
        for (std::size_t k = 0; k < 1 + rng() % 3; ++k) {
            Word w = reduce(gen::random_reduced_word(rng, rho, true, 1 + rng() % 5));
            if (is_nice(rho, w) && w.x_degree() <= 3) w0.push_back(w);
        }
        if (w0.empty()) continue;
        std::uint64_t n = 0;
        while (s.defined(n)) ++n;
        std::uint64_t M;
        try {
            M = bound_M(rho, s, w0, n);
        } catch (const Error&) {
            continue;
        }
        for (std::uint64_t m = M; m < M + 20; ++m) {
            CHECK(verify_preserved(rho, s, s.extended(n, m), w0, 256));
        }
        ++tested;
    }
    CHECK(tested >= 25);
}

TEST_CASE("enumerate_nice_words front") {
    Representation rho = swap_rep();
    auto nice = enumerate_nice_words(rho, 6);
    REQUIRE(nice.size() == 6);
    CHECK(nice[0] == W("x"));
    CHECK(nice[1] == W("x^-1"));
    CHECK(nice[2] == W("a x"));
    CHECK(nice[3] == W("a x^-1"));
    // Subwords precede their hosts.
    for (std::size_t i = 0; i < nice.size(); ++i) {
        for (std::size_t j = i + 1; j < nice.size(); ++j) {
            CHECK(nice[i].size() <= nice[j].size());
        }
    }
}

TEST_CASE("mcg_eliminate fixture run") {
    Representation rho = swap_rep();
    ProductCondition p;
    Code g = demo_injection_code(2, 96);

    auto trace = mcg_eliminate(rho, p, g, 1);
    REQUIRE(trace.rounds.size() == 1);
    CHECK(trace.all_ok());
    const auto& round = trace.rounds[0];
    CHECK(round.word == W("x"));
    CHECK(round.f.defined(0));
    CHECK(round.f.hits(0));
    REQUIRE_FALSE(round.agreements.empty());
    for (const auto& agree : round.agreements) {
        auto cell = restrict_suitable(round.p_next, agree.cell);
        auto v = decide_value(cell, g, agree.index);
        REQUIRE(v.kind == Verdict::Kind::Forced);
        CHECK(v.value == agree.value);
        CHECK(round.f.apply(agree.index) == agree.value);
    }

    CHECK(mcg_eliminate(rho, p, g, 0).rounds.empty());
}

TEST_CASE("mcg_eliminate two rounds grows f strictly") {
    Representation rho = swap_rep();
    ProductCondition p;
    Code g = demo_injection_code(2, 96);
    auto trace = mcg_eliminate(rho, p, g, 2);
    REQUIRE(trace.rounds.size() == 2);
    CHECK(trace.all_ok());
    CHECK(trace.rounds[1].f.extends(trace.rounds[0].f));
    CHECK(trace.rounds[1].f.size() > trace.rounds[0].f.size());
    CHECK(leq_product(trace.rounds[1].p_next, trace.rounds[0].p_next));
    // Fusion shape: p_next chains are refinements of p.
    CHECK(leq_product(trace.rounds[0].p_next, p));
}

TEST_CASE("mcg_eliminate premise failures") {
    Representation rho = swap_rep();
    ProductCondition p;

    // Constant across branches: the name is an object of the ground model.
    Code constant = Code::tabulate(2, [](const Matrix& m) {
        std::vector<std::uint64_t> out;
        for (std::size_t l = 0; l < 8 && m.rows.size() >= 2; ++l) out.push_back(l + 1);
        return out;
    });
    CHECK_THROWS_AS(mcg_eliminate(rho, p, constant, 1), PremiseFailure);

    // Output values collide: not injective on a branch.
    Code collide = Code::tabulate(2, [](const Matrix& m) {
        std::vector<std::uint64_t> out;
        if (m.rows.size() >= 2) {
            out = {1, 1, 2};
            out[0] = 1 + static_cast<std::uint64_t>(m.rows[0].bit(0));
        }
        return out;
    });
    CHECK_THROWS_AS(mcg_eliminate(rho, p, collide, 1), PremiseFailure);
}

TEST_CASE("trace log is deterministic") {
    Representation rho = swap_rep();
    ProductCondition p;
    Code g = demo_injection_code(2, 96);
    auto lines1 = trace_log(mcg_eliminate(rho, p, g, 1));
    auto lines2 = trace_log(mcg_eliminate(rho, p, g, 1));
    CHECK(lines1 == lines2);
    REQUIRE(!lines1.empty());
    CHECK(lines1[0].rfind("mcg round=0", 0) == 0);
}
