#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sacks/products.hpp"

using namespace sacks;

namespace {

Node N(const char* s) { return Node{std::string(s)}; }

TreeCondition leaves(std::initializer_list<const char*> ls) {
    std::vector<Node> v;
    for (const char* s : ls) v.emplace_back(std::string(s));
    return TreeCondition::from_leaves(v);
}

SuitableFunction sf(std::initializer_list<std::pair<std::size_t, const char*>> entries) {
    SuitableFunction s;
    for (const auto& [alpha, node] : entries) s.entries[alpha] = Node{std::string(node)};
    return s;
}

TreeCondition random_tree(std::mt19937_64& rng, std::size_t max_depth) {
    std::vector<Node> out;
    std::vector<Node> frontier{Node{}};
    std::uniform_int_distribution<int> coin(0, 99);
    while (!frontier.empty()) {
        Node n = frontier.back();
        frontier.pop_back();
        if (n.size() >= max_depth || coin(rng) < 45) {
            out.push_back(n);
            continue;
        }
        int mode = coin(rng) % 3;
        if (mode == 0 || mode == 2) frontier.push_back(n.child(0));
        if (mode == 1 || mode == 2) frontier.push_back(n.child(1));
    }
    return TreeCondition::from_leaves(out);
}

}  // namespace

TEST_CASE("normalization drops full coordinates") {
    std::map<std::size_t, TreeCondition> coords;
    coords[0] = TreeCondition{};
    coords[2] = leaves({"01"});
    ProductCondition p(coords);
    CHECK(p.support() == std::set<std::size_t>{2});
    CHECK(p.at(0) == TreeCondition{});
    CHECK(p.at(7) == TreeCondition{});
}

TEST_CASE("suitable_functions enumeration") {
    ProductCondition all_full;
    auto fs0 = suitable_functions(all_full, {0}, 0);
    REQUIRE(fs0.size() == 2);
    CHECK(fs0[0] == sf({{0, "0"}}));
    CHECK(fs0[1] == sf({{0, "1"}}));

    CHECK(suitable_functions(all_full, {0, 1}, 1).size() == 16);

    ProductCondition p = all_full.with(0, TreeCondition{}.restrict_node(N("1")));
    auto fs1 = suitable_functions(p, {0}, 0);
    REQUIRE(fs1.size() == 2);
    CHECK(fs1[0] == sf({{0, "10"}}));
    CHECK(fs1[1] == sf({{0, "11"}}));

    // Empty F: exactly the empty function.
    CHECK(suitable_functions(all_full, {}, 1).size() == 1);
}

TEST_CASE("restrict_suitable") {
    ProductCondition p;
    CHECK(restrict_suitable(p, sf({{0, "0"}})) ==
          p.with(0, TreeCondition{}.restrict_node(N("0"))));
    CHECK(restrict_suitable(p, sf({})) == p);

    ProductCondition q = p.with(0, leaves({"01"}));
    CHECK(restrict_suitable(q, sf({{0, "010"}})) == p.with(0, leaves({"010"})));
    CHECK_THROWS_AS(restrict_suitable(q, sf({{0, "11"}})), Error);
}

TEST_CASE("leq_product") {
    ProductCondition p;
    ProductCondition q = p.with(1, leaves({"01"}));
    CHECK(leq_product(p, p, std::set<std::size_t>{0, 1}, 1));
    CHECK(leq_product(q, p));
    CHECK_FALSE(leq_product(p, q));

    auto sigma = sf({{0, "0"}});
    CHECK(leq_product(restrict_suitable(p, sigma), p));
    // Restricting at level n collapses the level-n antichain.
    CHECK_FALSE(leq_product(restrict_suitable(p, sigma), p, std::set<std::size_t>{0}, 0));
}

TEST_CASE("check_antichain basics") {
    ProductCondition p;
    CHECK(check_antichain(p, {0}, 0));
    CHECK(check_antichain(p, {0, 1}, 1));

    // Dropping a member breaks coverage.
    auto sigmas = suitable_functions(p, {0}, 0);
    std::vector<ProductCondition> cells;
    for (const auto& s : sigmas) cells.push_back(restrict_suitable(p, s));
    cells.pop_back();
    CHECK_FALSE(antichain_report(p, {0}, 0, cells).ok());
}

TEST_CASE("amalgamate") {
    ProductCondition p;

    SUBCASE("identity replacement returns p") {
        std::map<SuitableFunction, ProductCondition> replace;
        for (const auto& s : suitable_functions(p, {0}, 0)) {
            replace[s] = restrict_suitable(p, s);
        }
        CHECK(amalgamate(p, {0}, 0, replace) == p);
    }

    SUBCASE("single cell narrowed") {
        std::map<SuitableFunction, ProductCondition> replace;
        replace[sf({{0, "0"}})] = p.with(0, leaves({"00"}));
        ProductCondition q = amalgamate(p, {0}, 0, replace);
        CHECK(q == p.with(0, leaves({"00", "1"})));
        CHECK(leq_product(q, p, std::set<std::size_t>{0}, 0));
    }

    SUBCASE("two cells at level 1") {
        auto sigmas = suitable_functions(p, {0}, 1);
        REQUIRE(sigmas.size() == 4);
        std::map<SuitableFunction, ProductCondition> replace;
        // Narrow two cells one further step down.
        for (std::size_t i : {0u, 2u}) {
            ProductCondition cell = restrict_suitable(p, sigmas[i]);
            Node chosen = sigmas[i].entries.at(0);
            replace[sigmas[i]] = cell.with(0, cell.at(0).restrict_node(chosen.child(0)));
        }
        ProductCondition q = amalgamate(p, {0}, 1, replace);
        CHECK(leq_product(q, p, std::set<std::size_t>{0}, 1));
        CHECK(check_antichain(q, {0}, 1));
        for (const auto& s : sigmas) {
            ProductCondition cell = restrict_suitable(q, s);
            if (auto it = replace.find(s); it != replace.end()) {
                CHECK(cell == it->second);
            } else {
                CHECK(cell == restrict_suitable(p, s));
            }
        }
    }

    SUBCASE("non-refining replacement rejected") {
        std::map<SuitableFunction, ProductCondition> replace;
        replace[sf({{0, "0"}})] = p.with(0, leaves({"1"}));
        CHECK_THROWS_AS(amalgamate(p, {0}, 0, replace), Error);
    }
}

TEST_CASE("verify_product_fusion") {
    ProductCondition p;
    std::vector<std::set<std::size_t>> fs{{0}, {0}, {0}};
    CHECK(verify_product_fusion({p, p, p}, fs).ok());

    auto shrinking = fs;
    shrinking[0] = {0, 1};
    shrinking[1] = {0};
    auto report = verify_product_fusion({p, p, p}, shrinking);
    REQUIRE_FALSE(report.ok());
    CHECK(report.failures[0].check == "support-growth");

    // Chain built from amalgamate rounds.
    std::vector<ProductCondition> chain{p};
    std::vector<std::set<std::size_t>> fseq;
    for (std::size_t k = 0; k < 3; ++k) {
        std::set<std::size_t> F;
        for (std::size_t a = 0; a <= k; ++a) F.insert(a);
        const ProductCondition& cur = chain.back();
        auto sigmas = suitable_functions(cur, F, k);
        std::map<SuitableFunction, ProductCondition> replace;
        ProductCondition cell = restrict_suitable(cur, sigmas[0]);
        Node chosen = sigmas[0].entries.at(0);
        replace[sigmas[0]] = cell.with(0, cell.at(0).restrict_node(chosen.child(1)));
        chain.push_back(amalgamate(cur, F, k, replace));
        fseq.push_back(F);
    }
    CHECK(verify_product_fusion(chain, fseq).ok());
}

TEST_CASE("suitable function stability under fusion refinement") {
    std::mt19937_64 rng(31);
    for (int iter = 0; iter < 30; ++iter) {
        ProductCondition p;
        p = p.with(0, random_tree(rng, 3));
        p = p.with(1, random_tree(rng, 3));
        std::set<std::size_t> F{0, 1};
        std::size_t n = iter % 2;
        auto sigmas = suitable_functions(p, F, n);
        // Narrow one cell, keeping level n: same suitable functions.
        std::map<SuitableFunction, ProductCondition> replace;
        ProductCondition cell = restrict_suitable(p, sigmas[0]);
        Node chosen = sigmas[0].entries.at(0);
        replace[sigmas[0]] = cell.with(0, cell.at(0).restrict_node(
                                              cell.at(0).succ_split(chosen).child(0)));
        ProductCondition q = amalgamate(p, F, n, replace);
        REQUIRE(leq_product(q, p, F, n));
        CHECK(suitable_functions(q, F, n) == sigmas);
    }
}

TEST_CASE("amalgamation rounds induce single-coordinate fusion chains") {
    std::mt19937_64 rng(53);
    for (int iter = 0; iter < 20; ++iter) {
        ProductCondition p;
        p = p.with(0, random_tree(rng, 2));
        std::vector<ProductCondition> chain{p};
        for (std::size_t k = 0; k + 1 < 4; ++k) {
            std::set<std::size_t> F{0};
            const ProductCondition& cur = chain.back();
            auto sigmas = suitable_functions(cur, F, k);
            std::map<SuitableFunction, ProductCondition> replace;
            const SuitableFunction& sigma = sigmas[rng() % sigmas.size()];
            ProductCondition cell = restrict_suitable(cur, sigma);
            Node chosen = sigma.entries.at(0);
            Node deeper = cell.at(0).succ_split(chosen).child(rng() % 2);
            replace[sigma] = cell.with(0, cell.at(0).restrict_node(deeper));
            chain.push_back(amalgamate(cur, F, k, replace));
        }
        std::vector<TreeCondition> coordinate_chain;
        for (const ProductCondition& q : chain) coordinate_chain.push_back(q.at(0));
        CHECK(verify_fusion_chain(coordinate_chain).ok());
    }
}

TEST_CASE("antichain exactness on random products") {
    std::mt19937_64 rng(41);
    for (int iter = 0; iter < 25; ++iter) {
        ProductCondition p;
        std::size_t ncoords = 1 + iter % 3;
        for (std::size_t a = 0; a < ncoords; ++a) p = p.with(a, random_tree(rng, 3));
        std::set<std::size_t> F;
        for (std::size_t a = 0; a < 1 + iter % ncoords; ++a) F.insert(a);
        std::size_t n = iter % 3;
        CHECK(check_antichain(p, F, n));
    }
}
