#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "sacks/common.hpp"
#include "sacks/products.hpp"
#include "sacks/trees.hpp"

namespace sacks {

// A finite matrix of binary strings: row α is (an initial segment of) the
// branch at coordinate α.
struct Matrix {
    std::vector<Node> rows;

    // The square slice m↾n×n: first n rows truncated to length n.
    Matrix square_slice(std::size_t n) const;

    // Rowwise prefix domination s ⊴ t.
    bool dominated_by(const Matrix& other) const;

    bool operator==(const Matrix&) const = default;
    auto operator<=>(const Matrix&) const = default;
};

std::ostream& operator<<(std::ostream& os, const Matrix& m);

// A finite-depth code for a continuous function from branch matrices to
// reals: a table on the square matrices of sizes 0..K, monotone along square
// slices and proper to depth (full K×K outputs reach the declared bound).
struct Code {
    std::size_t depth = 0;
    std::size_t output_bound = 1;
    std::map<Matrix, std::vector<std::uint64_t>> table;

    // Tabulates fn over every square matrix of size ≤ K. fn must be monotone
    // along slices; validate() afterwards if unsure.
    static Code tabulate(std::size_t K,
                         const std::function<std::vector<std::uint64_t>(const Matrix&)>& fn,
                         std::size_t output_bound = 1);

    bool operator==(const Code&) const = default;
};

// Every matrix with the given row count and length whose rows pass through
// the corresponding coordinates, in row-major lex order.
std::vector<Matrix> branch_matrices(const ProductCondition& p, std::size_t K);

// All square matrices of the given size (rows through the full tree).
std::vector<Matrix> all_square_matrices(std::size_t n);

// Monotonicity over all ⊴-pairs of table squares plus properness to depth.
Report validate_code(const Code& c);

// f*(m) = table(m↾K×K); requires at least K rows of length K.
std::vector<std::uint64_t> eval_star(const Code& c, const Matrix& m);

// Pointwise forcing decision for output index k below p.
struct Verdict {
    enum class Kind { Forced, NotForced, Undetermined } kind;
    std::uint64_t value = 0;                  // Forced
    std::optional<Matrix> witness_a;          // NotForced: determines a value
    std::optional<Matrix> witness_b;          // NotForced: disagrees

    static Verdict forced(std::uint64_t v) { return {Kind::Forced, v, {}, {}}; }
    static Verdict not_forced(Matrix a, Matrix b) {
        return {Kind::NotForced, 0, std::move(a), std::move(b)};
    }
    static Verdict undetermined() { return {Kind::Undetermined, 0, {}, {}}; }
};

Verdict decide_value(const ProductCondition& p, const Code& c, std::size_t k);

// Output length available on every branch matrix of p at the code's depth.
std::size_t decided_window(const ProductCondition& p, const Code& c);

}  // namespace sacks
