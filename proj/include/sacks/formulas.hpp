#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sacks/codes.hpp"
#include "sacks/common.hpp"
#include "sacks/products.hpp"

namespace sacks {

// An eventually periodic sequence of naturals: a total, decidable real.
struct EPReal {
    std::vector<std::uint64_t> prefix;
    std::vector<std::uint64_t> period;

    EPReal() : period{0} {}
    EPReal(std::vector<std::uint64_t> pre, std::vector<std::uint64_t> per);

    std::uint64_t at(std::uint64_t n) const;

    bool operator==(const EPReal&) const = default;
};

enum class CmpOp { Eq, Ne, Lt, Le };

// Terms of the bounded arithmetical language: naturals built from literals,
// quantified variables, code outputs v<i>(t) and parameter reals w<j>(t),
// each optionally shifted by a constant.
class Term {
  public:
    enum class Kind { Literal, Variable, CodeAt, ParamAt };

    static Term lit(std::uint64_t value);
    static Term var(std::string name, std::uint64_t offset = 0);
    static Term code_at(std::size_t index, Term arg, std::uint64_t offset = 0);
    static Term param_at(std::size_t index, Term arg, std::uint64_t offset = 0);

    Term plus(std::uint64_t add) const;

    Kind kind() const { return kind_; }
    std::uint64_t literal() const { return literal_; }
    const std::string& name() const { return name_; }
    std::size_t index() const { return index_; }
    const Term& arg() const { return *arg_; }
    std::uint64_t offset() const { return offset_; }

    bool operator==(const Term& other) const;

  private:
    Kind kind_ = Kind::Literal;
    std::uint64_t literal_ = 0;
    std::string name_;
    std::size_t index_ = 0;
    std::shared_ptr<const Term> arg_;
    std::uint64_t offset_ = 0;
};

// Bounded-quantifier formulas over code outputs and parameter reals.
class Formula {
  public:
    enum class Kind { Cmp, And, Or, Not, Exists, Forall };

    static Formula cmp(CmpOp op, Term lhs, Term rhs);
    static Formula conj(Formula a, Formula b);
    static Formula disj(Formula a, Formula b);
    static Formula neg(Formula a);
    static Formula exists(std::string var, Term bound, Formula body);
    static Formula forall(std::string var, Term bound, Formula body);
    static Formula top();  // canonical tautology

    Kind kind() const { return kind_; }
    CmpOp op() const { return op_; }
    const Term& lhs() const { return lhs_; }
    const Term& rhs() const { return rhs_; }
    const Formula& left() const { return *a_; }
    const Formula& right() const { return *b_; }
    const Formula& body() const { return *a_; }
    const std::string& var() const { return var_; }
    const Term& bound() const { return bound_; }

    bool operator==(const Formula& other) const;

  private:
    Kind kind_ = Kind::Cmp;
    CmpOp op_ = CmpOp::Eq;
    Term lhs_, rhs_;
    std::shared_ptr<const Formula> a_, b_;
    std::string var_;
    Term bound_;
};

// Grammar:
//   formula := or; or := and ("||" and)*; and := unary ("&&" unary)*
//   unary   := "!" unary | ("forall"|"exists") id "<" bound "." formula
//            | "(" formula ")" | term cmp term
//   term    := base ("+" number)*; base := v<IDX> "(" term ")"
//            | w<IDX> "(" term ")" | id | number
//   cmp     := "=" | "!=" | "<" | "<="
// Quantifier bodies extend maximally to the right. Bounds are literals or
// variable-plus-constant. Throws ParseError with position and expectations.
Formula parse_formula(const std::string& text);

std::string pretty_print(const Formula& f);
std::string pretty_print(const Term& t);

// Standard bounded semantics against fixed code outputs and parameter reals.
// Throws IndexBeyondOutput when a code output is consulted past its length.
bool eval_formula(const Formula& f,
                  const std::vector<std::vector<std::uint64_t>>& codes_out,
                  const std::vector<EPReal>& params);

struct ForceVerdict {
    enum class Kind { ForcedTrue, ForcedFalse, Neither, BudgetExceeded } kind;
    std::optional<ProductCondition> q_true;   // Neither: forces the formula
    std::optional<ProductCondition> q_false;  // Neither: forces the negation
    std::string reason;                       // BudgetExceeded

    bool forced_true() const { return kind == Kind::ForcedTrue; }
};

// All-branch truth of f below p at the codes' shared depth. Neither returns
// explicit refinements with opposite uniform truth values; an atom left
// undetermined by the code depth yields BudgetExceeded.
ForceVerdict forces(const ProductCondition& p, const std::vector<Code>& codes,
                    const std::vector<EPReal>& params, const Formula& f);

// Finds r ≤ q and a truth value that is uniform over the branch matrices of
// r, following the quantifier structure: atoms by branch restriction with the
// least true witness, existentials by least-witness search, universals by one
// amalgamation round per instance. `rounds` bounds the total number of
// universal rounds; exceeding it throws BudgetExceeded.
std::pair<ProductCondition, bool> refine_to_decide(const ProductCondition& q,
                                                   const std::vector<Code>& codes,
                                                   const std::vector<EPReal>& params,
                                                   const Formula& f, std::size_t rounds);

// Desk-scale instance of the forcing-vs-absoluteness equivalence: compares
// all-branch truth at p with the cell-by-cell existence of deciding
// refinements over the depth-level suitable antichain.
bool equivalence_check(const ProductCondition& p, const std::vector<Code>& codes,
                       const std::vector<EPReal>& params, const Formula& f);

}  // namespace sacks
