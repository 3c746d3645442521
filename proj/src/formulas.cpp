#include "sacks/formulas.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace sacks {

EPReal::EPReal(std::vector<std::uint64_t> pre, std::vector<std::uint64_t> per)
    : prefix(std::move(pre)), period(std::move(per)) {
    if (period.empty()) {
        throw Error(ErrorKind::BadInput, "EPReal period must be nonempty");
    }
}

std::uint64_t EPReal::at(std::uint64_t n) const {
    if (n < prefix.size()) return prefix[n];
    return period[(n - prefix.size()) % period.size()];
}

Term Term::lit(std::uint64_t value) {
    Term t;
    t.kind_ = Kind::Literal;
    t.literal_ = value;
    return t;
}

Term Term::var(std::string name, std::uint64_t offset) {
    Term t;
    t.kind_ = Kind::Variable;
    t.name_ = std::move(name);
    t.offset_ = offset;
    return t;
}

Term Term::code_at(std::size_t index, Term arg, std::uint64_t offset) {
    Term t;
    t.kind_ = Kind::CodeAt;
    t.index_ = index;
    t.arg_ = std::make_shared<const Term>(std::move(arg));
    t.offset_ = offset;
    return t;
}

Term Term::param_at(std::size_t index, Term arg, std::uint64_t offset) {
    Term t;
    t.kind_ = Kind::ParamAt;
    t.index_ = index;
    t.arg_ = std::make_shared<const Term>(std::move(arg));
    t.offset_ = offset;
    return t;
}

Term Term::plus(std::uint64_t add) const {
    Term t = *this;
    if (t.kind_ == Kind::Literal) {
        t.literal_ += add;
    } else {
        t.offset_ += add;
    }
    return t;
}

bool Term::operator==(const Term& other) const {
    if (kind_ != other.kind_ || literal_ != other.literal_ || name_ != other.name_ ||
        index_ != other.index_ || offset_ != other.offset_) {
        return false;
    }
    if (!arg_ != !other.arg_) return false;
    return !arg_ || *arg_ == *other.arg_;
}

Formula Formula::cmp(CmpOp op, Term lhs, Term rhs) {
    Formula f;
    f.kind_ = Kind::Cmp;
    f.op_ = op;
    f.lhs_ = std::move(lhs);
    f.rhs_ = std::move(rhs);
    return f;
}

Formula Formula::conj(Formula a, Formula b) {
    Formula f;
    f.kind_ = Kind::And;
    f.a_ = std::make_shared<const Formula>(std::move(a));
    f.b_ = std::make_shared<const Formula>(std::move(b));
    return f;
}

Formula Formula::disj(Formula a, Formula b) {
    Formula f;
    f.kind_ = Kind::Or;
    f.a_ = std::make_shared<const Formula>(std::move(a));
    f.b_ = std::make_shared<const Formula>(std::move(b));
    return f;
}

Formula Formula::neg(Formula a) {
    Formula f;
    f.kind_ = Kind::Not;
    f.a_ = std::make_shared<const Formula>(std::move(a));
    return f;
}

Formula Formula::exists(std::string var, Term bound, Formula body) {
    Formula f;
    f.kind_ = Kind::Exists;
    f.var_ = std::move(var);
    f.bound_ = std::move(bound);
    f.a_ = std::make_shared<const Formula>(std::move(body));
    return f;
}

Formula Formula::forall(std::string var, Term bound, Formula body) {
    Formula f = exists(std::move(var), std::move(bound), std::move(body));
    f.kind_ = Kind::Forall;
    return f;
}

Formula Formula::top() {
    return cmp(CmpOp::Eq, Term::lit(0), Term::lit(0));
}

bool Formula::operator==(const Formula& other) const {
    if (kind_ != other.kind_) return false;
    switch (kind_) {
        case Kind::Cmp:
            return op_ == other.op_ && lhs_ == other.lhs_ && rhs_ == other.rhs_;
        case Kind::Not:
            return *a_ == *other.a_;
        case Kind::And:
        case Kind::Or:
            return *a_ == *other.a_ && *b_ == *other.b_;
        case Kind::Exists:
        case Kind::Forall:
            return var_ == other.var_ && bound_ == other.bound_ && *a_ == *other.a_;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Token {
    enum class Kind {
        Ident, Number, LParen, RParen, AndAnd, OrOr, Bang, Eq, Ne, Lt, Le,
        Plus, Dot, End
    } kind;
    std::string text;
    std::size_t pos;
};

class Lexer {
  public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        std::size_t start = pos_;
        if (pos_ >= text_.size()) {
            current_ = {Token::Kind::End, "", start};
            return;
        }
        char c = text_[pos_];
        auto single = [&](Token::Kind k) {
            ++pos_;
            current_ = {k, std::string(1, c), start};
        };
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t end = pos_;
            while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) {
                ++end;
            }
            current_ = {Token::Kind::Number, text_.substr(pos_, end - pos_), start};
            pos_ = end;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
                ++end;
            }
            current_ = {Token::Kind::Ident, text_.substr(pos_, end - pos_), start};
            pos_ = end;
            return;
        }
        switch (c) {
            case '(': single(Token::Kind::LParen); return;
            case ')': single(Token::Kind::RParen); return;
            case '+': single(Token::Kind::Plus); return;
            case '.': single(Token::Kind::Dot); return;
            case '=': single(Token::Kind::Eq); return;
            case '&':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '&') {
                    pos_ += 2;
                    current_ = {Token::Kind::AndAnd, "&&", start};
                    return;
                }
                throw ParseError(start, "&&", "stray '&' at position " + std::to_string(start));
            case '|':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '|') {
                    pos_ += 2;
                    current_ = {Token::Kind::OrOr, "||", start};
                    return;
                }
                throw ParseError(start, "||", "stray '|' at position " + std::to_string(start));
            case '!':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
                    pos_ += 2;
                    current_ = {Token::Kind::Ne, "!=", start};
                    return;
                }
                single(Token::Kind::Bang);
                return;
            case '<':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
                    pos_ += 2;
                    current_ = {Token::Kind::Le, "<=", start};
                    return;
                }
                single(Token::Kind::Lt);
                return;
            default:
                throw ParseError(start, "token",
                                 "unexpected character '" + std::string(1, c) +
                                     "' at position " + std::to_string(start));
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    Token current_{Token::Kind::End, "", 0};
};

class Parser {
  public:
    explicit Parser(const std::string& text) : lex_(text) {}

    Formula parse() {
        Formula f = parse_or();
        expect(Token::Kind::End, "end of input");
        return f;
    }

  private:
    [[noreturn]] void fail(const Token& t, const std::string& expected) {
        throw ParseError(t.pos, expected,
                         "expected " + expected + " at position " + std::to_string(t.pos) +
                             (t.text.empty() ? std::string(", got end of input")
                                             : ", got '" + t.text + "'"));
    }

    Token expect(Token::Kind k, const std::string& what) {
        if (lex_.peek().kind != k) fail(lex_.peek(), what);
        return lex_.take();
    }

    Formula parse_or() {
        Formula f = parse_and();
        while (lex_.peek().kind == Token::Kind::OrOr) {
            lex_.take();
            f = Formula::disj(std::move(f), parse_and());
        }
        return f;
    }

    Formula parse_and() {
        Formula f = parse_unary();
        while (lex_.peek().kind == Token::Kind::AndAnd) {
            lex_.take();
            f = Formula::conj(std::move(f), parse_unary());
        }
        return f;
    }

    Formula parse_unary() {
        const Token& t = lex_.peek();
        if (t.kind == Token::Kind::Bang) {
            lex_.take();
            return Formula::neg(parse_unary());
        }
        if (t.kind == Token::Kind::Ident && (t.text == "forall" || t.text == "exists")) {
            bool is_forall = t.text == "forall";
            lex_.take();
            Token var = expect(Token::Kind::Ident, "a variable name");
            if (var.text == "forall" || var.text == "exists" ||
                slot_index(var.text, 'v') || slot_index(var.text, 'w')) {
                fail(var, "a variable name");
            }
            expect(Token::Kind::Lt, "'<'");
            Term bound = parse_bound();
            expect(Token::Kind::Dot, "'.'");
            Formula body = parse_or();
            return is_forall ? Formula::forall(var.text, std::move(bound), std::move(body))
                             : Formula::exists(var.text, std::move(bound), std::move(body));
        }
        if (t.kind == Token::Kind::LParen) {
            lex_.take();
            Formula f = parse_or();
            expect(Token::Kind::RParen, "')'");
            return f;
        }
        return parse_atom();
    }

    Formula parse_atom() {
        Term lhs = parse_term();
        const Token& t = lex_.peek();
        CmpOp op;
        switch (t.kind) {
            case Token::Kind::Eq: op = CmpOp::Eq; break;
            case Token::Kind::Ne: op = CmpOp::Ne; break;
            case Token::Kind::Lt: op = CmpOp::Lt; break;
            case Token::Kind::Le: op = CmpOp::Le; break;
            default: fail(t, "a comparison (=, !=, <, <=)");
        }
        lex_.take();
        Term rhs = parse_term();
        return Formula::cmp(op, std::move(lhs), std::move(rhs));
    }

    Term parse_bound() {
        Term t = parse_term();
        if (t.kind() != Term::Kind::Literal && t.kind() != Term::Kind::Variable) {
            fail(lex_.peek(), "a quantifier bound (number or variable + constant)");
        }
        return t;
    }

    Term parse_term() {
        Term t = parse_base();
        while (lex_.peek().kind == Token::Kind::Plus) {
            lex_.take();
            Token n = expect(Token::Kind::Number, "a number after '+'");
            t = t.plus(std::stoull(n.text));
        }
        return t;
    }

    static std::optional<std::size_t> slot_index(const std::string& ident, char prefix) {
        if (ident.size() < 2 || ident[0] != prefix) return std::nullopt;
        for (std::size_t i = 1; i < ident.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(ident[i]))) return std::nullopt;
        }
        return std::stoull(ident.substr(1));
    }

    Term parse_base() {
        const Token& t = lex_.peek();
        if (t.kind == Token::Kind::Number) {
            return Term::lit(std::stoull(lex_.take().text));
        }
        if (t.kind != Token::Kind::Ident) fail(t, "a term");
        if (t.text == "forall" || t.text == "exists") fail(t, "a term");
        Token ident = lex_.take();
        auto code = slot_index(ident.text, 'v');
        auto param = slot_index(ident.text, 'w');
        if (code || param) {
            expect(Token::Kind::LParen, "'(' after a code or parameter slot");
            Term arg = parse_term();
            expect(Token::Kind::RParen, "')'");
            return code ? Term::code_at(*code, std::move(arg))
                        : Term::param_at(*param, std::move(arg));
        }
        return Term::var(ident.text);
    }

    Lexer lex_;
};

}  // namespace

Formula parse_formula(const std::string& text) {
    return Parser(text).parse();
}

// ---------------------------------------------------------------------------
// Printing

namespace {

const char* cmp_text(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "!=";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
    }
    return "=";
}

void print_term(std::ostream& os, const Term& t) {
    switch (t.kind()) {
        case Term::Kind::Literal:
            os << t.literal();
            return;
        case Term::Kind::Variable:
            os << t.name();
            break;
        case Term::Kind::CodeAt:
            os << 'v' << t.index() << '(';
            print_term(os, t.arg());
            os << ')';
            break;
        case Term::Kind::ParamAt:
            os << 'w' << t.index() << '(';
            print_term(os, t.arg());
            os << ')';
            break;
    }
    if (t.offset() > 0) os << " + " << t.offset();
}

// Precedence: || is 0, && is 1, ! is 2, atoms 3. Quantifiers reach maximally
// right, so they parenthesize whenever they sit in an operand position or
// further tokens follow them.
void print_formula(std::ostream& os, const Formula& f, int min_level, bool tail) {
    switch (f.kind()) {
        case Formula::Kind::Cmp:
            print_term(os, f.lhs());
            os << ' ' << cmp_text(f.op()) << ' ';
            print_term(os, f.rhs());
            return;
        case Formula::Kind::Not:
            os << '!';
            if (f.body().kind() == Formula::Kind::Cmp) {
                os << '(';
                print_formula(os, f.body(), 0, true);
                os << ')';
            } else {
                print_formula(os, f.body(), 2, tail);
            }
            return;
        case Formula::Kind::And:
        case Formula::Kind::Or: {
            bool is_and = f.kind() == Formula::Kind::And;
            int level = is_and ? 1 : 0;
            bool parens = level < min_level;
            if (parens) os << '(';
            print_formula(os, f.left(), level, false);
            os << (is_and ? " && " : " || ");
            print_formula(os, f.right(), level + 1, parens || tail);
            if (parens) os << ')';
            return;
        }
        case Formula::Kind::Exists:
        case Formula::Kind::Forall: {
            bool parens = min_level > 0 || !tail;
            if (parens) os << '(';
            os << (f.kind() == Formula::Kind::Forall ? "forall " : "exists ")
               << f.var() << " < ";
            print_term(os, f.bound());
            os << " . ";
            print_formula(os, f.body(), 0, true);
            if (parens) os << ')';
            return;
        }
    }
}

}  // namespace

std::string pretty_print(const Term& t) {
    std::ostringstream os;
    print_term(os, t);
    return os.str();
}

std::string pretty_print(const Formula& f) {
    std::ostringstream os;
    print_formula(os, f, 0, true);
    return os.str();
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

using Env = std::map<std::string, std::uint64_t>;

std::uint64_t eval_term(const Term& t,
                        const std::vector<std::vector<std::uint64_t>>& codes_out,
                        const std::vector<EPReal>& params, const Env& env) {
    switch (t.kind()) {
        case Term::Kind::Literal:
            return t.literal();
        case Term::Kind::Variable: {
            auto it = env.find(t.name());
            if (it == env.end()) {
                throw Error(ErrorKind::BadInput, "free variable '" + t.name() + "'");
            }
            return it->second + t.offset();
        }
        case Term::Kind::CodeAt: {
            if (t.index() >= codes_out.size()) {
                throw Error(ErrorKind::BadInput,
                            "code slot v" + std::to_string(t.index()) + " not supplied");
            }
            std::uint64_t i = eval_term(t.arg(), codes_out, params, env);
            const auto& out = codes_out[t.index()];
            if (i >= out.size()) {
                throw Error(ErrorKind::IndexBeyondOutput,
                            "code output consulted at index " + std::to_string(i) +
                                " beyond length " + std::to_string(out.size()));
            }
            return out[i] + t.offset();
        }
        case Term::Kind::ParamAt: {
            if (t.index() >= params.size()) {
                throw Error(ErrorKind::BadInput,
                            "parameter slot w" + std::to_string(t.index()) + " not supplied");
            }
            std::uint64_t i = eval_term(t.arg(), codes_out, params, env);
            return params[t.index()].at(i) + t.offset();
        }
    }
    return 0;
}

bool eval_rec(const Formula& f, const std::vector<std::vector<std::uint64_t>>& codes_out,
              const std::vector<EPReal>& params, Env& env) {
    switch (f.kind()) {
        case Formula::Kind::Cmp: {
            std::uint64_t a = eval_term(f.lhs(), codes_out, params, env);
            std::uint64_t b = eval_term(f.rhs(), codes_out, params, env);
            switch (f.op()) {
                case CmpOp::Eq: return a == b;
                case CmpOp::Ne: return a != b;
                case CmpOp::Lt: return a < b;
                case CmpOp::Le: return a <= b;
            }
            return false;
        }
        case Formula::Kind::Not:
            return !eval_rec(f.body(), codes_out, params, env);
        case Formula::Kind::And:
            return eval_rec(f.left(), codes_out, params, env) &&
                   eval_rec(f.right(), codes_out, params, env);
        case Formula::Kind::Or:
            return eval_rec(f.left(), codes_out, params, env) ||
                   eval_rec(f.right(), codes_out, params, env);
        case Formula::Kind::Exists:
        case Formula::Kind::Forall: {
            std::uint64_t bound = eval_term(f.bound(), codes_out, params, env);
            bool is_forall = f.kind() == Formula::Kind::Forall;
            auto saved = env.find(f.var()) != env.end()
                             ? std::optional<std::uint64_t>(env[f.var()])
                             : std::nullopt;
            bool result = is_forall;
            for (std::uint64_t n = 0; n < bound; ++n) {
                env[f.var()] = n;
                bool v = eval_rec(f.body(), codes_out, params, env);
                if (is_forall && !v) {
                    result = false;
                    break;
                }
                if (!is_forall && v) {
                    result = true;
                    break;
                }
            }
            if (saved) {
                env[f.var()] = *saved;
            } else {
                env.erase(f.var());
            }
            return result;
        }
    }
    return false;
}

void free_vars(const Term& t, std::set<std::string>& bound_vars, std::set<std::string>& out) {
    switch (t.kind()) {
        case Term::Kind::Variable:
            if (!bound_vars.count(t.name())) out.insert(t.name());
            return;
        case Term::Kind::CodeAt:
        case Term::Kind::ParamAt:
            free_vars(t.arg(), bound_vars, out);
            return;
        default:
            return;
    }
}

void free_vars(const Formula& f, std::set<std::string>& bound_vars,
               std::set<std::string>& out) {
    switch (f.kind()) {
        case Formula::Kind::Cmp:
            free_vars(f.lhs(), bound_vars, out);
            free_vars(f.rhs(), bound_vars, out);
            return;
        case Formula::Kind::Not:
            free_vars(f.body(), bound_vars, out);
            return;
        case Formula::Kind::And:
        case Formula::Kind::Or:
            free_vars(f.left(), bound_vars, out);
            free_vars(f.right(), bound_vars, out);
            return;
        case Formula::Kind::Exists:
        case Formula::Kind::Forall: {
            free_vars(f.bound(), bound_vars, out);
            bool already = bound_vars.count(f.var()) > 0;
            bound_vars.insert(f.var());
            free_vars(f.body(), bound_vars, out);
            if (!already) bound_vars.erase(f.var());
            return;
        }
    }
}

void require_closed(const Formula& f) {
    std::set<std::string> bound_vars, free;
    free_vars(f, bound_vars, free);
    if (!free.empty()) {
        throw Error(ErrorKind::BadInput, "formula has free variable '" + *free.begin() + "'");
    }
}

}  // namespace

bool eval_formula(const Formula& f,
                  const std::vector<std::vector<std::uint64_t>>& codes_out,
                  const std::vector<EPReal>& params) {
    require_closed(f);
    Env env;
    return eval_rec(f, codes_out, params, env);
}

// ---------------------------------------------------------------------------
// Forcing

namespace {

std::size_t shared_depth(const std::vector<Code>& codes) {
    std::size_t K = 0;
    for (const Code& c : codes) K = std::max(K, c.depth);
    return K;
}

std::vector<std::vector<std::uint64_t>> outputs_at(const std::vector<Code>& codes,
                                                   const Matrix& m) {
    std::vector<std::vector<std::uint64_t>> outs;
    outs.reserve(codes.size());
    for (const Code& c : codes) outs.push_back(eval_star(c, m));
    return outs;
}

ProductCondition restrict_to_matrix(const ProductCondition& p, const Matrix& m) {
    ProductCondition out = p;
    for (std::size_t alpha = 0; alpha < m.rows.size(); ++alpha) {
        out = out.with(alpha, p.at(alpha).restrict_node(m.rows[alpha]));
    }
    return out;
}

// One pass over the branch matrices: true/false/undetermined per matrix.
struct Sweep {
    std::optional<Matrix> first_true;
    std::optional<Matrix> first_false;
    std::optional<Matrix> first_undet;
    bool any_true = false, any_false = false, any_undet = false;

    bool uniform_true() const { return any_true && !any_false && !any_undet; }
    bool uniform_false() const { return any_false && !any_true && !any_undet; }
};

Sweep sweep_formula(const ProductCondition& p, const std::vector<Code>& codes,
                    const std::vector<EPReal>& params, const Formula& f) {
    Sweep s;
    std::size_t K = shared_depth(codes);
    for (const Matrix& m : branch_matrices(p, K)) {
        try {
            bool v = eval_formula(f, outputs_at(codes, m), params);
            if (v && !s.any_true) s.first_true = m;
            if (!v && !s.any_false) s.first_false = m;
            s.any_true |= v;
            s.any_false |= !v;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::IndexBeyondOutput) throw;
            if (!s.any_undet) s.first_undet = m;
            s.any_undet = true;
        }
    }
    return s;
}

struct DecideContext {
    const std::vector<Code>& codes;
    const std::vector<EPReal>& params;
    std::size_t budget;
};

std::pair<ProductCondition, bool> decide_rec(DecideContext& ctx, const ProductCondition& q,
                                             const Formula& f, Env& env);

// Substitutes nothing; quantified variables are carried in env and resolved
// when atoms are evaluated, so sweeping uses a fixed-env evaluator.
bool eval_with_env(const Formula& f, const std::vector<std::vector<std::uint64_t>>& outs,
                   const std::vector<EPReal>& params, Env env) {
    return eval_rec(f, outs, params, env);
}

Sweep sweep_with_env(const ProductCondition& p, DecideContext& ctx, const Formula& f,
                     const Env& env) {
    Sweep s;
    std::size_t K = shared_depth(ctx.codes);
    for (const Matrix& m : branch_matrices(p, K)) {
        try {
            bool v = eval_with_env(f, outputs_at(ctx.codes, m), ctx.params, env);
            if (v && !s.any_true) s.first_true = m;
            if (!v && !s.any_false) s.first_false = m;
            s.any_true |= v;
            s.any_false |= !v;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::IndexBeyondOutput) throw;
            if (!s.any_undet) s.first_undet = m;
            s.any_undet = true;
        }
    }
    return s;
}

std::pair<ProductCondition, bool> decide_rec(DecideContext& ctx, const ProductCondition& q,
                                             const Formula& f, Env& env) {
    // Direct check first: no narrowing needed when the truth value is already
    // uniform at this condition.
    Sweep s = sweep_with_env(q, ctx, f, env);
    if (s.uniform_true()) return {q, true};
    if (s.uniform_false()) return {q, false};

    switch (f.kind()) {
        case Formula::Kind::Cmp: {
            // Least witness for truth, else a determined refutation.
            if (s.first_true) return {restrict_to_matrix(q, *s.first_true), true};
            if (s.first_false) return {restrict_to_matrix(q, *s.first_false), false};
            throw BudgetExceeded("atom undetermined on every branch at code depth");
        }
        case Formula::Kind::Not: {
            auto [r, b] = decide_rec(ctx, q, f.body(), env);
            return {r, !b};
        }
        case Formula::Kind::And: {
            auto [r1, b1] = decide_rec(ctx, q, f.left(), env);
            if (!b1) return {r1, false};
            return decide_rec(ctx, r1, f.right(), env);
        }
        case Formula::Kind::Or: {
            auto [r1, b1] = decide_rec(ctx, q, f.left(), env);
            if (b1) return {r1, true};
            return decide_rec(ctx, r1, f.right(), env);
        }
        case Formula::Kind::Exists: {
            std::uint64_t bound = eval_term(f.bound(), {}, ctx.params, env);
            ProductCondition r = q;
            std::optional<std::uint64_t> saved;
            if (auto it = env.find(f.var()); it != env.end()) saved = it->second;
            for (std::uint64_t n = 0; n < bound; ++n) {
                env[f.var()] = n;
                auto [r2, b] = decide_rec(ctx, r, f.body(), env);
                r = r2;
                if (b) {
                    if (saved) env[f.var()] = *saved; else env.erase(f.var());
                    return {r, true};
                }
            }
            if (saved) env[f.var()] = *saved; else env.erase(f.var());
            return {r, false};
        }
        case Formula::Kind::Forall: {
            std::uint64_t bound = eval_term(f.bound(), {}, ctx.params, env);
            ProductCondition cur = q;
            std::optional<std::uint64_t> saved;
            if (auto it = env.find(f.var()); it != env.end()) saved = it->second;
            auto restore = [&]() {
                if (saved) env[f.var()] = *saved; else env.erase(f.var());
            };
            for (std::uint64_t n = 0; n < bound; ++n) {
                if (ctx.budget == 0) {
                    restore();
                    throw BudgetExceeded("universal rounds exhausted");
                }
                --ctx.budget;
                env[f.var()] = n;
                // One amalgamation round per instance: refine every cell of
                // the level-n antichain into the instance's dense set.
                std::set<std::size_t> F;
                for (std::size_t a = 0; a < n; ++a) F.insert(a);
                std::map<SuitableFunction, ProductCondition> replace;
                bool failed = false;
                std::pair<ProductCondition, bool> failure{cur, false};
                for (const SuitableFunction& sigma :
                     suitable_functions(cur, F, static_cast<std::size_t>(n))) {
                    ProductCondition cell = restrict_suitable(cur, sigma);
                    auto [r_cell, b] = decide_rec(ctx, cell, f.body(), env);
                    if (!b) {
                        failed = true;
                        failure = {r_cell, false};
                        break;
                    }
                    replace[sigma] = r_cell;
                }
                if (failed) {
                    restore();
                    return failure;
                }
                cur = amalgamate(cur, F, static_cast<std::size_t>(n), replace);
            }
            restore();
            return {cur, true};
        }
    }
    throw Error(ErrorKind::BadInput, "unreachable formula kind");
}

}  // namespace

ForceVerdict forces(const ProductCondition& p, const std::vector<Code>& codes,
                    const std::vector<EPReal>& params, const Formula& f) {
    require_closed(f);
    Sweep s = sweep_formula(p, codes, params, f);
    if (s.any_undet) {
        return {ForceVerdict::Kind::BudgetExceeded, {}, {},
                "a branch matrix leaves an atom undetermined at code depth"};
    }
    if (s.uniform_true()) return {ForceVerdict::Kind::ForcedTrue, {}, {}, ""};
    if (s.uniform_false()) return {ForceVerdict::Kind::ForcedFalse, {}, {}, ""};
    return {ForceVerdict::Kind::Neither, restrict_to_matrix(p, *s.first_true),
            restrict_to_matrix(p, *s.first_false), ""};
}

std::pair<ProductCondition, bool> refine_to_decide(const ProductCondition& q,
                                                   const std::vector<Code>& codes,
                                                   const std::vector<EPReal>& params,
                                                   const Formula& f, std::size_t rounds) {
    require_closed(f);
    DecideContext ctx{codes, params, rounds};
    Env env;
    return decide_rec(ctx, q, f, env);
}

bool equivalence_check(const ProductCondition& p, const std::vector<Code>& codes,
                       const std::vector<EPReal>& params, const Formula& f) {
    ForceVerdict v = forces(p, codes, params, f);
    if (v.kind == ForceVerdict::Kind::BudgetExceeded) {
        throw BudgetExceeded(v.reason);
    }
    bool lhs = v.forced_true();
    // Clause (2) brute-forced over the depth-level antichain: each cell pins
    // a single branch matrix, so refine_to_decide settles it definitively.
    std::size_t K = shared_depth(codes);
    std::set<std::size_t> F;
    for (std::size_t a = 0; a < K; ++a) F.insert(a);
    bool rhs = true;
    for (const SuitableFunction& sigma : suitable_functions(p, F, K)) {
        auto [r, b] = refine_to_decide(restrict_suitable(p, sigma), codes, params, f, 64);
        if (!b) {
            rhs = false;
            break;
        }
    }
    return lhs == rhs;
}

}  // namespace sacks
