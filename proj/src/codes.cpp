#include "sacks/codes.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace sacks {

Matrix Matrix::square_slice(std::size_t n) const {
    Matrix out;
    out.rows.reserve(n);
    for (std::size_t i = 0; i < n && i < rows.size(); ++i) {
        out.rows.push_back(rows[i].prefix(n));
    }
    return out;
}

bool Matrix::dominated_by(const Matrix& other) const {
    if (rows.size() > other.rows.size()) return false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].is_prefix_of(other.rows[i])) return false;
    }
    return true;
}

std::ostream& operator<<(std::ostream& os, const Matrix& m) {
    os << '[';
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        if (i) os << ',';
        os << '"' << m.rows[i].bits << '"';
    }
    return os << ']';
}

namespace {

std::vector<Node> nodes_of_length(std::size_t len) {
    std::vector<Node> out;
    out.reserve(1u << len);
    for (std::uint64_t v = 0; v < (1ull << len); ++v) {
        std::string bits(len, '0');
        for (std::size_t i = 0; i < len; ++i) {
            if (v & (1ull << (len - 1 - i))) bits[i] = '1';
        }
        out.emplace_back(bits);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Matrix> matrices_from_rows(const std::vector<std::vector<Node>>& row_options) {
    std::vector<Matrix> out;
    std::vector<std::size_t> idx(row_options.size(), 0);
    for (;;) {
        Matrix m;
        m.rows.reserve(row_options.size());
        for (std::size_t i = 0; i < row_options.size(); ++i) {
            m.rows.push_back(row_options[i][idx[i]]);
        }
        out.push_back(std::move(m));
        std::size_t i = row_options.size();
        bool advanced = false;
        while (i > 0) {
            --i;
            if (++idx[i] < row_options[i].size()) {
                advanced = true;
                break;
            }
            idx[i] = 0;
        }
        if (!advanced) break;
    }
    return out;
}

}  // namespace

std::vector<Matrix> all_square_matrices(std::size_t n) {
    if (n == 0) return {Matrix{}};
    std::vector<std::vector<Node>> rows(n, nodes_of_length(n));
    return matrices_from_rows(rows);
}

std::vector<Matrix> branch_matrices(const ProductCondition& p, std::size_t K) {
    if (K == 0) return {Matrix{}};
    std::vector<std::vector<Node>> rows;
    rows.reserve(K);
    for (std::size_t alpha = 0; alpha < K; ++alpha) {
        rows.push_back(p.at(alpha).layer(K));
    }
    return matrices_from_rows(rows);
}

Code Code::tabulate(std::size_t K,
                    const std::function<std::vector<std::uint64_t>(const Matrix&)>& fn,
                    std::size_t output_bound) {
    Code c;
    c.depth = K;
    c.output_bound = output_bound;
    for (std::size_t n = 0; n <= K; ++n) {
        for (const Matrix& m : all_square_matrices(n)) {
            c.table.emplace(m, fn(m));
        }
    }
    return c;
}

Report validate_code(const Code& c) {
    Report report;
    std::size_t index = 0;
    for (const auto& [m, out] : c.table) {
        if (m.rows.size() > c.depth) {
            report.flag(index, "shape", "table key exceeds the declared depth");
        }
        for (std::size_t i = 0; i < m.rows.size(); ++i) {
            if (m.rows[i].size() != m.rows.size()) {
                report.flag(index, "shape", "table keys must be square matrices");
                break;
            }
        }
        ++index;
    }
    // Monotone: every square slice's output is a prefix of the bigger output.
    index = 0;
    for (const auto& [m, out] : c.table) {
        for (std::size_t a = 0; a < m.rows.size(); ++a) {
            Matrix slice = m.square_slice(a);
            auto it = c.table.find(slice);
            if (it == c.table.end()) {
                std::ostringstream detail;
                detail << "missing slice " << slice << " of " << m;
                report.flag(index, "totality", detail.str());
                continue;
            }
            const auto& small = it->second;
            if (small.size() > out.size() ||
                !std::equal(small.begin(), small.end(), out.begin())) {
                std::ostringstream detail;
                detail << "table(" << slice << ") is not a prefix of table(" << m << ")";
                report.flag(index, "monotone", detail.str());
            }
        }
        ++index;
    }
    // Proper to depth: full-size outputs reach the declared bound.
    index = 0;
    for (const Matrix& m : all_square_matrices(c.depth)) {
        auto it = c.table.find(m);
        if (it == c.table.end()) {
            std::ostringstream detail;
            detail << "missing full matrix " << m;
            report.flag(index, "totality", detail.str());
        } else if (it->second.size() < c.output_bound) {
            std::ostringstream detail;
            detail << "output of " << m << " shorter than the declared bound "
                   << c.output_bound;
            report.flag(index, "proper", detail.str());
        }
        ++index;
    }
    return report;
}

std::vector<std::uint64_t> eval_star(const Code& c, const Matrix& m) {
    if (m.rows.size() < c.depth) {
        throw Error(ErrorKind::InsufficientDepth,
                    "matrix has fewer rows than the code depth");
    }
    for (std::size_t i = 0; i < c.depth; ++i) {
        if (m.rows[i].size() < c.depth) {
            throw Error(ErrorKind::InsufficientDepth,
                        "matrix row shorter than the code depth");
        }
    }
    Matrix key = m.square_slice(c.depth);
    auto it = c.table.find(key);
    if (it == c.table.end()) {
        std::ostringstream msg;
        msg << "matrix " << key << " missing from the code table";
        throw Error(ErrorKind::BadInput, msg.str());
    }
    return it->second;
}

Verdict decide_value(const ProductCondition& p, const Code& c, std::size_t k) {
    std::optional<std::uint64_t> seen;
    std::optional<Matrix> seen_at;
    bool undetermined = false;
    for (const Matrix& m : branch_matrices(p, c.depth)) {
        auto out = eval_star(c, m);
        if (k >= out.size()) {
            undetermined = true;
            continue;
        }
        if (!seen) {
            seen = out[k];
            seen_at = m;
        } else if (*seen != out[k]) {
            return Verdict::not_forced(*seen_at, m);
        }
    }
    if (undetermined || !seen) return Verdict::undetermined();
    return Verdict::forced(*seen);
}

std::size_t decided_window(const ProductCondition& p, const Code& c) {
    std::size_t window = SIZE_MAX;
    for (const Matrix& m : branch_matrices(p, c.depth)) {
        window = std::min(window, eval_star(c, m).size());
    }
    return window == SIZE_MAX ? 0 : window;
}

}  // namespace sacks
