#include "sacks/serialize.hpp"

#include <fstream>
#include <sstream>

namespace sacks {

namespace {

[[noreturn]] void bad(const std::string& what) {
    throw Error(ErrorKind::BadInput, what);
}

std::uint64_t as_u64(const Json& j, const char* what) {
    if (!j.is_number_unsigned()) bad(std::string("expected a natural for ") + what);
    return j.get<std::uint64_t>();
}

}  // namespace

Json tree_to_json(const TreeCondition& t) {
    Json leaves = Json::array();
    for (const Node& l : t.leaves()) leaves.push_back(l.bits);
    return leaves;
}

TreeCondition tree_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) bad("a tree is a nonempty list of leaf strings");
    std::vector<Node> leaves;
    for (const Json& leaf : j) {
        if (!leaf.is_string()) bad("tree leaves must be strings of 0/1 digits");
        leaves.emplace_back(leaf.get<std::string>());
    }
    return TreeCondition::from_leaves(std::move(leaves));
}

Json product_to_json(const ProductCondition& p) {
    Json out = Json::object();
    for (const auto& [alpha, tree] : p.coords()) {
        out[std::to_string(alpha)] = tree_to_json(tree);
    }
    return out;
}

ProductCondition product_from_json(const Json& j) {
    if (!j.is_object()) bad("a product condition is an object of coordinate trees");
    std::map<std::size_t, TreeCondition> coords;
    for (const auto& [key, value] : j.items()) {
        std::size_t alpha = 0;
        try {
            alpha = std::stoull(key);
        } catch (const std::exception&) {
            bad("coordinate keys must be decimal indices, got '" + key + "'");
        }
        coords[alpha] = tree_from_json(value);
    }
    return ProductCondition(std::move(coords));
}

Json code_to_json(const Code& c) {
    Json entries = Json::array();
    for (const auto& [m, out] : c.table) {
        Json rows = Json::array();
        for (const Node& row : m.rows) rows.push_back(row.bits);
        entries.push_back(Json{{"rows", rows}, {"out", out}});
    }
    Json out{{"depth", c.depth}, {"entries", entries}};
    if (c.output_bound != 1) out["output_bound"] = c.output_bound;
    return out;
}

Code code_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("depth") || !j.contains("entries")) {
        bad("a code is { depth, entries }");
    }
    Code c;
    c.depth = as_u64(j.at("depth"), "depth");
    c.output_bound = j.contains("output_bound")
                         ? as_u64(j.at("output_bound"), "output_bound")
                         : 1;
    if (!j.at("entries").is_array()) bad("code entries must be an array");
    for (const Json& entry : j.at("entries")) {
        if (!entry.is_object() || !entry.contains("rows") || !entry.contains("out")) {
            bad("each code entry is { rows, out }");
        }
        Matrix m;
        for (const Json& row : entry.at("rows")) {
            if (!row.is_string()) bad("matrix rows must be strings of 0/1 digits");
            m.rows.emplace_back(row.get<std::string>());
        }
        std::vector<std::uint64_t> out;
        for (const Json& v : entry.at("out")) out.push_back(as_u64(v, "out"));
        if (!c.table.emplace(std::move(m), std::move(out)).second) {
            bad("duplicate code table entry");
        }
    }
    Report report = validate_code(c);
    if (!report.ok()) {
        std::ostringstream msg;
        msg << "code fails validation:";
        for (const auto& f : report.failures) msg << ' ' << f.check << " (" << f.detail << ')';
        bad(msg.str());
    }
    return c;
}

Json ep_real_to_json(const EPReal& r) {
    return Json{{"prefix", r.prefix}, {"period", r.period}};
}

EPReal ep_real_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("period")) bad("a real is { prefix?, period }");
    std::vector<std::uint64_t> prefix, period;
    if (j.contains("prefix")) {
        for (const Json& v : j.at("prefix")) prefix.push_back(as_u64(v, "prefix"));
    }
    for (const Json& v : j.at("period")) period.push_back(as_u64(v, "period"));
    return EPReal{std::move(prefix), std::move(period)};
}

namespace {

Json bits_to_json(const std::vector<bool>& bits) {
    Json out = Json::array();
    for (bool b : bits) out.push_back(b ? 1 : 0);
    return out;
}

std::vector<bool> bits_from_json(const Json& j, const char* what) {
    std::vector<bool> out;
    if (!j.is_array()) bad(std::string("expected a bit array for ") + what);
    for (const Json& v : j) {
        std::uint64_t b = as_u64(v, what);
        if (b > 1) bad(std::string(what) + " bits must be 0 or 1");
        out.push_back(b == 1);
    }
    return out;
}

}  // namespace

Json periodic_set_to_json(const PeriodicSet& s) {
    return Json{{"prefix", bits_to_json(s.prefix())}, {"period", bits_to_json(s.period())}};
}

PeriodicSet periodic_set_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("period")) bad("a set is { prefix?, period }");
    std::vector<bool> prefix;
    if (j.contains("prefix")) prefix = bits_from_json(j.at("prefix"), "prefix");
    return PeriodicSet(std::move(prefix), bits_from_json(j.at("period"), "period"));
}

Json ea_permutation_to_json(const EAPermutation& p) {
    Json table = Json::object();
    for (const auto& [n, m] : p.table()) table[std::to_string(n)] = m;
    return Json{{"threshold", p.threshold()},
                {"period", p.period()},
                {"offsets", p.offsets()},
                {"table", table}};
}

EAPermutation ea_permutation_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("threshold") || !j.contains("offsets")) {
        bad("a permutation is { threshold, period, offsets, table }");
    }
    std::uint64_t threshold = as_u64(j.at("threshold"), "threshold");
    std::vector<std::int64_t> offsets;
    for (const Json& v : j.at("offsets")) {
        if (!v.is_number_integer()) bad("offsets must be integers");
        offsets.push_back(v.get<std::int64_t>());
    }
    if (j.contains("period") &&
        as_u64(j.at("period"), "period") != offsets.size()) {
        bad("declared period disagrees with the offsets length");
    }
    std::map<std::uint64_t, std::uint64_t> table;
    if (j.contains("table")) {
        for (const auto& [key, value] : j.at("table").items()) {
            table[std::stoull(key)] = as_u64(value, "table");
        }
    }
    return EAPermutation::from_parts(threshold, std::move(offsets), std::move(table));
}

Json periodic_tree_to_json(const PeriodicTree& t) {
    return Json{{"stem", t.stem()}, {"pattern", t.pattern()}};
}

PeriodicTree periodic_tree_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("pattern")) bad("a tree is { stem?, pattern }");
    std::vector<std::uint64_t> stem;
    if (j.contains("stem")) {
        for (const Json& v : j.at("stem")) stem.push_back(as_u64(v, "stem"));
    }
    std::vector<std::vector<std::uint64_t>> pattern;
    for (const Json& level : j.at("pattern")) {
        std::vector<std::uint64_t> allowed;
        for (const Json& v : level) allowed.push_back(as_u64(v, "pattern"));
        pattern.push_back(std::move(allowed));
    }
    return PeriodicTree(std::move(stem), std::move(pattern));
}

Json representation_to_json(const Representation& rho) {
    Json alphabet = Json::object();
    for (const auto& [sym, perm] : rho.alphabet) {
        alphabet[sym] = ea_permutation_to_json(perm);
    }
    Json out{{"alphabet", alphabet}};
    if (rho.x_value) {
        if (const auto* part = std::get_if<PartialInjection>(&*rho.x_value)) {
            out["x"] = Json{{"injection", partial_injection_to_json(*part)}};
        } else {
            out["x"] = Json{{"permutation", ea_permutation_to_json(
                                                std::get<EAPermutation>(*rho.x_value))}};
        }
    }
    return out;
}

Representation representation_from_json(const Json& j) {
    if (!j.is_object()) bad("a representation is { alphabet, x? }");
    Representation rho;
    if (j.contains("alphabet")) {
        for (const auto& [sym, perm] : j.at("alphabet").items()) {
            rho.alphabet[sym] = ea_permutation_from_json(perm);
        }
    }
    if (j.contains("x")) {
        const Json& x = j.at("x");
        if (x.contains("injection")) {
            rho.x_value = XValue{partial_injection_from_json(x.at("injection"))};
        } else if (x.contains("permutation")) {
            rho.x_value = XValue{ea_permutation_from_json(x.at("permutation"))};
        } else {
            bad("x must be { injection } or { permutation }");
        }
    }
    return rho;
}

Json partial_injection_to_json(const PartialInjection& f) {
    Json out = Json::object();
    for (const auto& [n, m] : f.pairs()) out[std::to_string(n)] = m;
    return out;
}

PartialInjection partial_injection_from_json(const Json& j) {
    if (!j.is_object()) bad("a partial injection is an object of pairs");
    std::map<std::uint64_t, std::uint64_t> pairs;
    for (const auto& [key, value] : j.items()) {
        pairs[std::stoull(key)] = as_u64(value, "injection value");
    }
    return PartialInjection{std::move(pairs)};
}

Json backend_to_json(const Backend& b) {
    switch (backend_kind(b)) {
        case BackendKind::Real: return ep_real_to_json(std::get<EPReal>(b));
        case BackendKind::Set: return periodic_set_to_json(std::get<PeriodicSet>(b));
        case BackendKind::Permutation:
            return ea_permutation_to_json(std::get<EAPermutation>(b));
        case BackendKind::Tree: return periodic_tree_to_json(std::get<PeriodicTree>(b));
    }
    bad("unknown backend");
}

Backend backend_from_json(const Json& j, BackendKind kind) {
    switch (kind) {
        case BackendKind::Real: return Backend{ep_real_from_json(j)};
        case BackendKind::Set: return Backend{periodic_set_from_json(j)};
        case BackendKind::Permutation: return Backend{ea_permutation_from_json(j)};
        case BackendKind::Tree: return Backend{periodic_tree_from_json(j)};
    }
    bad("unknown backend kind");
}

Json family_to_json(const std::string& type_name, const FamilyInstance& f) {
    Json members = Json::array();
    for (const Backend& b : f.members) members.push_back(backend_to_json(b));
    return Json{{"type", type_name}, {"members", members}};
}

std::pair<ArithmeticalType, FamilyInstance> family_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("type") || !j.contains("members")) {
        bad("a family file is { type, members }");
    }
    ArithmeticalType t = builtin_type(j.at("type").get<std::string>());
    FamilyInstance f;
    for (const Json& m : j.at("members")) {
        f.members.push_back(backend_from_json(m, t.member_kind));
    }
    return {std::move(t), std::move(f)};
}

Json verdict_to_json(const Verdict& v) {
    switch (v.kind) {
        case Verdict::Kind::Forced:
            return Json{{"kind", "Forced"}, {"value", v.value}};
        case Verdict::Kind::NotForced: {
            Json out{{"kind", "NotForced"}};
            auto rows = [](const Matrix& m) {
                Json r = Json::array();
                for (const Node& row : m.rows) r.push_back(row.bits);
                return r;
            };
            if (v.witness_a) out["witness"] = rows(*v.witness_a);
            if (v.witness_b) out["disagrees"] = rows(*v.witness_b);
            return out;
        }
        case Verdict::Kind::Undetermined: return Json{{"kind", "Undetermined"}};
    }
    bad("unknown verdict");
}

Json force_verdict_to_json(const ForceVerdict& v) {
    switch (v.kind) {
        case ForceVerdict::Kind::ForcedTrue: return Json{{"kind", "ForcedTrue"}};
        case ForceVerdict::Kind::ForcedFalse: return Json{{"kind", "ForcedFalse"}};
        case ForceVerdict::Kind::Neither: {
            Json out{{"kind", "Neither"}};
            if (v.q_true) out["q_true"] = product_to_json(*v.q_true);
            if (v.q_false) out["q_false"] = product_to_json(*v.q_false);
            return out;
        }
        case ForceVerdict::Kind::BudgetExceeded:
            return Json{{"kind", "BudgetExceeded"}, {"reason", v.reason}};
    }
    bad("unknown verdict");
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        bad("parse error in '" + path + "': " + e.what());
    }
}

}  // namespace sacks
