#include "cli.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "sacks/serialize.hpp"

namespace sacks {

namespace {

enum class Format { Human, Log, JsonOut };

struct Ctx {
    Format format = Format::Human;
    std::uint64_t seed = 20240817;
    std::ostream* out = nullptr;
    int status = 0;

    void emit_json(const Json& j) { *out << j.dump(2) << '\n'; }
    void emit_lines(const std::vector<std::string>& lines) {
        for (const std::string& l : lines) *out << l << '\n';
    }
};

std::set<std::size_t> parse_coords(const std::string& text) {
    std::set<std::size_t> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        try {
            out.insert(std::stoull(item));
        } catch (const std::exception&) {
            throw Error(ErrorKind::BadInput, "bad coordinate '" + item + "'");
        }
    }
    return out;
}

// Compact power rendering for word output: "a x^2 b^-1".
std::string render_word(const Word& w) {
    if (w.is_empty()) return "<e>";
    std::ostringstream os;
    std::size_t i = 0;
    bool first = true;
    while (i < w.letters.size()) {
        std::size_t j = i;
        while (j < w.letters.size() && w.letters[j] == w.letters[i]) ++j;
        std::int64_t power = static_cast<std::int64_t>(j - i) * w.letters[i].exp;
        if (!first) os << ' ';
        os << w.letters[i].sym;
        if (power != 1) os << '^' << power;
        first = false;
        i = j;
    }
    return os.str();
}

// Symbols without an assigned permutation get deterministic block-swap
// defaults, so bare word commands work without a representation file.
Representation with_default_backends(Representation rho, const Word& w) {
    std::set<std::string> symbols;
    for (const Letter& l : w.letters) {
        if (l.sym != "x" && !rho.alphabet.count(l.sym)) symbols.insert(l.sym);
    }
    std::size_t i = 0;
    for (const std::string& sym : symbols) {
        std::uint64_t half = i + 1;
        std::vector<std::int64_t> offsets;
        for (std::uint64_t k = 0; k < half; ++k) offsets.push_back(static_cast<std::int64_t>(half));
        for (std::uint64_t k = 0; k < half; ++k) offsets.push_back(-static_cast<std::int64_t>(half));
        rho.alphabet[sym] = EAPermutation::from_parts(0, std::move(offsets), {});
        ++i;
    }
    return rho;
}

Representation load_rep(const std::string& path) {
    if (path.empty()) return {};
    return representation_from_json(load_json_file(path));
}

std::vector<Code> load_codes(const std::vector<std::string>& paths) {
    std::vector<Code> out;
    for (const std::string& p : paths) out.push_back(code_from_json(load_json_file(p)));
    return out;
}

std::vector<EPReal> load_params(const std::vector<std::string>& paths) {
    std::vector<EPReal> out;
    for (const std::string& p : paths) out.push_back(ep_real_from_json(load_json_file(p)));
    return out;
}

TreeCondition random_tree(std::mt19937_64& rng, std::size_t max_depth) {
    std::vector<Node> out;
    std::vector<Node> frontier{Node{}};
    while (!frontier.empty()) {
        Node n = frontier.back();
        frontier.pop_back();
        if (n.size() >= max_depth || rng() % 100 < 45) {
            out.push_back(n);
            continue;
        }
        switch (rng() % 3) {
            case 0: frontier.push_back(n.child(0)); break;
            case 1: frontier.push_back(n.child(1)); break;
            default:
                frontier.push_back(n.child(0));
                frontier.push_back(n.child(1));
        }
    }
    return TreeCondition::from_leaves(out);
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    Ctx ctx;
    ctx.out = &out;

    CLI::App app{"finite-stage toolkit for perfect-tree forcing combinatorics"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "human";
    app.add_option("--format", format, "output mode: human, log, json")
        ->check(CLI::IsMember({"human", "log", "json"}));
    app.add_option("--seed", ctx.seed, "seed for randomized property commands");

    // ---- tree ----------------------------------------------------------
    auto* tree = app.add_subcommand("tree", "splitting structure of a single condition");
    std::string tree_file, tree_other, tree_node;
    std::size_t tree_level = 0;
    bool tree_has_level = false;
    auto* tree_levels = tree->add_subcommand("levels", "print a splitting level");
    tree_levels->add_option("--tree", tree_file, "leaf-list JSON file")->required();
    tree_levels->add_option("--level", tree_level, "level index")->required();
    auto* tree_restrict = tree->add_subcommand("restrict", "restrict to a node");
    tree_restrict->add_option("--tree", tree_file)->required();
    tree_restrict->add_option("--node", tree_node)->required();
    auto* tree_leq = tree->add_subcommand("leq", "ordering check");
    tree_leq->add_option("--left", tree_file)->required();
    tree_leq->add_option("--right", tree_other)->required();
    tree_leq->add_option("--level", tree_level)->each([&](const std::string&) {
        tree_has_level = true;
    });

    // ---- suitable ------------------------------------------------------
    auto* suitable = app.add_subcommand("suitable", "suitable functions and antichains");
    std::string suit_cond, suit_coords = "";
    std::size_t suit_level = 0;
    std::int64_t suit_drop = -1;
    std::size_t fuzz_count = 20;
    auto* suit_enum = suitable->add_subcommand("enumerate", "list suitable functions");
    suit_enum->add_option("--condition", suit_cond)->required();
    suit_enum->add_option("--coords", suit_coords, "comma separated F")->required();
    suit_enum->add_option("--level", suit_level)->required();
    auto* suit_verify = suitable->add_subcommand("verify", "check the antichain");
    suit_verify->add_option("--condition", suit_cond)->required();
    suit_verify->add_option("--coords", suit_coords)->required();
    suit_verify->add_option("--level", suit_level)->required();
    suit_verify->add_option("--drop", suit_drop, "drop one cell first (mutation hook)");
    auto* suit_fuzz = suitable->add_subcommand("fuzz", "antichains on random conditions");
    suit_fuzz->add_option("--count", fuzz_count);

    // ---- decide --------------------------------------------------------
    auto* decide = app.add_subcommand("decide", "pointwise and formula forcing");
    std::string dec_cond;
    std::vector<std::string> dec_codes, dec_params;
    std::string dec_formula;
    std::int64_t dec_index = -1;
    bool dec_equiv = false;
    decide->add_option("--condition", dec_cond)->required();
    decide->add_option("--code", dec_codes, "code file (repeatable)");
    decide->add_option("--param", dec_params, "parameter real file (repeatable)");
    decide->add_option("--formula", dec_formula, "formula text");
    decide->add_option("--index", dec_index, "output index for a value decision");
    decide->add_flag("--equivalence", dec_equiv, "run the two-sided check");

    // ---- word ----------------------------------------------------------
    auto* word = app.add_subcommand("word", "free-group word machinery");
    std::string word_text, word_rep, word_x;
    std::uint64_t word_bound = 64;
    std::size_t word_maxlen = 2;
    auto add_word_cmd = [&](const char* name, const char* desc, bool positional) {
        auto* cmd = word->add_subcommand(name, desc);
        if (positional) cmd->add_option("word", word_text, "the word")->required();
        cmd->add_option("--rep", word_rep, "representation JSON file");
        return cmd;
    };
    add_word_cmd("reduce", "reduced form", true);
    add_word_cmd("nice", "nice decomposition", true);
    add_word_cmd("split", "split into a rotation in W_A or a nice word", true);
    auto* word_fix = add_word_cmd("fix", "fixpoint report", true);
    word_fix->add_option("--bound", word_bound);
    auto* word_audit = word->add_subcommand("audit", "cofinitary sweep");
    word_audit->add_option("--rep", word_rep);
    word_audit->add_option("--x", word_x, "x backend permutation file")->required();
    word_audit->add_option("--max-len", word_maxlen);
    word_audit->add_option("--bound", word_bound);

    // ---- extend --------------------------------------------------------
    auto* extend = app.add_subcommand("extend", "domain/range extension certificates");
    std::string ext_rep, ext_inj;
    std::vector<std::string> ext_words;
    std::uint64_t ext_point = 0;
    auto* ext_dom = extend->add_subcommand("domain", "add a point to the domain");
    auto* ext_ran = extend->add_subcommand("range", "add a point to the range");
    for (auto* cmd : {ext_dom, ext_ran}) {
        cmd->add_option("--rep", ext_rep);
        cmd->add_option("--injection", ext_inj, "partial injection JSON file");
        cmd->add_option("--word", ext_words, "nice word to preserve (repeatable)");
        cmd->add_option("--point", ext_point)->required();
    }

    // ---- eliminate -----------------------------------------------------
    auto* eliminate = app.add_subcommand("eliminate", "finite-round engines");
    std::string eli_cond, eli_code, eli_family, eli_rep, eli_mode = "infinite";
    std::size_t eli_rounds = 1;
    auto* eli_ed = eliminate->add_subcommand("ed", "eventually different families");
    eli_ed->add_option("--family", eli_family)->required();
    auto* eli_ad = eliminate->add_subcommand("ad", "almost disjoint families");
    eli_ad->add_option("--family", eli_family)->required();
    eli_ad->add_option("--mode", eli_mode)->check(CLI::IsMember({"finite", "infinite"}));
    auto* eli_mcg = eliminate->add_subcommand("mcg", "maximal cofinitary groups");
    eli_mcg->add_option("--rep", eli_rep);
    for (auto* cmd : {eli_ed, eli_ad, eli_mcg}) {
        cmd->add_option("--condition", eli_cond)->required();
        cmd->add_option("--code", eli_code)->required();
        cmd->add_option("--rounds", eli_rounds);
    }

    // ---- type ----------------------------------------------------------
    auto* type = app.add_subcommand("type", "arithmetical type registry");
    std::string type_family, type_candidate;
    auto* type_check = type->add_subcommand("check", "is the family of its type");
    type_check->add_option("--family", type_family)->required();
    auto* type_intr = type->add_subcommand("intruder", "is the candidate an intruder");
    type_intr->add_option("--family", type_family)->required();
    type_intr->add_option("--candidate", type_candidate)->required();

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "usage error: " << e.what() << '\n';
        return 2;
    }
    ctx.format = format == "human" ? Format::Human
                                   : (format == "log" ? Format::Log : Format::JsonOut);

    try {
        // -- tree
        if (tree_levels->parsed()) {
            TreeCondition t = tree_from_json(load_json_file(tree_file));
            auto level = t.split_level(tree_level);
            if (ctx.format == Format::JsonOut) {
                Json nodes = Json::array();
                for (const Node& n : level) nodes.push_back(n.bits);
                ctx.emit_json(Json{{"level", tree_level}, {"nodes", nodes}});
            } else {
                std::ostringstream os;
                os << "spl_" << tree_level << " =";
                for (const Node& n : level) os << ' ' << '"' << n.bits << '"';
                out << os.str() << '\n';
            }
            return 0;
        }
        if (tree_restrict->parsed()) {
            TreeCondition t = tree_from_json(load_json_file(tree_file));
            TreeCondition r = t.restrict_node(Node{tree_node});
            if (ctx.format == Format::JsonOut) {
                ctx.emit_json(tree_to_json(r));
            } else {
                out << "restricted: " << r << '\n';
            }
            return 0;
        }
        if (tree_leq->parsed()) {
            TreeCondition a = tree_from_json(load_json_file(tree_file));
            TreeCondition b = tree_from_json(load_json_file(tree_other));
            bool ok = a.leq(b, tree_has_level ? std::optional<std::size_t>(tree_level)
                                              : std::nullopt);
            if (ctx.format == Format::JsonOut) {
                ctx.emit_json(Json{{"leq", ok}});
            } else {
                out << (ok ? "leq: true" : "leq: false") << '\n';
            }
            return ok ? 0 : 1;
        }

        // -- suitable
        if (suit_enum->parsed()) {
            ProductCondition p = product_from_json(load_json_file(suit_cond));
            auto sigmas = suitable_functions(p, parse_coords(suit_coords), suit_level);
            if (ctx.format == Format::JsonOut) {
                Json arr = Json::array();
                for (const auto& s : sigmas) {
                    Json entry = Json::object();
                    for (const auto& [alpha, node] : s.entries) {
                        entry[std::to_string(alpha)] = node.bits;
                    }
                    arr.push_back(entry);
                }
                ctx.emit_json(arr);
            } else {
                for (const auto& s : sigmas) out << s << '\n';
            }
            return 0;
        }
        if (suit_verify->parsed()) {
            ProductCondition p = product_from_json(load_json_file(suit_cond));
            auto F = parse_coords(suit_coords);
            std::vector<ProductCondition> cells;
            for (const auto& s : suitable_functions(p, F, suit_level)) {
                cells.push_back(restrict_suitable(p, s));
            }
            if (suit_drop >= 0 && static_cast<std::size_t>(suit_drop) < cells.size()) {
                cells.erase(cells.begin() + suit_drop);
            }
            Report report = antichain_report(p, F, suit_level, cells);
            if (ctx.format == Format::JsonOut) {
                Json fails = Json::array();
                for (const auto& f : report.failures) {
                    fails.push_back(Json{{"index", f.index}, {"check", f.check},
                                         {"detail", f.detail}});
                }
                ctx.emit_json(Json{{"ok", report.ok()}, {"failures", fails}});
            } else {
                out << (report.ok() ? "antichain: ok" : "antichain: FAIL") << '\n';
                for (const auto& f : report.failures) {
                    out << "  " << f.check << ": " << f.detail << '\n';
                }
            }
            return report.ok() ? 0 : 1;
        }
        if (suit_fuzz->parsed()) {
            std::mt19937_64 rng(ctx.seed);
            std::size_t failures = 0;
            for (std::size_t i = 0; i < fuzz_count; ++i) {
                ProductCondition p;
                std::size_t coords = 1 + rng() % 3;
                for (std::size_t a = 0; a < coords; ++a) {
                    p = p.with(a, random_tree(rng, 4));
                }
                std::set<std::size_t> F;
                for (std::size_t a = 0; a < 1 + rng() % coords; ++a) F.insert(a);
                if (!check_antichain(p, F, rng() % 3)) ++failures;
            }
            out << "fuzz: " << fuzz_count - failures << "/" << fuzz_count << " ok\n";
            return failures == 0 ? 0 : 1;
        }

        // -- decide
        if (decide->parsed()) {
            ProductCondition p = product_from_json(load_json_file(dec_cond));
            std::vector<Code> codes = load_codes(dec_codes);
            std::vector<EPReal> params = load_params(dec_params);
            if (dec_index >= 0) {
                if (codes.size() != 1) {
                    throw Error(ErrorKind::BadInput,
                                "value decisions take exactly one --code");
                }
                Verdict v = decide_value(p, codes[0], static_cast<std::size_t>(dec_index));
                if (ctx.format == Format::JsonOut) {
                    ctx.emit_json(verdict_to_json(v));
                } else if (v.kind == Verdict::Kind::Forced) {
                    out << "Forced(" << v.value << ")\n";
                } else if (v.kind == Verdict::Kind::NotForced) {
                    out << "NotForced witness=" << *v.witness_a << " disagrees="
                        << *v.witness_b << '\n';
                } else {
                    out << "Undetermined\n";
                }
                return v.kind == Verdict::Kind::Forced ? 0
                       : v.kind == Verdict::Kind::NotForced ? 1 : 3;
            }
            if (dec_formula.empty()) {
                throw Error(ErrorKind::BadInput, "decide needs --formula or --index");
            }
            Formula f = parse_formula(dec_formula);
            if (dec_equiv) {
                bool ok = equivalence_check(p, codes, params, f);
                if (ctx.format == Format::JsonOut) {
                    ctx.emit_json(Json{{"equivalence", ok}});
                } else {
                    out << (ok ? "equivalence: true" : "equivalence: false") << '\n';
                }
                return ok ? 0 : 1;
            }
            ForceVerdict v = forces(p, codes, params, f);
            if (ctx.format == Format::JsonOut) {
                ctx.emit_json(force_verdict_to_json(v));
            } else {
                switch (v.kind) {
                    case ForceVerdict::Kind::ForcedTrue: out << "ForcedTrue\n"; break;
                    case ForceVerdict::Kind::ForcedFalse: out << "ForcedFalse\n"; break;
                    case ForceVerdict::Kind::Neither:
                        out << "Neither q_true=" << product_to_json(*v.q_true).dump()
                            << " q_false=" << product_to_json(*v.q_false).dump() << '\n';
                        break;
                    case ForceVerdict::Kind::BudgetExceeded:
                        out << "BudgetExceeded: " << v.reason << '\n';
                        break;
                }
            }
            switch (v.kind) {
                case ForceVerdict::Kind::ForcedTrue: return 0;
                case ForceVerdict::Kind::BudgetExceeded: return 3;
                default: return 1;
            }
        }

        // -- word
        if (word->parsed()) {
            Word w = Word::parse(word_text);
            for (auto* sub : word->get_subcommands()) {
                const std::string& name = sub->get_name();
                if (name == "reduce") {
                    Word r = reduce(w);
                    if (ctx.format == Format::JsonOut) {
                        ctx.emit_json(Json{{"reduced", render_word(r)}});
                    } else {
                        out << "reduced: " << render_word(r) << '\n';
                    }
                    return 0;
                }
                if (name == "nice") {
                    Representation rho = with_default_backends(load_rep(word_rep), w);
                    auto nd = is_nice(rho, reduce(w));
                    if (ctx.format == Format::JsonOut) {
                        Json j{{"nice", nd.has_value()}};
                        if (nd && nd->pure_power) j["pure_power"] = *nd->pure_power;
                        if (nd && !nd->pure_power) {
                            Json blocks = Json::array();
                            for (const auto& [block, k] : nd->blocks) {
                                blocks.push_back(Json{{"block", render_word(block)},
                                                      {"power", k}});
                            }
                            j["blocks"] = blocks;
                            j["degree"] = nd->degree;
                        }
                        ctx.emit_json(j);
                        return nd ? 0 : 1;
                    }
                    if (!nd) {
                        out << "nice: no\n";
                        return 1;
                    }
                    if (nd->pure_power) {
                        out << "nice: pure power x^" << *nd->pure_power << '\n';
                    } else {
                        out << "nice: blocks";
                        for (const auto& [block, k] : nd->blocks) {
                            out << " (" << render_word(block) << ", " << k << ')';
                        }
                        out << " degree " << nd->degree << '\n';
                    }
                    return 0;
                }
                if (name == "split") {
                    Representation rho = with_default_backends(load_rep(word_rep), w);
                    SplitResult r = split_to_nice(rho, reduce(w));
                    const char* cls = r.cls == SplitResult::Class::InWA ? "in_WA" : "nice";
                    if (ctx.format == Format::JsonOut) {
                        ctx.emit_json(Json{{"u", render_word(r.u)},
                                           {"v", render_word(r.v)},
                                           {"rotated", render_word(r.rotated)},
                                           {"class", cls}});
                    } else {
                        out << "split: (" << render_word(r.u) << " | " << render_word(r.v)
                            << "); rotated: " << render_word(r.rotated)
                            << "; class: " << cls << '\n';
                    }
                    return 0;
                }
                if (name == "fix") {
                    Representation rho = with_default_backends(load_rep(word_rep), w);
                    FixReport rep = fix_report(rho, reduce(w), word_bound);
                    if (ctx.format == Format::JsonOut) {
                        Json j{{"bound", word_bound},
                               {"fixpoints", rep.fixpoints},
                               {"tail", rep.tail == FixReport::Tail::Finite
                                            ? "finite"
                                            : rep.tail == FixReport::Tail::Cofinal
                                                  ? "cofinal"
                                                  : "unknown-partial"}};
                        if (rep.tail == FixReport::Tail::Cofinal) {
                            j["classes"] = rep.cofinal_classes;
                            j["period"] = rep.period;
                        }
                        ctx.emit_json(j);
                        return 0;
                    }
                    out << "fixpoints below " << word_bound << ":";
                    for (std::uint64_t n : rep.fixpoints) out << ' ' << n;
                    out << "\ntail: ";
                    switch (rep.tail) {
                        case FixReport::Tail::Finite: out << "finite"; break;
                        case FixReport::Tail::UnknownPartial: out << "unknown-partial"; break;
                        case FixReport::Tail::Cofinal:
                            out << "cofinal in residue classes {";
                            for (std::size_t i = 0; i < rep.cofinal_classes.size(); ++i) {
                                if (i) out << ',';
                                out << rep.cofinal_classes[i];
                            }
                            out << "} mod " << rep.period;
                            break;
                    }
                    out << '\n';
                    return 0;
                }
            }
            if (word_audit->parsed()) {
                Representation rho = load_rep(word_rep);
                EAPermutation x = ea_permutation_from_json(load_json_file(word_x));
                Report report = cofinitary_audit(rho, x, word_maxlen, word_bound);
                if (ctx.format == Format::JsonOut) {
                    Json fails = Json::array();
                    for (const auto& f : report.failures) {
                        fails.push_back(Json{{"check", f.check}, {"detail", f.detail}});
                    }
                    ctx.emit_json(Json{{"ok", report.ok()}, {"failures", fails}});
                } else {
                    out << (report.ok() ? "audit: ok" : "audit: FAIL") << '\n';
                    for (const auto& f : report.failures) {
                        out << "  " << f.check << ": " << f.detail << '\n';
                    }
                }
                return report.ok() ? 0 : 1;
            }
        }

        // -- extend
        if (ext_dom->parsed() || ext_ran->parsed()) {
            Representation rho = load_rep(ext_rep);
            PartialInjection s;
            if (!ext_inj.empty()) {
                s = partial_injection_from_json(load_json_file(ext_inj));
            }
            std::vector<Word> w0;
            for (const std::string& text : ext_words) {
                Word w = reduce(Word::parse(text));
                rho = with_default_backends(rho, w);
                w0.push_back(w);
            }
            ExtensionCertificate cert = ext_dom->parsed()
                                            ? extend_domain(rho, s, w0, ext_point)
                                            : extend_range(rho, s, w0, ext_point);
            ctx.emit_lines(certificate_log(cert));
            return 0;
        }

        // -- eliminate
        if (eli_ed->parsed() || eli_ad->parsed() || eli_mcg->parsed()) {
            ProductCondition p = product_from_json(load_json_file(eli_cond));
            Code g = code_from_json(load_json_file(eli_code));
            if (eli_mcg->parsed()) {
                Representation rho = load_rep(eli_rep);
                if (rho.alphabet.empty()) {
                    rho.alphabet["a"] = EAPermutation::pair_swap();
                }
                McgTrace trace = mcg_eliminate(rho, p, g, eli_rounds);
                ctx.emit_lines(trace_log(trace));
                return trace.all_ok() ? 0 : 1;
            }
            auto [type, family] = family_from_json(load_json_file(eli_family));
            EliminationTrace trace;
            if (eli_ed->parsed()) {
                if (type.member_kind != BackendKind::Real) {
                    throw Error(ErrorKind::BackendMismatch,
                                "ed elimination needs a real-backed family");
                }
                std::vector<EPReal> reals;
                for (const Backend& b : family.members) {
                    reals.push_back(std::get<EPReal>(b));
                }
                trace = ed_eliminate(reals, p, g, eli_rounds);
            } else {
                if (type.member_kind != BackendKind::Set) {
                    throw Error(ErrorKind::BackendMismatch,
                                "ad elimination needs a set-backed family");
                }
                std::vector<PeriodicSet> sets;
                for (const Backend& b : family.members) {
                    sets.push_back(std::get<PeriodicSet>(b));
                }
                trace = ad_eliminate(sets, p, g, eli_rounds,
                                     eli_mode == "finite" ? AdMode::FiniteBranch
                                                          : AdMode::InfiniteBranch);
            }
            ctx.emit_lines(trace_log(trace));
            return trace.all_ok() ? 0 : 1;
        }

        // -- type
        if (type_check->parsed()) {
            auto [t, family] = family_from_json(load_json_file(type_family));
            bool ok = is_of_type(t, family);
            if (ctx.format == Format::JsonOut) {
                ctx.emit_json(Json{{"type", t.name}, {"of_type", ok}});
            } else {
                out << (ok ? "of-type: true" : "of-type: false") << '\n';
            }
            return ok ? 0 : 1;
        }
        if (type_intr->parsed()) {
            auto [t, family] = family_from_json(load_json_file(type_family));
            Backend g = backend_from_json(load_json_file(type_candidate), t.intruder_kind);
            bool ok = is_intruder(t, g, family);
            if (ctx.format == Format::JsonOut) {
                ctx.emit_json(Json{{"type", t.name}, {"intruder", ok}});
            } else {
                out << (ok ? "intruder: true" : "intruder: false") << '\n';
            }
            return ok ? 0 : 1;
        }

        err << "usage error: no actionable subcommand\n";
        return 2;
    } catch (const BudgetExceeded& e) {
        err << "budget exceeded: " << e.what() << '\n';
        return 3;
    } catch (const PremiseFailure& e) {
        err << "premise failure: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        err << "parse error at position " << e.position() << ": " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace sacks
