#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../tools/cli.hpp"
#include "sacks/serialize.hpp"

using namespace sacks;

namespace {

struct Run {
    int status;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int status = run_cli(std::move(args), out, err);
    return {status, out.str(), err.str()};
}

std::filesystem::path write_file(const std::string& name, const std::string& content) {
    auto dir = std::filesystem::temp_directory_path() / "sacks-cli-tests";
    std::filesystem::create_directories(dir);
    auto path = dir / name;
    std::ofstream f(path);
    f << content;
    return path;
}

std::string projection_code_file() {
    Code proj = Code::tabulate(1, [](const Matrix& m) {
        std::vector<std::uint64_t> out;
        if (!m.rows.empty()) out.push_back(m.rows[0].bit(0));
        return out;
    });
    return write_file("proj.json", code_to_json(proj).dump()).string();
}

}  // namespace

TEST_CASE("decide matches the worked example") {
    std::string cond = write_file("one_sided.json", R"({"0": ["1"]})").string();
    std::string code = projection_code_file();
    Run r = run({"decide", "--condition", cond, "--code", code, "--formula", "v0(0)=1"});
    CHECK(r.status == 0);
    CHECK(r.out == "ForcedTrue\n");

    std::string full = write_file("full.json", "{}").string();
    Run neither = run({"decide", "--condition", full, "--code", code, "--formula",
                       "v0(0)=1"});
    CHECK(neither.status == 1);
    CHECK(neither.out.rfind("Neither", 0) == 0);

    Run equiv = run({"decide", "--condition", full, "--code", code, "--formula",
                     "v0(0)=1", "--equivalence"});
    CHECK(equiv.status == 0);
    CHECK(equiv.out == "equivalence: true\n");

    Run undet = run({"decide", "--condition", full, "--code", code, "--index", "5"});
    CHECK(undet.status == 3);

    Run forced = run({"decide", "--condition", cond, "--code", code, "--index", "0"});
    CHECK(forced.status == 0);
    CHECK(forced.out == "Forced(1)\n");
}

TEST_CASE("word split matches the worked example") {
    Run r = run({"word", "split", "x a x"});
    CHECK(r.status == 0);
    CHECK(r.out == "split: (x | a x); rotated: a x^2; class: nice\n");

    Run wa = run({"word", "split", "x a x^-1"});
    CHECK(wa.status == 0);
    CHECK(wa.out == "split: (x | a x^-1); rotated: a; class: in_WA\n");
}

TEST_CASE("malformed input exits 2 with a diagnostic") {
    std::string bad = write_file("bad_tree.json", R"(["01", "02"])").string();
    Run r = run({"tree", "levels", "--tree", bad, "--level", "0"});
    CHECK(r.status == 2);
    CHECK(r.err.find("error") != std::string::npos);

    std::string truncated = write_file("trunc.json", R"(["01")").string();
    Run r2 = run({"tree", "levels", "--tree", truncated, "--level", "0"});
    CHECK(r2.status == 2);
    CHECK(r2.err.find("parse error") != std::string::npos);

    Run r3 = run({"tree", "levels", "--level", "0"});
    CHECK(r3.status == 2);

    std::string cond = write_file("full2.json", "{}").string();
    Run r4 = run({"decide", "--condition", cond, "--code", projection_code_file(),
                  "--formula", "forall n < . v0(n)=0"});
    CHECK(r4.status == 2);
    CHECK(r4.err.find("position") != std::string::npos);
}

TEST_CASE("tree and suitable subcommands") {
    std::string full = write_file("full3.json", R"([""])").string();
    std::string left = write_file("left.json", R"(["0"])").string();
    Run leq = run({"tree", "leq", "--left", left, "--right", full});
    CHECK(leq.status == 0);
    Run geq = run({"tree", "leq", "--left", full, "--right", left});
    CHECK(geq.status == 1);

    Run restrict = run({"tree", "restrict", "--tree", full, "--node", "01"});
    CHECK(restrict.status == 0);
    CHECK(restrict.out == "restricted: {\"01\"}\n");

    std::string cond = write_file("prod.json", "{}").string();
    Run en = run({"suitable", "enumerate", "--condition", cond, "--coords", "0",
                  "--level", "0"});
    CHECK(en.status == 0);
    CHECK(en.out == "{0->\"0\"}\n{0->\"1\"}\n");

    Run verify = run({"suitable", "verify", "--condition", cond, "--coords", "0,1",
                      "--level", "1"});
    CHECK(verify.status == 0);
    Run mutated = run({"suitable", "verify", "--condition", cond, "--coords", "0",
                       "--level", "0", "--drop", "0"});
    CHECK(mutated.status == 1);

    Run fuzz = run({"suitable", "fuzz", "--count", "5"});
    CHECK(fuzz.status == 0);
}

TEST_CASE("type subcommands") {
    FamilyInstance f;
    f.members.emplace_back(EPReal{{}, {0}});
    f.members.emplace_back(EPReal{{}, {7}});
    std::string fam = write_file("med.json", family_to_json("med", f).dump()).string();
    CHECK(run({"type", "check", "--family", fam}).status == 0);

    std::string good = write_file("intr.json", ep_real_to_json(EPReal{{}, {9}}).dump())
                           .string();
    CHECK(run({"type", "intruder", "--family", fam, "--candidate", good}).status == 0);
    std::string bad = write_file("notintr.json", ep_real_to_json(EPReal{{}, {7, 8}}).dump())
                          .string();
    CHECK(run({"type", "intruder", "--family", fam, "--candidate", bad}).status == 1);
}

TEST_CASE("eliminate and extend run end to end") {
    // med family {7} with the branch-reading window-96 code.
    Code g = Code::tabulate(2, [](const Matrix& m) {
        std::vector<std::uint64_t> out;
        if (m.rows.size() < 2) return out;
        std::uint64_t b = 8 * m.rows[0].bit(0) + 4 * m.rows[0].bit(1) +
                          2 * m.rows[1].bit(0) + m.rows[1].bit(1);
        for (std::uint64_t l = 0; l < 96; ++l) out.push_back(16 * l + 8 + b);
        return out;
    });
    std::string code = write_file("edcode.json", code_to_json(g).dump()).string();
    FamilyInstance f;
    f.members.emplace_back(EPReal{{}, {7}});
    std::string fam = write_file("edfam.json", family_to_json("med", f).dump()).string();
    std::string cond = write_file("edcond.json", "{}").string();

    Run ed = run({"eliminate", "ed", "--family", fam, "--condition", cond, "--code",
                  code, "--rounds", "2"});
    CHECK(ed.status == 0);
    CHECK(ed.out.find("ed.k round=0") != std::string::npos);
    CHECK(ed.out.find("pass") != std::string::npos);
    CHECK(ed.out.find("FAIL") == std::string::npos);

    // Byte-identical reruns.
    Run ed2 = run({"eliminate", "ed", "--family", fam, "--condition", cond, "--code",
                   code, "--rounds", "2"});
    CHECK(ed.out == ed2.out);

    Run ext = run({"extend", "domain", "--word", "a x", "--point", "2"});
    CHECK(ext.status == 0);
    CHECK(ext.out.find("extend M=") != std::string::npos);
}
