#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "treerank/cli.hpp"
#include "treerank/fixture.hpp"

using namespace treerank;

namespace {

struct Run {
    int rc = 0;
    std::string out;
    std::string err;
    json report() const { return json::parse(out); }
};

Run run(std::vector<std::string> args, const std::string& input = "")
{
    std::istringstream in(input);
    std::ostringstream out, err;
    Run r;
    r.rc = run_cli(args, in, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string fixture(const std::string& rel) { return std::string(TREERANK_FIXTURE_DIR) + "/" + rel; }

json nodes_of(std::initializer_list<NodeSeq> list)
{
    json out = json::array();
    for (const auto& s : list) out.push_back(node_to_json(s));
    return out;
}

} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("analyze reports rk of the root of pairs")
    {
        auto r = run({"analyze", "--tree", "gallery:pairs", "--bound", "32", "--boundary-bound", "12", "--cap", "8"});
        REQUIRE(r.rc == 0);
        auto rep = r.report();
        CHECK(rep["nodes"][0]["node"] == json::array());
        CHECK(rep["nodes"][0]["rk"] == 2);
        CHECK(rep["nodes"][0]["g"] == 2);
        CHECK(rep["bounds"] == json{{"boundary_bound", 12}, {"universe_bound", 32}, {"cap", 8}});
        CHECK(rep["root_stabilization"]["stable"] == true);
        CHECK(rep["seed"] == 1);
    }

    TEST_CASE("analyze one node")
    {
        auto rep = run({"analyze", "--tree", "gallery:depthk:3", "--node", "[0, 5]"}).report();
        CHECK(rep["node"]["g"] == 1);
        CHECK(rep["node"]["rk"] == 1);
        CHECK(rep["node"]["best_boundary"] == 5);
        auto full = run({"analyze", "--tree", "gallery:fullspread", "--node", "[]"}).report();
        CHECK(full["node"]["g"] == "at_least(8)");
        CHECK(full["node"]["regular"] == false);
        CHECK(full["node"]["rk"].contains("infinite_evidence"));
    }

    TEST_CASE("branch on chain gives yes and a five-node prefix")
    {
        auto r = run({"branch", "--tree", "gallery:chain", "--prefix-len", "5"});
        REQUIRE(r.rc == 0);
        auto rep = r.report();
        CHECK(rep["verdict"] == "yes");
        CHECK(rep["prefix"] == nodes_of({{}, {0}, {0, 1}, {0, 1, 2}, {0, 1, 2, 3}}));
        auto pairs = run({"branch", "--tree", "gallery:pairs", "--konig"}).report();
        CHECK(pairs["verdict"] == "no");
        CHECK(pairs["konig"]["locally_finite"] == false);
        CHECK(run({"branch", "--tree", "gallery:fullspread"}).report()["case"] == 1);
    }

    TEST_CASE("interp add query on the canonical realizer")
    {
        auto r = run({"interp", "add", "--size", "6", "--query", "2,3,5"});
        REQUIRE(r.rc == 0);
        CHECK(r.report()["holds"] == true);
        CHECK(r.report()["formula"] == true);
        CHECK(run({"interp", "add", "--size", "6", "--query", "2,3,6"}).report()["holds"] == false);
    }

    TEST_CASE("interp mul law names both readings")
    {
        auto rep = run({"interp", "mul", "--size", "6", "--law"}).report();
        CHECK(rep["rows"] == 24);
        CHECK(rep["law"]["single_valued"] == true);
        CHECK(rep["law"]["matches_affine"] == true);
        CHECK(rep["law"]["n_times_m_plus_1"]["agree"] == 1);
        CHECK(rep["law"]["summary"].get<std::string>().find("n*m+1") != std::string::npos);
    }

    TEST_CASE("interp on structure fixtures")
    {
        auto fib = run({"interp", "check-number", "--structure", fixture("structures/fib1.json")});
        CHECK(fib.rc == 0);
        CHECK(fib.report()["number"].is_null());
        auto r0 = run({"interp", "check-number", "--structure", fixture("structures/regression/r00.json")}).report();
        CHECK(r0["number"] == 2);
        auto arith = run({"interp", "check-arith", "--size", "4"}).report();
        CHECK(arith["arithmetic"] == true);
        CHECK(arith["formula"] == true);
        auto tmp = run({"interp", "tmp", "--tree", "gallery:depthk:3"});
        CHECK(tmp.rc == 0);
        CHECK(tmp.report()["pipeline"]["u"] == json{11, 16, 21});
    }

    TEST_CASE("fo eval and builtin")
    {
        auto r = run({"fo", "eval", "--size", "3", "--formula", "exists i:idx . fiber(2, i) = {x} + {y}", "--let", "x=0",
                      "--let", "y=1", "--expand"});
        REQUIRE(r.rc == 0);
        CHECK(r.report()["value"] == true);
        CHECK(r.report()["expanded"]["value"] == true);
        auto unbound = run({"fo", "eval", "--size", "3", "--formula", "x in S"});
        CHECK(unbound.rc == 2);
        CHECK(unbound.err.find("UnboundVariable") != std::string::npos);
        CHECK(run({"fo", "eval", "--size", "3", "--formula", "forall x:nat . true"}).rc == 2);
        auto b = run({"fo", "builtin", "--name", "multiplication", "--size", "4", "--query", "2,2,3"}).report();
        CHECK(b["free_vars"] == json{"l", "m", "n"});
        CHECK(b["value"] == true);
        CHECK(run({"fo", "builtin", "--name", "division"}).rc == 2);
    }

    TEST_CASE("batch game follows optimal play")
    {
        auto rep = run({"game", "--tree", "gallery:depthk:3", "--node", "[]"}).report();
        CHECK(rep["g"] == 3);
        CHECK(rep["transcript"]["replies"] == 3);
        CHECK(rep["transcript"]["terminal"] == "second_stuck");
    }

    TEST_CASE("interactive game reads boundaries")
    {
        auto r = run({"game", "--tree", "gallery:depthk:2", "--node", "[]", "--interactive"}, "5\nfoo\n99\n8\n9\n");
        REQUIRE(r.rc == 0);
        auto t = r.report()["transcript"];
        REQUIRE(t["rounds"].size() == 3);
        CHECK(t["rounds"][0]["boundary"] == 5);
        CHECK(t["rounds"][0]["reply"] == json{6});
        CHECK(t["rounds"][1]["reply"] == json{6, 9});
        CHECK(t["rounds"][2]["reply"].is_null());
        CHECK(t["terminal"] == "second_stuck");
        CHECK(r.err.find("not a number: foo") != std::string::npos);
        CHECK(r.err.find("outside the window") != std::string::npos);

        auto quit = run({"game", "--tree", "gallery:depthk:2", "--node", "[]", "--interactive"}, "q\n");
        CHECK(quit.report()["transcript"]["terminal"] == "stopped");
    }

    TEST_CASE("usage errors exit 2")
    {
        CHECK(run({"game", "--tree", "gallery:pairs", "--node", "[0,x"}).rc == 2);
        CHECK(run({"game", "--tree", "gallery:pairs", "--node", "[3,1]"}).rc == 2);
        CHECK(run({"analyze", "--tree", "gallery:pairs", "--node", "[0"}).err.find("UsageError") != std::string::npos);
        CHECK(run({"game", "--tree", "gallery:pairs", "--node", "[0,1,2]"}).rc == 2);  // not a node
        CHECK(run({"analyze"}).rc == 2);
        CHECK(run({"analyze", "--tree", "gallery:nosuch"}).rc == 2);
        CHECK(run({"analyze", "--tree", fixture("trees/not_prefix_closed.json")}).rc == 2);
        CHECK(run({"analyze", "--tree", fixture("trees/missing.json")}).rc == 2);
        CHECK(run({"frobnicate"}).rc == 2);
        CHECK(run({}).rc == 2);
        CHECK(run({"analyze", "--tree", "gallery:pairs", "--bound", "4", "--boundary-bound", "12"}).rc == 2);
        CHECK(run({"interp", "add", "--size", "6", "--query", "1,2"}).rc == 2);
        CHECK(run({"lemmas", "--suite", "nope"}).rc == 2);
        CHECK(run({"--format", "xml", "gallery"}).rc == 2);
    }

    TEST_CASE("bounds profile from the environment")
    {
        ::setenv("TREERANK_PROFILE", "quick", 1);
        auto quick = run({"gallery"});
        ::setenv("TREERANK_PROFILE", "bogus", 1);
        auto bogus = run({"gallery"});
        ::setenv("TREERANK_PROFILE", "wide", 1);
        auto wide = run({"gallery", "--cap", "3"});
        ::unsetenv("TREERANK_PROFILE");
        CHECK(quick.report()["bounds"] == json{{"boundary_bound", 6}, {"universe_bound", 40}, {"cap", 6}});
        CHECK(bogus.rc == 2);
        CHECK(wide.report()["bounds"] == json{{"boundary_bound", 16}, {"universe_bound", 128}, {"cap", 3}});
        CHECK(run({"gallery"}).report()["bounds"]["universe_bound"] == 96);
    }

    TEST_CASE("explicit fixtures round-trip through truncation")
    {
        auto path = fixture("trees/small_explicit.json");
        std::ifstream f(path);
        json original = json::parse(f);
        auto rep = run({"gallery", "--tree", path, "--truncate", "96"}).report();
        auto dumped = rep["fixture"];
        CHECK(dumped["kind"] == "explicit");
        auto sorted = [](json nodes) {
            std::vector<std::vector<Nat>> v = nodes.get<std::vector<std::vector<Nat>>>();
            std::sort(v.begin(), v.end());
            return v;
        };
        CHECK(sorted(dumped["nodes"]) == sorted(original["nodes"]));
        // a second pass is the identity
        auto tmp = std::filesystem::temp_directory_path() / "treerank_roundtrip.json";
        std::ofstream(tmp) << dumped.dump();
        CHECK(run({"gallery", "--tree", tmp.string(), "--truncate", "96"}).report()["fixture"] == dumped);
        std::filesystem::remove(tmp);

        auto gen = run({"gallery", "--tree", fixture("trees/depthk3.json")}).report();
        CHECK(gen["fixture"] == json{{"kind", "generator"}, {"name", "depthk"}, {"params", {{"k", 3}}}});
    }

    TEST_CASE("reports are byte-identical across runs")
    {
        std::vector<std::vector<std::string>> commands{
            {"analyze", "--tree", "gallery:bushspine", "--max-element", "6"},
            {"game", "--tree", "gallery:depthk:4", "--node", "[]"},
            {"branch", "--tree", "gallery:bushspine", "--prefix-len", "8"},
            {"interp", "mul", "--size", "5", "--law"},
            {"lemmas", "--suite", "interp", "--seed", "77"},
            {"fo", "builtin", "--name", "realises_number"},
            {"gallery", "--tree", "gallery:pairs", "--truncate", "5", "--format", "text"},
        };
        for (const auto& cmd : commands) {
            auto a = run(cmd), b = run(cmd);
            CHECK(a.rc == 0);
            CHECK(a.out == b.out);
            CHECK(!a.out.empty());
        }
        CHECK(run({"lemmas", "--suite", "interp", "--seed", "77"}).report()["seed"] == 77);
    }

    TEST_CASE("text format prints one line per leaf")
    {
        auto r = run({"interp", "add", "--size", "3", "--query", "1,1,2", "--format", "text"});
        CHECK(r.out.find("holds = true\n") != std::string::npos);
        CHECK(r.out.find("query = [1,1,2]\n") != std::string::npos);
        CHECK(r.out.find("bounds.cap = 8\n") != std::string::npos);
    }

    TEST_CASE("--output writes the report to a file")
    {
        auto tmp = std::filesystem::temp_directory_path() / "treerank_report.json";
        auto r = run({"gallery", "--output", tmp.string()});
        CHECK(r.rc == 0);
        CHECK(r.out.empty());
        std::ifstream f(tmp);
        CHECK(json::parse(f)["command"] == "gallery");
        std::filesystem::remove(tmp);
    }
}
