// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria.

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "oracle/naive_eval.hpp"
#include "oracle/naive_game.hpp"
#include "oracle/random_formula.hpp"
#include "treerank/branch.hpp"
#include "treerank/cli.hpp"
#include "treerank/error.hpp"
#include "treerank/fixture.hpp"
#include "treerank/formula.hpp"
#include "treerank/gallery.hpp"
#include "treerank/interp.hpp"
#include "treerank/rank.hpp"

using namespace treerank;
namespace fs = std::filesystem;

namespace {

const GameBounds kDesk{12, 96, 8};

/// Collects the first few problems of a criterion.
struct Problems {
    std::vector<std::string> items;
    std::size_t count = 0;

    void add(const std::string& what)
    {
        if (items.size() < 5) items.push_back(what);
        ++count;
    }
    bool empty() const { return count == 0; }
    std::string summary() const
    {
        std::string out = std::to_string(count) + " problem(s)";
        for (const auto& s : items) out += "; " + s;
        return out;
    }
};

std::vector<Nat> as_vec(const NodeSeq& s) { return {s.begin(), s.end()}; }

std::unique_ptr<TreePresentation> named(const std::string& name, Nat k = 0)
{
    if (name == "depthk") return gallery("depthk", {{"k", k}});
    return gallery(name);
}

std::string label(const std::string& name, Nat k) { return name == "depthk" ? "depthk(" + std::to_string(k) + ")" : name; }

// 1 ------------------------------------------------------------------------

std::string gallery_ground_truth(Problems& p)
{
    struct Case {
        std::string name;
        Nat k;
    };
    std::vector<Case> cases{{"pairs", 0}, {"chain", 0}, {"bushspine", 0}, {"fullspread", 0}};
    for (Nat k = 1; k <= 5; ++k) cases.push_back({"depthk", k});

    std::size_t compared = 0;
    for (const auto& c : cases) {
        auto tree = named(c.name, c.k);
        GameSolver solver(*tree, kDesk);
        oracle::NaiveMinimax naive(*tree, c.name, kDesk);
        const std::string who = label(c.name, c.k);

        // every node of the truncation with elements <= B: g and rk against the oracle
        for_each_node(*tree, kDesk.boundary_bound, [&](const NodeSeq& s) {
            auto e = solver.entry(s);
            const int nv = naive.value(as_vec(s)), nr = naive.rank(as_vec(s));
            if (e.value != nv || e.subtree_max != nr)
                p.add(who + " " + s.to_string() + ": solver " + std::to_string(e.value) + "/" + std::to_string(e.subtree_max) +
                      ", oracle " + std::to_string(nv) + "/" + std::to_string(nr));
            auto rk = rank(solver, s);
            if (rk.is_finite() != (nr < kDesk.cap) || (rk.is_finite() && rk.value != nr))
                p.add(who + " " + s.to_string() + ": rank " + rk.to_string() + " vs oracle " + std::to_string(nr));
            ++compared;
            return true;
        });

        auto g = [&](const NodeSeq& s) { return solver.survival_value(s); };
        auto rk = [&](const NodeSeq& s) { return rank(solver, s); };
        auto expect = [&](bool ok, const std::string& what) {
            if (!ok) p.add(who + ": " + what);
        };
        if (c.name == "pairs") {
            expect(g({}) == SurvivalValue::finite(2) && rk({}).is_finite() && rk({}).value == 2, "g(root) = rk(root) = 2");
            for (Nat a = 0; a <= 24; ++a) {
                expect(g({a}) == SurvivalValue::finite(1), "g([" + std::to_string(a) + "]) = 1");
                expect(rk({a}).is_finite() && rk({a}).value == 1, "rk([" + std::to_string(a) + "]) = 1");
            }
        } else if (c.name == "chain") {
            for_each_node(*tree, 24, [&](const NodeSeq& s) {
                expect(rk(s).is_finite() && rk(s).value == 0, "rk(" + s.to_string() + ") = 0");
                return true;
            });
        } else if (c.name == "depthk") {
            expect(g({}) == SurvivalValue::finite(c.k), "g(root) = k");
        } else if (c.name == "fullspread") {
            expect(g({}) == SurvivalValue::at_least(kDesk.cap), "g(root) = at_least(8)");
        } else if (c.name == "bushspine") {
            NodeSeq spine;
            for (Nat n = 0; n <= 20; ++n) {
                spine = spine.extended(n);
                expect(rk(spine).is_finite() && rk(spine).value == 2, "rk(" + spine.to_string() + ") = 2");
            }
        }
    }
    return std::to_string(compared) + " nodes compared with the naive minimax";
}

// 2 ------------------------------------------------------------------------

std::string rk0_suite(Problems& p)
{
    std::size_t classes = 0;
    std::vector<std::pair<std::string, Nat>> trees{{"chain", 0}, {"pairs", 0}, {"bushspine", 0}, {"fullspread", 0}};
    for (Nat k = 1; k <= 5; ++k) trees.emplace_back("depthk", k);
    Rk0Options opts;
    opts.incomparable_quota = 5;
    for (const auto& [name, k] : trees) {
        auto tree = named(name, k);
        GameSolver solver(*tree, kDesk);
        for (const auto& r : check_lemma_rk0_all(solver, 24, opts)) {
            ++classes;
            for (const auto& prop : r.properties)
                if (!prop.passed) p.add(label(name, k) + " " + r.node.to_string() + " " + prop.name + ": " + prop.detail);
        }
    }
    return std::to_string(classes) + " node classes, 5 properties each";
}

// 3 ------------------------------------------------------------------------

bool is_chain(const TreePresentation& tree, const BranchPrefix& prefix)
{
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (!tree.contains(prefix[i])) return false;
        if (i && (!is_initial_segment(prefix[i - 1], prefix[i]) || prefix[i].size() != prefix[i - 1].size() + 1)) return false;
    }
    return true;
}

std::string branch_decision(Problems& p)
{
    using E = BranchVerdict::Evidence;
    using T = BranchVerdict::Tag;
    const std::vector<std::tuple<std::string, Nat, T, E>> expected{
        {"pairs", 0, T::no, E::none},
        {"depthk", 3, T::no, E::none},
        {"chain", 0, T::yes, E::infinite_restricted_subtree},
        {"bushspine", 0, T::yes, E::infinite_restricted_subtree},
        {"fullspread", 0, T::yes, E::infinite_rank_node},
    };
    for (const auto& [name, k, tag, evidence] : expected) {
        auto v = branch_exists(*named(name, k), kDesk);
        if (v.tag != tag || v.evidence != evidence) p.add(label(name, k) + ": got " + v.to_string());
    }
    for (std::string name : {"chain", "bushspine"}) {
        auto tree = named(name);
        auto p20 = definable_branch_prefix(*tree, kDesk, 20);
        auto p21 = definable_branch_prefix(*tree, kDesk, 21);
        if (p20.size() != 20 || !is_chain(*tree, p20)) p.add(name + ": length-20 prefix is not a chain of nodes");
        if (p21.size() != 21 || !std::equal(p20.begin(), p20.end(), p21.begin())) p.add(name + ": prefix changes when extended to 21");
    }
    return "5 verdicts, prefixes of length 20/21 on chain and bushspine";
}

// 4 ------------------------------------------------------------------------

std::optional<int> naive_number(const std::vector<Mask>& fibers, const std::vector<Nat>& carrier)
{
    std::vector<oracle::ISet> sets;
    for (Mask m : fibers) {
        auto elems = mask_elements(m);
        sets.emplace_back(elems.begin(), elems.end());
    }
    return oracle::family_number(sets, {carrier.begin(), carrier.end()});
}

std::string interpretation_equivalence(Problems& p)
{
    for (unsigned family = 1; family < 256; ++family) {
        std::vector<Mask> fibers;
        for (Mask m = 0; m < 8; ++m)
            if (family >> m & 1U) fibers.push_back(m);
        auto st = structure_with_fibers({0, 1, 2}, fibers);
        auto direct = realises_number_direct(st);
        if (realises_number_formula(st) != direct.has_value() || direct != naive_number(fibers, {0, 1, 2}))
            p.add("family " + std::to_string(family));
    }
    std::mt19937 rng(4004);
    int realised = 0;
    for (int n = 0; n < 10000; ++n) {
        std::vector<Mask> fibers(8);
        const int k = std::uniform_int_distribution<int>(0, 4)(rng);
        std::vector<Mask> ks;
        for (Mask m = 0; m < 16; ++m)
            if (std::popcount(m) == k) ks.push_back(m);
        std::shuffle(ks.begin(), ks.end(), rng);
        const int mode = n % 3;
        for (std::size_t i = 0; i < 8; ++i) fibers[i] = mode == 0 ? rng() % 16 : ks[i % ks.size()];
        if (mode == 2) fibers[rng() % 8] = rng() % 16;
        auto st = structure_with_fibers({0, 1, 2, 3}, fibers);
        auto direct = realises_number_direct(st);
        if (realises_number_formula(st) != direct.has_value() || direct != naive_number(fibers, {0, 1, 2, 3}))
            p.add("random table " + std::to_string(n));
        realised += direct.has_value();
    }
    return "255 families over |S| = 3, 10000 tables over |S| = 4 (seed 4004, " + std::to_string(realised) + " realise a number)";
}

// 5 ------------------------------------------------------------------------

std::string arithmetic_encodings(Problems& p)
{
    auto st = canonical_realizer(6);
    std::map<Nat, int> num;
    for (Nat a : st.params) {
        auto k = realises_number_direct(st, a);
        if (!k) p.add("parameter " + std::to_string(a) + " realises no number");
        else num[a] = *k;
    }
    std::set<Triple> want;
    for (Nat n : st.params)
        for (Nat m : st.params)
            for (Nat l : st.params)
                if (num.count(n) && num.count(m) && num.count(l) && num[n] + num[m] == num[l] && num[l] <= 6) want.emplace(n, m, l);
    auto add = truth_table(st, add_rel);
    if (std::set<Triple>(add.begin(), add.end()) != want || add.size() != want.size())
        p.add("addition table has " + std::to_string(add.size()) + " rows, want " + std::to_string(want.size()));

    auto law = mul_law(st);
    if (!law.single_valued) p.add("multiplication table is not single-valued");
    // every true row is accounted for by the reported law
    for (const auto& [n, m, l] : truth_table(st, mul_rel)) {
        auto it = law.law.find({num[n], num[m]});
        if (it == law.law.end() || it->second != num[l]) p.add("row (" + std::to_string(n) + "," + std::to_string(m) + "," + std::to_string(l) + ") off the law");
    }
    return std::to_string(add.size()) + " addition rows = n + m; " + law.describe() + " (the remark reads l = n*m+1)";
}

// 6 ------------------------------------------------------------------------

std::string tmp_pipeline(Problems& p)
{
    std::string out;
    for (Nat k = 2; k <= 4; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        auto tree = gallery("depthk", {{"k", k}});
        auto r = run_tmp_pipeline(*tree, NodeSeq{}, kDesk, 10);
        GameSolver solver(*tree, kDesk);
        if (auto why = boundary_premise_violation(solver, r.witness.sets.a, r.witness.sets.b)) p.add("depthk(" + std::to_string(k) + ") premise: " + *why);
        if (r.witness.n != k - 1) p.add("depthk(" + std::to_string(k) + ") witness n = " + std::to_string(r.witness.n));
        if (static_cast<int>(r.checks.size()) != r.witness.n) p.add("depthk(" + std::to_string(k) + ") has bases for only some k");
        for (const auto& [base, c] : r.checks) {
            if (!c.part_i()) p.add("depthk(" + std::to_string(k) + ") base " + base.to_string() + ": gap patterns missing");
            if (!c.part_ii()) p.add("depthk(" + std::to_string(k) + ") base " + base.to_string() + ": " + std::to_string(c.max_gaps_hit) + " gaps hit");
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > 120) p.add("depthk(" + std::to_string(k) + ") took " + std::to_string(secs) + " s");
        std::ostringstream line;
        line.precision(2);
        line << std::fixed << "depthk(" << k << ") u = " << r.witness.u.to_string() << " v = " << r.witness.v.to_string() << " in " << secs << " s";
        out += (out.empty() ? "" : "; ") + line.str();
    }
    return out;
}

// 7 ------------------------------------------------------------------------

std::string evaluator_oracle(Problems& p)
{
    std::mt19937 rng(20240611);
    testgen::FormulaGen gen(rng);
    for (int n = 0; n < 1000; ++n) {
        auto st = testgen::random_structure(rng);
        auto f = gen.formula(5, {});
        if (testgen::formula_depth(f) > 5) p.add("formula deeper than 5");
        if (evaluate(st, f) != oracle::holds(st, f, {})) p.add("pair " + std::to_string(n) + ": " + to_string(f));
    }

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(fs::path(TREERANK_FIXTURE_DIR) / "structures" / "regression")) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.size() != 20) p.add(std::to_string(files.size()) + " regression fixtures, want 20");
    const auto add_ast = builtin("addition"), mul_ast = builtin("multiplication");
    for (const auto& path : files) {
        std::ifstream in(path);
        const auto doc = json::parse(in);
        const auto st = structure_from_json(doc);
        const auto& want = doc["expected"];
        const std::string name = path.filename().string();
        if (st.binary) {
            if (evaluate(st, builtin("realises_number")) != want["number_formula"].get<bool>()) p.add(name + " realises_number");
            continue;
        }
        if (evaluate(st, builtin("realises_arithmetic")) != want["arithmetic"].get<bool>()) p.add(name + " realises_arithmetic");
        auto via = [&](const Formula& f) {
            json rows = json::array();
            for (const auto& [n, m, l] : truth_table(st, [&](const FiniteStructure& s, Nat n, Nat m, Nat l) {
                     return evaluate(s, f, {{"n", n}, {"m", m}, {"l", l}});
                 }))
                rows.push_back({n, m, l});
            return rows;
        };
        if (via(add_ast) != want["addition"]) p.add(name + " addition");
        if (via(mul_ast) != want["multiplication"]) p.add(name + " multiplication");
    }
    return "1000 random pairs (seed 20240611, depth <= 5), " + std::to_string(files.size()) + " regression fixtures";
}

// 8 ------------------------------------------------------------------------

std::string capture(const std::string& command)
{
    std::string out;
    FILE* pipe = ::popen(command.c_str(), "r");
    if (!pipe) return "<popen failed>";
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    const int status = ::pclose(pipe);
    return status == 0 ? out : "<exit " + std::to_string(status) + ">" + out;
}

std::string cli_determinism(Problems& p)
{
    const std::string fixtures = TREERANK_FIXTURE_DIR;
    const std::vector<std::vector<std::string>> commands{
        {"analyze", "--tree", "gallery:pairs", "--bound", "32", "--boundary-bound", "12", "--cap", "8"},
        {"analyze", "--tree", "gallery:bushspine", "--max-element", "10"},
        {"analyze", "--tree", fixtures + "/trees/small_explicit.json"},
        {"game", "--tree", "gallery:depthk:4", "--node", "[]"},
        {"branch", "--tree", "gallery:bushspine", "--prefix-len", "10", "--konig"},
        {"branch", "--tree", "gallery:pairs"},
        {"interp", "check-number", "--structure", fixtures + "/structures/fib1.json"},
        {"interp", "check-arith", "--size", "5"},
        {"interp", "add", "--size", "6", "--query", "2,3,5"},
        {"interp", "mul", "--size", "6", "--law"},
        {"interp", "canonical", "--size", "4"},
        {"interp", "tmp", "--tree", "gallery:depthk:3"},
        {"lemmas", "--suite", "all", "--seed", "99"},
        {"fo", "eval", "--size", "4", "--formula", "forall z:param . exists i:idx . max(fiber(z, i)) = max(S)", "--expand"},
        {"fo", "builtin", "--name", "multiplication", "--size", "4", "--query", "2,2,3"},
        {"gallery", "--tree", "gallery:pairs", "--truncate", "6", "--format", "text"},
    };
    for (const auto& cmd : commands) {
        std::string line = TREERANK_CLI_PATH;
        for (const auto& a : cmd) line += " '" + a + "'";
        const std::string first = capture(line), second = capture(line);

        std::istringstream in;
        std::ostringstream out, err;
        run_cli(cmd, in, out, err);
        if (first.rfind("<", 0) == 0) p.add(cmd[0] + ": " + first.substr(0, 40));
        else if (first != second || first != out.str()) p.add(cmd[0] + " " + cmd[1] + ": outputs differ");
    }
    return std::to_string(commands.size()) + " commands, two processes each plus one in-process run";
}

} // namespace

int main()
{
    using Check = std::function<std::string(Problems&)>;
    const std::vector<std::pair<std::string, Check>> criteria{
        {"gallery ground truth", gallery_ground_truth},
        {"rk0 node properties up to 24", rk0_suite},
        {"branch decision", branch_decision},
        {"interpretation equivalence", interpretation_equivalence},
        {"arithmetic encodings", arithmetic_encodings},
        {"tmp pipeline on depthk(2..4)", tmp_pipeline},
        {"evaluator oracle", evaluator_oracle},
        {"CLI determinism", cli_determinism},
    };
    const double limits[] = {60, 0, 0, 0, 0, 0, 0, 0};

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Problems p;
        std::string detail;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            detail = criteria[i].second(p);
        } catch (const std::exception& e) {
            p.add(std::string("threw: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (limits[i] > 0 && secs > limits[i]) p.add("took " + std::to_string(secs) + " s, limit " + std::to_string(limits[i]));
        const bool ok = p.empty();
        failed += !ok;
        std::printf("%s %zu %s: %s (%.2f s)\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    ok ? detail.c_str() : p.summary().c_str(), secs);
        std::fflush(stdout);
    }
    return failed;
}
