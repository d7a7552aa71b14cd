#include "treerank/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "treerank/branch.hpp"
#include "treerank/error.hpp"
#include "treerank/fixture.hpp"
#include "treerank/formula.hpp"
#include "treerank/gallery.hpp"
#include "treerank/interp.hpp"
#include "treerank/rank.hpp"

namespace treerank {

GameBounds profile_bounds(const std::string& name)
{
    if (name.empty() || name == "desk") return {12, 96, 8};
    if (name == "quick") return {6, 40, 6};
    if (name == "wide") return {16, 128, 10};
    throw Error(Errc::UsageError, "unknown bounds profile '" + name + "' (desk, quick, wide)");
}

namespace {

struct Config {
    GameBounds bounds;
    std::string format = "json";
    std::string output;
    std::uint64_t seed = 1;

    std::string tree;
    std::string node;
    std::string structure;
    int size = 0;
    std::string query;

    Nat max_element = 8;
    std::size_t limit = 64;
    std::size_t rounds = 0;
    bool interactive = false;
    std::size_t prefix_len = 0;
    bool konig = false;
    bool law = false;
    Nat start = -1;
    std::string suite = "all";
    std::string formula;
    std::vector<std::string> lets;
    bool expand = false;
    std::string name;
    Nat truncate = -1;
};

// ---------------------------------------------------------------------------
// JSON helpers

json value_json(const SurvivalValue& v)
{
    if (v.is_finite()) return v.value;
    return v.to_string();
}

json rank_json(const RankValue& r)
{
    switch (r.tag) {
    case RankValue::Tag::finite:
        return r.value;
    case RankValue::Tag::infinite_evidence:
        return json{{"infinite_evidence", node_to_json(*r.witness)}};
    case RankValue::Tag::unknown:
        break;
    }
    return "unknown";
}

json bounds_json(const GameBounds& b)
{
    return {{"boundary_bound", b.boundary_bound}, {"universe_bound", b.universe_bound}, {"cap", b.cap}};
}

json stabilization_json(const Stabilization& st)
{
    json values = json::array();
    for (const auto& v : st.values) values.push_back(value_json(v));
    return {{"universes", st.universes}, {"values", values}, {"stable", st.stable}};
}

json mask_json(Mask m) { return mask_elements(m); }

json nat_list(const std::vector<Nat>& v) { return v; }

// One "key = value" line per leaf; arrays holding no objects stay inline.
void write_text(std::ostream& os, const std::string& key, const json& value)
{
    bool nested = value.is_object() ||
                  (value.is_array() && std::any_of(value.begin(), value.end(), [](const json& v) { return v.is_object(); }));
    if (!nested) {
        os << key << " = " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
        return;
    }
    if (value.is_object()) {
        for (const auto& [k, v] : value.items()) write_text(os, key.empty() ? k : key + "." + k, v);
        return;
    }
    for (std::size_t i = 0; i < value.size(); ++i) write_text(os, key + "." + std::to_string(i), value[i]);
}

// ---------------------------------------------------------------------------
// Argument helpers

NodeSeq parse_node_arg(const std::string& text)
{
    try {
        return parse_node(text);
    } catch (const Error& e) {
        throw Error(Errc::UsageError, "bad node '" + text + "': " + e.what());
    }
}

std::vector<Nat> parse_list(const std::string& text, std::size_t expected, const char* what)
{
    std::vector<Nat> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            long v = std::stol(item, &used);
            if (used != item.size() || v < 0) throw std::invalid_argument(item);
            out.push_back(static_cast<Nat>(v));
        } catch (const std::exception&) {
            throw Error(Errc::UsageError, std::string("bad ") + what + " '" + text + "'");
        }
    }
    if (expected && out.size() != expected)
        throw Error(Errc::UsageError, std::string("bad ") + what + " '" + text + "': expected " + std::to_string(expected) + " numbers");
    return out;
}

std::unique_ptr<TreePresentation> load_tree(const Config& cfg)
{
    if (cfg.tree.empty()) throw Error(Errc::UsageError, "--tree is required");
    return tree_from_spec(cfg.tree);
}

FiniteStructure load_structure_arg(const Config& cfg)
{
    if (!cfg.structure.empty() && cfg.size) throw Error(Errc::UsageError, "give --structure or --size, not both");
    if (!cfg.structure.empty()) return load_structure(cfg.structure);
    return canonical_realizer(cfg.size ? cfg.size : 6);
}

json structure_source(const Config& cfg)
{
    if (!cfg.structure.empty()) return cfg.structure;
    return "canonical:" + std::to_string(cfg.size ? cfg.size : 6);
}

// ---------------------------------------------------------------------------
// analyze

json node_summary(GameSolver& solver, const NodeSeq& s)
{
    auto reg = is_regular(solver, s);
    return {{"node", node_to_json(s)}, {"g", value_json(reg.g)}, {"rk", rank_json(reg.rk)}, {"regular", reg.regular}};
}

int cmd_analyze(const Config& cfg, json& report)
{
    auto tree = load_tree(cfg);
    GameSolver solver(*tree, cfg.bounds);
    report["tree"] = cfg.tree;
    report["root_stabilization"] = stabilization_json(stabilization(*tree, NodeSeq{}, cfg.bounds));

    if (!cfg.node.empty()) {
        NodeSeq s = parse_node_arg(cfg.node);
        require_node(*tree, s);
        json info = node_summary(solver, s);
        auto g = solver.survival_value(s);
        if (g.is_finite() && g.value >= 1) info["best_boundary"] = solver.best_boundary(s);
        info["stabilization"] = stabilization_json(stabilization(*tree, s, cfg.bounds));
        report["node"] = info;
        return 0;
    }

    json nodes = json::array();
    bool truncated = false;
    for_each_node_class(*tree, cfg.max_element, [&](const NodeSeq& s) {
        if (nodes.size() >= cfg.limit) {
            truncated = true;
            return;
        }
        nodes.push_back(node_summary(solver, s));
    });
    report["max_element"] = cfg.max_element;
    report["nodes"] = nodes;
    report["truncated"] = truncated;
    return 0;
}

// ---------------------------------------------------------------------------
// game

json transcript_json(const Transcript& t, bool stopped = false)
{
    json rounds = json::array();
    for (const auto& r : t.rounds)
        rounds.push_back({{"boundary", r.boundary}, {"reply", r.reply ? node_to_json(*r.reply) : json(nullptr)}});
    return {{"start", node_to_json(t.start)},
            {"rounds", rounds},
            {"replies", t.reply_count()},
            {"terminal", stopped                                               ? "stopped"
                         : t.terminal == Transcript::Terminal::second_stuck ? "second_stuck"
                                                                            : "round_limit"}};
}

std::string value_text(const SurvivalValue& v) { return v.is_finite() ? std::to_string(v.value) : v.to_string(); }

/// The human marks boundaries; the engine answers with best_reply. `stopped`
/// is set when the human quits or input ends.
Transcript play_interactive(GameSolver& solver, const NodeSeq& start, std::size_t max_rounds, std::istream& in, std::ostream& os, bool& stopped)
{
    Transcript t;
    t.start = start;
    NodeSeq pos = start;
    while (t.rounds.size() < max_rounds) {
        Window w = boundary_window(pos, solver.bounds());
        os << "position " << pos.to_string() << "  g = " << value_text(solver.survival_value(pos)) << "  replies so far "
           << t.reply_count() << "\nboundary in [" << w.lo << ", " << w.hi << "] (q to stop)> " << std::flush;
        std::string line;
        if (!std::getline(in, line) || line == "q") {
            os << "\n";
            stopped = true;
            return t;
        }
        Nat a = 0;
        try {
            std::size_t used = 0;
            a = static_cast<Nat>(std::stol(line, &used));
            if (used != line.size()) throw std::invalid_argument(line);
        } catch (const std::exception&) {
            os << "not a number: " << line << "\n";
            continue;
        }
        if (a < w.lo || a > w.hi) {
            os << "boundary " << a << " is outside the window\n";
            continue;
        }
        if (!solver.reply_value(pos, a)) {
            t.rounds.push_back({a, std::nullopt});
            t.terminal = Transcript::Terminal::second_stuck;
            os << "no reply past " << a << ": the engine is stuck after " << t.reply_count() << " replies\n";
            return t;
        }
        pos = solver.best_reply(pos, a);
        t.rounds.push_back({a, pos});
        os << "engine replies " << pos.to_string() << "  value " << value_text(solver.survival_value(pos)) << "\n";
    }
    return t;
}

int cmd_game(const Config& cfg, json& report, std::istream& in, std::ostream& os)
{
    auto tree = load_tree(cfg);
    if (cfg.node.empty()) throw Error(Errc::UsageError, "--node is required");
    NodeSeq s = parse_node_arg(cfg.node);
    require_node(*tree, s);
    GameSolver solver(*tree, cfg.bounds);

    report["tree"] = cfg.tree;
    report["g"] = value_json(solver.survival_value(s));
    report["stabilization"] = stabilization_json(stabilization(*tree, s, cfg.bounds));
    report["interactive"] = cfg.interactive;
    if (cfg.interactive) {
        std::size_t rounds = cfg.rounds ? cfg.rounds : 64;
        bool stopped = false;
        auto t = play_interactive(solver, s, rounds, in, os, stopped);
        report["transcript"] = transcript_json(t, stopped);
        return 0;
    }
    std::size_t rounds = cfg.rounds ? cfg.rounds : static_cast<std::size_t>(cfg.bounds.cap) + 1;
    auto t = play(*tree, s, optimal_first(solver), optimal_second(solver), rounds, cfg.bounds);
    report["transcript"] = transcript_json(t);
    return 0;
}

// ---------------------------------------------------------------------------
// branch

json growth_json(const Growth& g) { return {{"universes", g.universes}, {"depths", g.depths}}; }

int cmd_branch(const Config& cfg, json& report)
{
    auto tree = load_tree(cfg);
    report["tree"] = cfg.tree;
    auto v = branch_exists(*tree, cfg.bounds);
    const char* verdict = v.tag == BranchVerdict::Tag::yes ? "yes" : v.tag == BranchVerdict::Tag::no ? "no" : "unknown";
    report["verdict"] = verdict;
    int which = v.evidence == BranchVerdict::Evidence::infinite_rank_node            ? 1
                : v.evidence == BranchVerdict::Evidence::infinite_restricted_subtree ? 2
                                                                                     : 0;
    report["case"] = which ? json(which) : json(nullptr);
    report["evidence_node"] = v.node ? node_to_json(*v.node) : json(nullptr);
    report["growth"] = v.growth ? growth_json(*v.growth) : json(nullptr);
    report["candidates_examined"] = v.candidates_examined;
    if (v.tag == BranchVerdict::Tag::no) report["certificate"] = {{"rank_bound", v.rank_bound}, {"depth_bound", v.depth_bound}};
    report["root_stabilization"] = stabilization_json(stabilization(*tree, NodeSeq{}, cfg.bounds));

    if (cfg.prefix_len) {
        json prefix = json::array();
        for (const auto& s : definable_branch_prefix(*tree, cfg.bounds, cfg.prefix_len)) prefix.push_back(node_to_json(s));
        report["prefix"] = prefix;
    }
    if (cfg.konig) {
        try {
            auto k = konig_check(*tree, cfg.bounds);
            report["konig"] = {{"locally_finite", true},
                               {"universes", k.universes},
                               {"node_counts", k.node_counts},
                               {"depths", k.depths},
                               {"growing", k.growing()}};
        } catch (const Error& e) {
            if (e.code() != Errc::NotLocallyFinite) throw;
            report["konig"] = {{"locally_finite", false}, {"cofinal_node", e.nodes().empty() ? json(nullptr) : node_to_json(e.nodes().front())}};
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// interp

json numbers_json(const FiniteStructure& st)
{
    json nums = json::object();
    for (Nat a : st.params) {
        auto k = realises_number_direct(st, a);
        nums[std::to_string(a)] = k ? json(*k) : json(nullptr);
    }
    return nums;
}

json triples_json(const std::vector<Triple>& rows)
{
    json out = json::array();
    for (const auto& [n, m, l] : rows) out.push_back({n, m, l});
    return out;
}

template <class Rel, class Formula>
int relation_report(const Config& cfg, const FiniteStructure& st, Rel rel, Formula formula, json& report)
{
    if (!cfg.query.empty()) {
        auto q = parse_list(cfg.query, 3, "query");
        bool direct = rel(st, q[0], q[1], q[2]);
        report["query"] = q;
        report["holds"] = direct;
        report["formula"] = formula(st, q[0], q[1], q[2]);
        return direct == report["formula"].get<bool>() ? 0 : 1;
    }
    auto rows = truth_table(st, [&](const FiniteStructure& s, Nat n, Nat m, Nat l) { return rel(s, n, m, l); });
    report["table"] = triples_json(rows);
    report["rows"] = rows.size();
    return 0;
}

json mul_law_json(const MulLawReport& r)
{
    json law = json::array();
    for (const auto& [nm, l] : r.law) law.push_back({{"n", nm.first}, {"m", nm.second}, {"l", l}});
    json conflicts = json::array();
    for (const auto& [n, m] : r.conflicts) conflicts.push_back({n, m});
    return {{"true_rows", r.true_rows},
            {"law", law},
            {"single_valued", r.single_valued},
            {"conflicts", conflicts},
            {"matches_affine", r.matches_affine},
            {"affine_law", "l = 0 if n = 0; l = 1 if n = 1; l = (n - 1) * m + 1 if n >= 2 and m >= 1"},
            {"n_times_m_plus_1", {{"agree", r.agree_nm_plus_1}, {"disagree", r.disagree_nm_plus_1}}},
            {"summary", r.describe()}};
}

json tmp_report_json(const TmpPipelineReport& r)
{
    json checks = json::array();
    for (const auto& [base, t] : r.checks) {
        json found = json::array();
        for (const auto& [pattern, witness] : t.witnesses) found.push_back({{"gaps", mask_json(pattern)}, {"witness", node_to_json(witness)}});
        json missing = json::array();
        for (Mask m : t.missing) missing.push_back(mask_json(m));
        checks.push_back({{"base", node_to_json(base)},
                          {"k", t.k},
                          {"n", t.n},
                          {"patterns", found},
                          {"missing", missing},
                          {"max_gaps_hit", t.max_gaps_hit},
                          {"over_witness", t.over_witness ? node_to_json(*t.over_witness) : json(nullptr)},
                          {"states", t.states},
                          {"part_i", t.part_i()},
                          {"part_ii", t.part_ii()}});
    }
    const auto& w = r.witness;
    return {{"u", node_to_json(w.u)},
            {"v", node_to_json(w.v)},
            {"a", nat_list(w.sets.a)},
            {"b", nat_list(w.sets.b)},
            {"n", w.n},
            {"checks", checks},
            {"values_without_base", r.values_without_base},
            {"passed", r.passed()}};
}

int cmd_interp(const std::string& sub, const Config& cfg, json& report)
{
    if (sub == "tmp") {
        auto tree = load_tree(cfg);
        NodeSeq s = cfg.node.empty() ? NodeSeq{} : parse_node_arg(cfg.node);
        require_node(*tree, s);
        std::optional<Nat> start;
        if (cfg.start >= 0) start = cfg.start;
        else if (s.empty()) start = 10;
        report["tree"] = cfg.tree;
        report["node"] = node_to_json(s);
        report["start"] = start ? json(*start) : json(nullptr);
        report["stabilization"] = stabilization_json(stabilization(*tree, s, cfg.bounds));
        auto r = run_tmp_pipeline(*tree, s, cfg.bounds, start);
        report["pipeline"] = tmp_report_json(r);
        return r.passed() ? 0 : 1;
    }

    FiniteStructure st = load_structure_arg(cfg);
    report["structure"] = structure_source(cfg);
    if (sub == "canonical") {
        report["table"] = structure_to_json(st);
        report["numbers"] = numbers_json(st);
        return 0;
    }
    if (sub == "check-number") {
        if (st.binary) {
            auto k = realises_number_direct(st);
            bool f = realises_number_formula(st);
            report["number"] = k ? json(*k) : json(nullptr);
            report["formula"] = f;
            return f == k.has_value() ? 0 : 1;
        }
        report["numbers"] = numbers_json(st);
        return 0;
    }
    if (sub == "check-arith") {
        bool d = realises_arithmetic_direct(st);
        bool f = realises_arithmetic_formula(st);
        report["numbers"] = numbers_json(st);
        report["arithmetic"] = d;
        report["formula"] = f;
        return d == f ? 0 : 1;
    }
    if (sub == "add") {
        report["numbers"] = numbers_json(st);
        return relation_report(cfg, st, add_rel, add_formula, report);
    }
    if (sub == "mul") {
        report["numbers"] = numbers_json(st);
        int rc = relation_report(cfg, st, mul_rel, mul_formula, report);
        if (cfg.law) report["law"] = mul_law_json(mul_law(st));
        return rc;
    }
    throw Error(Errc::UsageError, "unknown interp command '" + sub + "'");
}

// ---------------------------------------------------------------------------
// fo

Valuation parse_lets(const std::vector<std::string>& lets)
{
    Valuation val;
    for (const auto& item : lets) {
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw Error(Errc::UsageError, "bad --let '" + item + "' (want x=3)");
        val[item.substr(0, eq)] = parse_list(item.substr(eq + 1), 1, "--let value")[0];
    }
    return val;
}

int cmd_fo(const std::string& sub, const Config& cfg, json& report)
{
    if (sub == "eval") {
        if (cfg.formula.empty()) throw Error(Errc::UsageError, "--formula is required");
        Formula f = parse_formula(cfg.formula);
        FiniteStructure st = load_structure_arg(cfg);
        Valuation val = parse_lets(cfg.lets);
        report["structure"] = structure_source(cfg);
        report["formula"] = to_string(f);
        report["free_vars"] = free_vars(f);
        report["valuation"] = val;
        bool value = evaluate(st, f, val);
        report["value"] = value;
        if (cfg.expand) {
            Formula e = expand(f);
            bool ev = evaluate(st, e, val);
            report["expanded"] = {{"formula", to_string(e)}, {"value", ev}};
            return ev == value ? 0 : 1;
        }
        return 0;
    }
    if (sub == "builtin") {
        if (cfg.name.empty()) {
            report["builtins"] = builtin_names();
            return 0;
        }
        Formula f = builtin(cfg.name);
        report["name"] = cfg.name;
        report["formula"] = to_string(f);
        report["free_vars"] = free_vars(f);
        if (cfg.structure.empty() && !cfg.size) return 0;
        FiniteStructure st = load_structure_arg(cfg);
        report["structure"] = structure_source(cfg);
        Valuation val;
        if (!cfg.query.empty()) {
            auto q = parse_list(cfg.query, 3, "query");
            val = {{"n", q[0]}, {"m", q[1]}, {"l", q[2]}};
            report["query"] = q;
        }
        report["value"] = evaluate(st, f, val);
        return 0;
    }
    throw Error(Errc::UsageError, "unknown fo command '" + sub + "'");
}

// ---------------------------------------------------------------------------
// lemmas

json suite_rk0(const Config& cfg, bool& ok)
{
    json out = json::object();
    for (std::string spec : {"gallery:chain", "gallery:pairs", "gallery:depthk:3", "gallery:bushspine", "gallery:fullspread"}) {
        auto tree = tree_from_spec(spec);
        GameSolver solver(*tree, cfg.bounds);
        Rk0Options opts;
        opts.incomparable_quota = 5;
        auto reports = check_lemma_rk0_all(solver, 24, opts);
        json failures = json::array();
        for (const auto& r : reports)
            for (const auto& p : r.properties)
                if (!p.passed) failures.push_back({{"node", node_to_json(r.node)}, {"property", p.name}, {"detail", p.detail}});
        ok = ok && failures.empty();
        out[spec] = {{"classes", reports.size()}, {"failures", failures}};
    }
    return out;
}

json suite_tmp(const Config& cfg, bool& ok)
{
    json out = json::object();
    for (int k = 2; k <= 4; ++k) {
        auto tree = gallery("depthk", {{"k", k}});
        auto r = run_tmp_pipeline(*tree, NodeSeq{}, cfg.bounds, 10);
        ok = ok && r.passed();
        out["depthk:" + std::to_string(k)] = {{"u", node_to_json(r.witness.u)},
                                              {"v", node_to_json(r.witness.v)},
                                              {"checks", r.checks.size()},
                                              {"passed", r.passed()}};
    }
    return out;
}

json suite_interp(const Config& cfg, bool& ok)
{
    std::size_t disagreements = 0;
    std::size_t families = 0;
    const std::vector<Nat> s3{0, 1, 2};
    for (unsigned fam = 1; fam < 256; ++fam) {
        std::vector<Mask> fibers;
        for (unsigned sub = 0; sub < 8; ++sub)
            if (fam & (1u << sub)) fibers.push_back(sub);
        auto st = structure_with_fibers(s3, fibers);
        disagreements += realises_number_formula(st) != realises_number_direct(st).has_value();
        ++families;
    }

    std::mt19937 rng(static_cast<std::mt19937::result_type>(cfg.seed));
    std::uniform_int_distribution<int> count(1, 8);
    std::uniform_int_distribution<int> subset(0, 15);
    std::size_t random_tables = 200;
    for (std::size_t t = 0; t < random_tables; ++t) {
        std::vector<Mask> fibers(static_cast<std::size_t>(count(rng)));
        for (auto& f : fibers) f = static_cast<Mask>(subset(rng));
        auto st = structure_with_fibers({0, 1, 2, 3}, fibers);
        disagreements += realises_number_formula(st) != realises_number_direct(st).has_value();
    }

    auto canon = canonical_realizer(6);
    auto add_rows = truth_table(canon, [](const FiniteStructure& s, Nat n, Nat m, Nat l) { return add_rel(s, n, m, l); });
    std::set<Triple> expected;
    for (Nat n : canon.params)
        for (Nat m : canon.params)
            for (Nat l : canon.params) {
                auto kn = realises_number_direct(canon, n), km = realises_number_direct(canon, m), kl = realises_number_direct(canon, l);
                if (kn && km && kl && *kn + *km == *kl) expected.emplace(n, m, l);
            }
    bool add_ok = std::set<Triple>(add_rows.begin(), add_rows.end()) == expected;
    auto law = mul_law(canon);

    ok = ok && disagreements == 0 && add_ok && law.single_valued;
    return {{"exhaustive_families", families},
            {"random_tables", random_tables},
            {"disagreements", disagreements},
            {"addition_is_sum", add_ok},
            {"multiplication", mul_law_json(law)}};
}

int cmd_lemmas(const Config& cfg, json& report)
{
    static const std::set<std::string> suites{"rk0", "tmp", "interp", "all"};
    if (!suites.count(cfg.suite)) throw Error(Errc::UsageError, "unknown suite '" + cfg.suite + "' (rk0, tmp, interp, all)");
    bool ok = true;
    json results = json::object();
    bool all = cfg.suite == "all";
    if (all || cfg.suite == "rk0") results["rk0"] = suite_rk0(cfg, ok);
    if (all || cfg.suite == "tmp") results["tmp"] = suite_tmp(cfg, ok);
    if (all || cfg.suite == "interp") results["interp"] = suite_interp(cfg, ok);
    report["suites"] = results;
    report["passed"] = ok;
    return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// gallery

int cmd_gallery(const Config& cfg, json& report)
{
    if (cfg.tree.empty()) {
        report["trees"] = gallery_names();
        return 0;
    }
    auto tree = load_tree(cfg);
    if (cfg.truncate >= 0) {
        report["fixture"] = tree_to_json(truncate(*tree, cfg.truncate));
        report["truncate"] = cfg.truncate;
    } else {
        report["fixture"] = tree_to_json(*tree);
    }
    report["tree"] = cfg.tree;
    return 0;
}

// ---------------------------------------------------------------------------

int exit_code_for(Errc code)
{
    switch (code) {
    case Errc::UsageError:
    case Errc::ParseError:
    case Errc::FixtureError:
    case Errc::UnknownGallery:
    case Errc::UnknownUniverse:
    case Errc::UnknownBuiltin:
    case Errc::UnboundVariable:
    case Errc::NotANode:
    case Errc::BoundsInvalid:
    case Errc::NotIncreasing:
    case Errc::MissingRoot:
    case Errc::NotPrefixClosed:
        return 2;
    default:
        return 1;
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err)
{
    Config cfg;
    try {
        const char* profile = std::getenv("TREERANK_PROFILE");
        cfg.bounds = profile_bounds(profile ? profile : "");
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    CLI::App app{"Survival games, ranks and branches of trees on the naturals"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--bound,--universe", cfg.bounds.universe_bound, "universe bound N");
    app.add_option("--boundary-bound", cfg.bounds.boundary_bound, "boundary bound B");
    app.add_option("--cap", cfg.bounds.cap, "survival cap");
    app.add_option("--format", cfg.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--output,-o", cfg.output, "write the report here");
    app.add_option("--seed", cfg.seed, "seed for randomized suites");

    auto* analyze = app.add_subcommand("analyze", "g, rk and regularity of node classes");
    analyze->add_option("--tree", cfg.tree, "fixture path or gallery:NAME[:K]");
    analyze->add_option("--node", cfg.node, "one node, e.g. \"[0, 2]\"");
    analyze->add_option("--max-element", cfg.max_element, "list classes with elements up to this");
    analyze->add_option("--limit", cfg.limit, "list at most this many classes");

    auto* game = app.add_subcommand("game", "play the s-game");
    game->add_option("--tree", cfg.tree, "fixture path or gallery:NAME[:K]");
    game->add_option("--node", cfg.node, "start node");
    game->add_option("--rounds", cfg.rounds, "round limit");
    game->add_flag("--interactive", cfg.interactive, "mark boundaries yourself");

    auto* branch = app.add_subcommand("branch", "decide whether the tree has an infinite branch");
    branch->add_option("--tree", cfg.tree, "fixture path or gallery:NAME[:K]");
    branch->add_option("--prefix-len", cfg.prefix_len, "also print this many nodes of a definable branch");
    branch->add_flag("--konig", cfg.konig, "report truncation sizes");

    auto* interp = app.add_subcommand("interp", "numbers and arithmetic on finite structures");
    interp->require_subcommand(1);
    std::vector<CLI::App*> interp_subs;
    for (const char* name : {"check-number", "check-arith", "add", "mul", "canonical", "tmp"}) {
        auto* sub = interp->add_subcommand(name);
        sub->add_option("--structure", cfg.structure, "structure fixture");
        sub->add_option("--size", cfg.size, "use the canonical realizer on this many elements");
        interp_subs.push_back(sub);
    }
    interp_subs[2]->add_option("--query", cfg.query, "n,m,l");
    interp_subs[3]->add_option("--query", cfg.query, "n,m,l");
    interp_subs[3]->add_flag("--law", cfg.law, "report the law the table follows");
    interp_subs[5]->add_option("--tree", cfg.tree, "fixture path or gallery:NAME[:K]");
    interp_subs[5]->add_option("--node", cfg.node, "node s (default the root)");
    interp_subs[5]->add_option("--start", cfg.start, "at the root, the first reply lies past this");

    auto* lemmas = app.add_subcommand("lemmas", "run property suites");
    lemmas->add_option("--suite", cfg.suite, "rk0, tmp, interp or all");

    auto* fo = app.add_subcommand("fo", "first-order formulas over finite structures");
    fo->require_subcommand(1);
    auto* fo_eval = fo->add_subcommand("eval", "evaluate a formula");
    fo_eval->add_option("--structure", cfg.structure, "structure fixture");
    fo_eval->add_option("--size", cfg.size, "use the canonical realizer on this many elements");
    fo_eval->add_option("--formula", cfg.formula, "formula text");
    fo_eval->add_option("--let", cfg.lets, "bind a free variable, x=3");
    fo_eval->add_flag("--expand", cfg.expand, "also evaluate the set-atom-free expansion");
    auto* fo_builtin = fo->add_subcommand("builtin", "print or evaluate a builtin sentence");
    fo_builtin->add_option("--name", cfg.name, "builtin name");
    fo_builtin->add_option("--structure", cfg.structure, "structure fixture");
    fo_builtin->add_option("--size", cfg.size, "use the canonical realizer on this many elements");
    fo_builtin->add_option("--query", cfg.query, "n,m,l");

    auto* gal = app.add_subcommand("gallery", "list gallery trees or dump a tree fixture");
    gal->add_option("--tree", cfg.tree, "fixture path or gallery:NAME[:K]");
    gal->add_option("--truncate", cfg.truncate, "keep nodes with elements up to this");

    for (auto* sub : app.get_subcommands([](CLI::App*) { return true; })) sub->fallthrough();
    for (auto* sub : {interp, fo})
        for (auto* leaf : sub->get_subcommands([](CLI::App*) { return true; })) leaf->fallthrough();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 2;
    }

    json report;
    int rc = 0;
    try {
        validate(cfg.bounds);
        report["bounds"] = bounds_json(cfg.bounds);
        report["seed"] = cfg.seed;
        auto* sub = app.get_subcommands().front();
        std::string command = sub->get_name();
        std::ostream& interactive_out = cfg.output.empty() ? err : out;
        if (sub == analyze) rc = cmd_analyze(cfg, report);
        else if (sub == game) rc = cmd_game(cfg, report, in, cfg.interactive ? interactive_out : out);
        else if (sub == branch) rc = cmd_branch(cfg, report);
        else if (sub == interp) {
            std::string leaf = interp->get_subcommands().front()->get_name();
            command += " " + leaf;
            rc = cmd_interp(leaf, cfg, report);
        } else if (sub == lemmas) rc = cmd_lemmas(cfg, report);
        else if (sub == fo) {
            std::string leaf = fo->get_subcommands().front()->get_name();
            command += " " + leaf;
            rc = cmd_fo(leaf, cfg, report);
        } else rc = cmd_gallery(cfg, report);
        report["command"] = command;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    std::ofstream file;
    if (!cfg.output.empty()) {
        file.open(cfg.output);
        if (!file) {
            err << "error: cannot write " << cfg.output << '\n';
            return 2;
        }
    }
    std::ostream& os = cfg.output.empty() ? out : file;
    if (cfg.format == "text") write_text(os, "", report);
    else os << report.dump(2) << '\n';
    return rc;
}

} // namespace treerank
