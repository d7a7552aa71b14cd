#include <doctest.h>

#include <random>

#include "oracle/naive_game.hpp"
#include "treerank/error.hpp"
#include "treerank/gallery.hpp"
#include "treerank/game.hpp"

using namespace treerank;

namespace {

const GameBounds kDesk{12, 96, 8};

std::vector<Nat> as_vec(const NodeSeq& s) { return {s.begin(), s.end()}; }

std::vector<NodeSeq> nodes_upto(const TreePresentation& tree, Nat bound)
{
    std::vector<NodeSeq> out;
    for_each_node(tree, bound, [&](const NodeSeq& s) {
        out.push_back(s);
        return true;
    });
    return out;
}

/// A random prefix-closed family over [0, top]: each candidate son is kept
/// with probability p, and depth is capped.
ExplicitTree random_tree(std::mt19937& rng, Nat top, double p, std::size_t max_len)
{
    std::bernoulli_distribution keep(p);
    std::vector<std::vector<Nat>> nodes{{}};
    std::vector<std::vector<Nat>> frontier{{}};
    while (!frontier.empty()) {
        auto s = frontier.back();
        frontier.pop_back();
        if (s.size() >= max_len) continue;
        for (Nat b = s.empty() ? 0 : s.back() + 1; b <= top; ++b) {
            if (!keep(rng)) continue;
            auto t = s;
            t.push_back(b);
            nodes.push_back(t);
            frontier.push_back(t);
        }
    }
    return validate_explicit(nodes);
}

std::string gallery_label(const std::string& name) { return name == "depthk3" ? "depthk" : name; }

std::unique_ptr<TreePresentation> named_tree(const std::string& name)
{
    if (name == "depthk3") return gallery("depthk", {{"k", 3}});
    return gallery(name);
}

} // namespace

TEST_SUITE("game")
{
    TEST_CASE("survival values of the gallery at desk bounds")
    {
        CHECK(survival_value(*gallery("pairs"), NodeSeq{}, kDesk) == SurvivalValue::finite(2));
        CHECK(survival_value(*gallery("pairs"), NodeSeq{4}, kDesk) == SurvivalValue::finite(1));
        CHECK(survival_value(*gallery("pairs"), NodeSeq{4, 9}, kDesk) == SurvivalValue::finite(0));
        CHECK(survival_value(*gallery("fullspread"), NodeSeq{}, kDesk) == SurvivalValue::at_least(8));
        CHECK(survival_value(*gallery("depthk", {{"k", 4}}), NodeSeq{5}, kDesk) == SurvivalValue::finite(3));
        CHECK(survival_value(*gallery("chain"), NodeSeq{0, 1}, kDesk) == SurvivalValue::finite(0));
        CHECK(survival_value(*gallery("bushspine"), NodeSeq{0, 1}, kDesk) == SurvivalValue::finite(2));
        CHECK(survival_value(*gallery("bushspine"), NodeSeq{}, kDesk) == SurvivalValue::finite(0));

        auto small = validate_explicit({{}, {0}, {3}, {0, 2}});
        for (const auto& s : small.nodes()) CHECK(survival_value(small, s, {3, 10, 8}) == SurvivalValue::finite(0));
    }

    TEST_CASE("bounds and membership are checked")
    {
        auto pairs = gallery("pairs");
        CHECK_THROWS_AS(survival_value(*pairs, NodeSeq{1, 2, 3}, kDesk), Error);
        CHECK_THROWS_AS(survival_value(*pairs, NodeSeq{}, {12, 5, 8}), Error);
        CHECK_THROWS_AS(survival_value(*pairs, NodeSeq{}, {12, 96, 0}), Error);
        try {
            survival_value(*pairs, NodeSeq{}, {-1, 96, 8});
            FAIL("expected BoundsInvalid");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::BoundsInvalid);
        }
    }

    TEST_CASE("best_boundary")
    {
        CHECK(best_boundary(*gallery("pairs"), NodeSeq{}, kDesk) == 0);
        CHECK(best_boundary(*gallery("depthk", {{"k", 3}}), NodeSeq{}, kDesk) == 0);
        CHECK(best_boundary(*gallery("pairs"), NodeSeq{6}, kDesk) == 6);
        try {
            best_boundary(*gallery("chain"), NodeSeq{0, 1}, kDesk);
            FAIL("expected PreconditionFailed");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::PreconditionFailed);
        }
        try {
            best_boundary(*gallery("fullspread"), NodeSeq{}, kDesk);
            FAIL("expected NoFiniteValue");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::NoFiniteValue);
        }
    }

    TEST_CASE("best_boundary satisfies its defining condition against brute force")
    {
        const GameBounds small{4, 10, 8};
        for (std::string name : {"pairs", "depthk3", "bushspine"}) {
            auto tree = named_tree(name);
            oracle::BruteForceGame brute(*tree, small);
            GameSolver solver(*tree, small);
            for (const auto& s : nodes_upto(*tree, 10)) {
                const int g = brute.value(as_vec(s));
                if (g < 1 || g >= small.cap) continue;
                const Nat a = solver.best_boundary(s);
                auto [lo, hi] = oracle::window_of(as_vec(s), small.boundary_bound);
                // least boundary in the window after which every reply is below g
                Nat expected = -1;
                for (Nat c = lo; c <= hi && expected < 0; ++c) {
                    bool all_below = true;
                    extensions_beyond(*tree, s, c, small.universe_bound, [&](const NodeSeq& t) {
                        all_below = brute.value(as_vec(t)) <= g - 1;
                        return all_below;
                    });
                    if (all_below) expected = c;
                }
                CHECK_MESSAGE(a == expected, name << " " << s.to_string());
            }
        }
    }

    TEST_CASE("best_reply")
    {
        CHECK(best_reply(*gallery("pairs"), NodeSeq{}, 7, kDesk) == NodeSeq{8});
        CHECK(best_reply(*gallery("bushspine"), NodeSeq{0, 1}, 5, kDesk) == NodeSeq{0, 1, 6});
        CHECK(best_reply(*gallery("bushspine"), NodeSeq{0, 1}, 1, kDesk) == NodeSeq{0, 1, 2});
        try {
            best_reply(*gallery("chain"), NodeSeq{0}, 3, kDesk);
            FAIL("expected NoReply");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::NoReply);
        }
    }

    TEST_CASE("best_reply is the shortlex-least reply of maximal value, against brute force")
    {
        const GameBounds small{4, 9, 8};
        for (std::string name : {"pairs", "depthk3", "bushspine", "chain"}) {
            auto tree = named_tree(name);
            oracle::BruteForceGame brute(*tree, small);
            GameSolver solver(*tree, small);
            for (const auto& s : nodes_upto(*tree, 6)) {
                for (Nat a = std::max<Nat>(s.top(), 0); a <= 7; ++a) {
                    std::optional<NodeSeq> best;
                    int best_value = -1;
                    extensions_beyond(*tree, s, a, small.universe_bound, [&](const NodeSeq& t) {
                        const int v = brute.value(as_vec(t));
                        if (v > best_value || (v == best_value && shortlex_less(t, *best))) {
                            best = t;
                            best_value = v;
                        }
                        return true;
                    });
                    if (!best) {
                        CHECK_THROWS_AS(solver.best_reply(s, a), Error);
                        continue;
                    }
                    CHECK_MESSAGE(solver.best_reply(s, a) == *best, name << " " << s.to_string() << " a=" << a);
                }
            }
        }
    }

    TEST_CASE("play")
    {
        auto pairs = gallery("pairs");
        GameSolver solver(*pairs, kDesk);
        auto t = play(*pairs, NodeSeq{}, optimal_first(solver), optimal_second(solver), 10, kDesk);
        CHECK(t.reply_count() == 2);
        CHECK(t.terminal == Transcript::Terminal::second_stuck);

        auto full = gallery("fullspread");
        auto u = play(*full, NodeSeq{}, lowest_boundary_first(), greedy_second(*full, 96), 5, kDesk);
        CHECK(u.reply_count() == 5);
        CHECK(u.terminal == Transcript::Terminal::round_limit);

        auto chain = gallery("chain");
        auto w = play(*chain, NodeSeq{0}, lowest_boundary_first(), greedy_second(*chain, 96), 3, kDesk);
        REQUIRE(w.rounds.size() == 3);
        CHECK(w.rounds[0].reply == NodeSeq{0, 1});
        CHECK(w.rounds[1].reply == NodeSeq{0, 1, 2});
        CHECK(w.rounds[2].reply == NodeSeq{0, 1, 2, 3});
        CHECK(w.rounds[1].boundary == 1);

        // the root admits no lowest boundary below 0, so [0] is never a legal reply there
        auto v = play(*chain, NodeSeq{}, lowest_boundary_first(), greedy_second(*chain, 96), 3, kDesk);
        CHECK(v.reply_count() == 0);
        CHECK(v.terminal == Transcript::Terminal::second_stuck);
    }

    TEST_CASE("play rejects illegal moves")
    {
        auto pairs = gallery("pairs");
        auto bad_first = [](const NodeSeq&) { return Nat{200}; };
        CHECK_THROWS_AS(play(*pairs, NodeSeq{}, bad_first, greedy_second(*pairs, 96), 3, kDesk), Error);
        auto bad_second = [](const NodeSeq&, Nat a) -> std::optional<NodeSeq> { return NodeSeq{a}; };
        CHECK_THROWS_AS(play(*pairs, NodeSeq{}, lowest_boundary_first(), bad_second, 3, kDesk), Error);
        auto quitter = [](const NodeSeq&, Nat) -> std::optional<NodeSeq> { return std::nullopt; };
        try {
            play(*pairs, NodeSeq{}, lowest_boundary_first(), quitter, 3, kDesk);
            FAIL("expected IllegalMove");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::IllegalMove);
        }
    }

    TEST_CASE("solver agrees with exhaustive set-reply minimax at small bounds")
    {
        for (std::string name : {"chain", "pairs", "depthk3", "bushspine", "fullspread"}) {
            const GameBounds small{4, name == "fullspread" ? 7 : 10, name == "fullspread" ? 4 : 8};
            auto tree = named_tree(name);
            oracle::BruteForceGame brute(*tree, small);
            GameSolver solver(*tree, small);
            std::size_t checked = 0;
            for (const auto& s : nodes_upto(*tree, small.universe_bound)) {
                const int v = solver.entry(s).value;
                CHECK_MESSAGE(v == brute.value(as_vec(s)), name << " " << s.to_string());
                CHECK_MESSAGE(solver.entry(s).subtree_max == brute.rank(as_vec(s)), name << " " << s.to_string());
                ++checked;
            }
            CHECK(checked == brute.node_count());
        }
    }

    TEST_CASE("solver agrees with class-memoized minimax at desk bounds")
    {
        for (std::string name : {"chain", "pairs", "depthk3", "bushspine", "fullspread"}) {
            auto tree = named_tree(name);
            oracle::NaiveMinimax naive(*tree, gallery_label(name), kDesk);
            GameSolver solver(*tree, kDesk);
            for (const auto& s : nodes_upto(*tree, 7)) {
                CHECK_MESSAGE(solver.entry(s).value == naive.value(as_vec(s)), name << " " << s.to_string());
                CHECK_MESSAGE(solver.entry(s).subtree_max == naive.rank(as_vec(s)), name << " " << s.to_string());
            }
        }
    }

    TEST_CASE("random explicit trees: solver matches brute force")
    {
        std::mt19937 rng(20240611u);
        for (int round = 0; round < 40; ++round) {
            auto tree = random_tree(rng, 8, 0.45, 4);
            const GameBounds small{static_cast<Nat>(round % 5), 8, 1 + round % 6};
            oracle::BruteForceGame brute(tree, small);
            GameSolver solver(tree, small);
            for (const auto& s : tree.nodes()) {
                CHECK(solver.entry(s).value == brute.value(as_vec(s)));
                CHECK(solver.entry(s).subtree_max == brute.rank(as_vec(s)));
            }
        }
    }

    TEST_CASE("value is monotone in cap and in N")
    {
        for (std::string name : {"pairs", "depthk3", "bushspine", "fullspread", "chain"}) {
            auto tree = named_tree(name);
            for (const auto& s : nodes_upto(*tree, 5)) {
                int prev = -1;
                for (int cap = 1; cap <= 9; ++cap) {
                    auto v = survival_value(*tree, s, {12, 48, cap});
                    CHECK(v.value >= prev);
                    if (prev >= 0 && prev < cap - 1) CHECK(v == SurvivalValue::finite(prev));
                    prev = v.value;
                }
                int prev_n = -1;
                for (Nat n : {12, 24, 48, 96}) {
                    auto v = survival_value(*tree, s, {12, n, 8});
                    CHECK(v.value >= prev_n);
                    prev_n = v.value;
                }
            }
        }
    }

    TEST_CASE("stabilization on the gallery")
    {
        auto st = stabilization(*gallery("pairs"), NodeSeq{}, kDesk);
        CHECK(st.stable);
        CHECK(st.universes == std::array<Nat, 3>{96, 192, 384});
        CHECK(st.values[2] == SurvivalValue::finite(2));
        CHECK(stabilization(*gallery("fullspread"), NodeSeq{}, kDesk).stable);
        CHECK(stabilization(*gallery("bushspine"), NodeSeq{0}, kDesk).values[1] == SurvivalValue::finite(2));
    }

    TEST_CASE("g = 0 exactly when the son list is finite")
    {
        for (std::string name : {"chain", "pairs", "depthk3", "bushspine", "fullspread"}) {
            auto tree = named_tree(name);
            GameSolver solver(*tree, kDesk);
            std::vector<NodeSeq> shallow;
            for_each_node(*tree, 24, [&](const NodeSeq& s) {
                shallow.push_back(s);
                return s.size() < 4;
            });
            for (const auto& s : shallow) {
                const bool zero = solver.survival_value(s) == SurvivalValue::finite(0);
                CHECK_MESSAGE(zero == (sons(*tree, s, 96).cofinal == Hint::no), name << " " << s.to_string());
            }
        }
    }

    TEST_CASE("optimal play lasts exactly the reported value")
    {
        for (std::string name : {"chain", "pairs", "depthk3", "bushspine"}) {
            auto tree = named_tree(name);
            GameSolver solver(*tree, kDesk);
            for (const auto& s : nodes_upto(*tree, 9)) {
                const auto g = solver.survival_value(s);
                if (!g.is_finite()) continue;
                auto t = play(*tree, s, optimal_first(solver), optimal_second(solver), 20, kDesk);
                CHECK_MESSAGE(static_cast<int>(t.reply_count()) == g.value, name << " " << s.to_string());
                CHECK(t.terminal == Transcript::Terminal::second_stuck);
            }
        }
    }
}
