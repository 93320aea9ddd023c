#include "stratcheck/benchmark.hpp"
#include "stratcheck/verify.hpp"

#include "fuzz.hpp"
#include "oracle.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace stratcheck;
using support::state;

namespace {

FormulaAst formula(const GlobalModel& m, const std::string& text) { return resolve_formula(*m.amas, parse_formula(text)); }

oracle::NamedStrategy named(const Amas& amas, const Strategy& s) {
    oracle::NamedStrategy out;
    for (std::size_t i = 0; i < s.members.size(); ++i) {
        const Agent& a = amas.agents[s.members[i]];
        for (LocalId l = 0; l < a.locals.size(); ++l) {
            ActionId act = s.at(i, l);
            out[a.name][a.locals[l]] = act == kEpsilon ? "eps" : std::string(amas.action_name(act));
        }
    }
    return out;
}

Strategy controller(const Amas& amas, const char* at_g, const char* at_r) {
    Strategy s = empty_strategy(amas, {0});
    s.choice[0][0] = *amas.action_index(at_g);
    s.choice[0][1] = *amas.action_index(at_r);
    return s;
}

std::set<std::string> present(const GlobalModel& m, const Submodel& sub) {
    std::set<std::string> out;
    for (StateId s = 0; s < m.size(); ++s) {
        if (sub.present[s]) out.insert(describe_locals(*m.amas, m.states[s]));
    }
    return out;
}

std::set<std::string> successors(const GlobalModel& m, const Submodel& sub, const std::string& from) {
    std::set<std::string> out;
    for (StateId t : sub.succ[state(m, from)]) out.insert(describe_locals(*m.amas, m.states[t]));
    return out;
}

} // namespace

TEST(PruneModel, Tgc) {
    GlobalModel m = support::model_of(support::fixture("tgc.stv"));
    Submodel sub = prune_model(m, controller(*m.amas, "a1", "a2"));
    EXPECT_EQ(present(m, sub), (std::set<std::string>{"G,W,W", "R,T,W", "G,A,W", "G,W,A", "R,T,A", "G,A,A"}));
    EXPECT_EQ(successors(m, sub, "G,W,W"), std::set<std::string>{"R,T,W"});
    EXPECT_EQ(successors(m, sub, "R,T,W"), std::set<std::string>{"G,A,W"});
    EXPECT_EQ(successors(m, sub, "G,A,W"), std::set<std::string>{"G,W,W"});
    EXPECT_EQ(successors(m, sub, "G,W,A"), (std::set<std::string>{"R,T,A", "G,W,W"}));
    EXPECT_EQ(sub.starts.size(), 4u);
}

TEST(PruneModel, BlockedStateStutters) {
    GlobalModel m = support::model_of(support::fixture("tgc.stv"));
    Submodel sub = prune_model(m, controller(*m.amas, "a1", "b2"));
    EXPECT_EQ(successors(m, sub, "R,T,W"), std::set<std::string>{"R,T,W"});
}

TEST(PruneModel, NoOwnedActions) {
    // The coalition member owns nothing, so nothing is pruned.
    GlobalModel m = support::model_of("AGENT Idle:\n  INIT: i\nAGENT B:\n  INIT: u\n  u -> v : go\n  u -> w : alt\n"
                                      "  v -> u : back\n");
    Submodel sub = prune_model(m, empty_strategy(*m.amas, {0}));
    for (StateId s = 0; s < m.size(); ++s) {
        EXPECT_TRUE(sub.present[s]);
        EXPECT_EQ(sub.succ[s].size(), m.out(s).size());
    }
}

TEST(EvalObjective, Basics) {
    GlobalModel m = support::model_of(support::fixture("tgc.stv"));
    Strategy s = controller(*m.amas, "a1", "a2");
    Submodel sub = prune_model(m, s);
    EXPECT_TRUE(eval_objective(sub, sub.starts, Objective::of(m, formula(m, "<<Controller>> F true"))));
    EXPECT_FALSE(eval_objective(sub, sub.starts, Objective::of(m, formula(m, "<<Controller>> G false"))));
    EXPECT_TRUE(eval_objective(sub, sub.starts, Objective::of(m, formula(m, "<<Controller>> G !(in1 & in2)"))));
    EXPECT_TRUE(eval_objective(sub, sub.starts, Objective::of(m, formula(m, "<<Controller>> F in1"))));
    EXPECT_FALSE(eval_objective(sub, sub.starts, Objective::of(m, formula(m, "<<Controller>> F in2"))));
    // From the initial state alone a1 is forced.
    EXPECT_TRUE(eval_objective(sub, {state(m, "G,W,W")}, Objective::of(m, formula(m, "<<Controller>> X in1"))));
    EXPECT_TRUE(eval_objective(sub, {state(m, "G,W,W")}, Objective::of(m, formula(m, "<<Controller>> F in1"))));
    EXPECT_TRUE(eval_objective(sub, {state(m, "G,W,W")}, Objective::of(m, formula(m, "<<Controller>> !in2 U in1"))));
    EXPECT_FALSE(eval_objective(sub, {state(m, "G,W,W")}, Objective::of(m, formula(m, "<<Controller>> in2 U in1"))));
}

TEST(Bruteforce, TgcSafety) {
    auto amas = support::amas_of(support::fixture("tgc.stv"));
    GlobalModel m = build_global_model(amas);
    VerificationResult r = verify_bruteforce(m, *amas->formula);
    EXPECT_EQ(r.truth, Truth::True);
    EXPECT_LE(r.stats.strategies_examined, 4u);
    ASSERT_TRUE(r.strategy);
    EXPECT_EQ(strategy_to_json(*amas, *r.strategy).dump(), R"({"Controller":{"G":"a1","R":"a2"}})");
    EXPECT_EQ(r.method, Method::Bruteforce);
}

TEST(Bruteforce, TrainCannotForce) {
    GlobalModel m = support::model_of(support::fixture("tgc.stv"));
    VerificationResult in2 = verify_bruteforce(m, formula(m, "<<Train1>> F in2"));
    EXPECT_EQ(in2.truth, Truth::False);
    EXPECT_FALSE(in2.strategy);
    EXPECT_EQ(in2.stats.strategies_examined, 1u);  // one action per local state
    EXPECT_EQ(verify_bruteforce(m, formula(m, "<<Train1>> F in1")).truth, Truth::False);
}

TEST(Bruteforce, Limits) {
    GlobalModel m = support::model_of(generate_tgc(3));
    Limits tight;
    tight.max_strategies = 4;
    try {
        verify_bruteforce(m, formula(m, "<<Controller>> F in1"), tight);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::StrategySpaceExceeded);
    }
    Limits late;
    late.deadline = std::chrono::steady_clock::now() - std::chrono::seconds(1);
    for (Method method : {Method::Bruteforce, Method::Fixpoint, Method::Dfs}) {
        try {
            verify(m, formula(m, "<<Controller>> F (in1 & in2)"), method, late);
            FAIL() << to_string(method);
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::Timeout);
        }
    }
}

TEST(Fixpoint, Upper) {
    GlobalModel p = support::model_of("AGENT A:\n  INIT: s\n  s -> t : go [SET p=true]\n  s -> s : stay [SET p=true]\n"
                                      "  t -> s : back\nPROPOSITIONS: p\n");
    GlobalModel at_init = support::model_of("AGENT A:\n  INIT: s\n  s -> s : stay\nAGENT B:\n  INIT: b\nPROPOSITIONS: p\n");
    VerificationStats stats;
    EXPECT_TRUE(fixpoint_upper(at_init, formula(at_init, "<<A>> F !p"), {}, &stats));
    EXPECT_EQ(stats.nodes, 1u);

    GlobalModel m = support::model_of(support::fixture("tgc.stv"));
    EXPECT_FALSE(fixpoint_upper(m, formula(m, "<<Train1>> F in1")));
    EXPECT_TRUE(fixpoint_upper(m, formula(m, "<<Train1>> G true")));
    EXPECT_TRUE(fixpoint_upper(m, formula(m, "<<Controller>> G true")));
    EXPECT_FALSE(fixpoint_upper(p, formula(p, "<<A>> G !p")));
}

TEST(Fixpoint, Lower) {
    GlobalModel m = support::model_of(support::fixture("tgc.stv"));
    Strategy s;
    EXPECT_TRUE(fixpoint_lower(m, formula(m, "<<Controller>> G !(in1 & in2)"), {}, &s));
    EXPECT_TRUE(wins(m, s, Objective::of(m, formula(m, "<<Controller>> G !(in1 & in2)"))));
    GlobalModel never = support::model_of("AGENT A:\n  INIT: s\n  s -> t : go\n  t -> s : back\nPROPOSITIONS: p\n");
    EXPECT_FALSE(fixpoint_lower(never, formula(never, "<<A>> F p")));
}

TEST(Approx, Decisions) {
    auto amas = support::amas_of(support::fixture("tgc.stv"));
    GlobalModel m = build_global_model(amas);
    VerificationResult safety = verify_approx(m, *amas->formula);
    EXPECT_EQ(safety.truth, Truth::True);
    EXPECT_EQ(safety.lower, true);
    EXPECT_EQ(safety.upper, true);
    ASSERT_TRUE(safety.strategy);

    GlobalModel never = support::model_of("AGENT A:\n  INIT: s\n  s -> t : go\n  t -> s : back\nPROPOSITIONS: p\n");
    VerificationResult unreachable = verify_approx(never, formula(never, "<<A>> F p"));
    EXPECT_EQ(unreachable.truth, Truth::False);
    EXPECT_EQ(unreachable.upper, false);

    auto guess = support::amas_of(support::fixture("guess.stv"));
    GlobalModel g = build_global_model(guess);
    VerificationResult r = verify_approx(g, *guess->formula);
    EXPECT_EQ(r.truth, Truth::Inconclusive);
    EXPECT_EQ(r.lower, false);
    EXPECT_EQ(r.upper, true);
    EXPECT_FALSE(r.strategy);
    EXPECT_EQ(verify_bruteforce(g, *guess->formula).truth, Truth::False);
    EXPECT_FALSE(oracle::exists_winning_strategy(parse_spec(support::fixture("guess.stv")), *guess->formula));
}

TEST(Dfs, Tgc) {
    auto amas = support::amas_of(support::fixture("tgc.stv"));
    GlobalModel m = build_global_model(amas);
    VerificationResult safety = verify_dfs(m, *amas->formula);
    EXPECT_EQ(safety.truth, Truth::True);
    EXPECT_LE(safety.stats.strategies_examined, 4u);
    ASSERT_TRUE(safety.strategy);
    EXPECT_TRUE(wins(m, *safety.strategy, Objective::of(m, *amas->formula)));

    // Controller has two decision points; every branch dies by depth two, so
    // the search tree has at most 1 + 2 + 4 nodes and no strategy is completed.
    VerificationResult clash = verify_dfs(m, formula(m, "<<Controller>> F (in1 & in2)"));
    EXPECT_EQ(clash.truth, Truth::False);
    EXPECT_LE(clash.stats.nodes, 7u);
    EXPECT_EQ(clash.stats.strategies_examined, 0u);
}

TEST(Verify, FixturesAgreeWithOracle) {
    const char* formulas[] = {"<<Controller>> G !(in1 & in2)", "<<Controller>> F in1", "<<Controller>> F (in1 | in2)",
                              "<<Controller,Train1>> F in1", "<<Train1,Train2>> F (in1 & in2)",
                              "<<Controller>> X (in1 | in2)", "<<Controller>> !in2 U in1", "<<Train2>> G !in1"};
    std::string text = support::fixture("tgc.stv");
    SpecDocument doc = parse_spec(text);
    GlobalModel m = support::model_of(text);
    for (const char* f : formulas) {
        FormulaAst fa = formula(m, f);
        bool expected = oracle::exists_winning_strategy(doc, fa);
        for (Method method : {Method::Bruteforce, Method::Dfs}) {
            VerificationResult r = verify(m, fa, method);
            EXPECT_EQ(r.truth == Truth::True, expected) << f << " " << to_string(method);
        }
    }
}

// Properties over generated models.

TEST(VerifyProperties, EnginesAndCertificates) {
    std::mt19937 rng(41);
    const char* ops[] = {"F", "G", "X", "U"};
    for (int i = 0; i < 240; ++i) {
        std::string text = fuzz::random_spec(rng, ops[i % 4]);
        SpecDocument doc = parse_spec(text);
        auto amas = support::amas_of(text);
        GlobalModel m = build_global_model(amas);
        const FormulaAst& f = *amas->formula;
        oracle::Simulator sim(doc);
        oracle::Graph g = oracle::explore(sim);

        VerificationResult brute = verify_bruteforce(m, f);
        VerificationResult dfs = verify_dfs(m, f);
        bool lower = fixpoint_lower(m, f);
        bool upper = fixpoint_upper(m, f);
        const bool exact = brute.truth == Truth::True;
        ASSERT_EQ(exact, oracle::exists_winning_strategy(doc, f)) << text;
        ASSERT_EQ(dfs.truth, brute.truth) << text;
        ASSERT_TRUE(!lower || exact) << text;
        ASSERT_TRUE(!exact || upper) << text;
        for (const auto* r : {&brute, &dfs}) {
            if (r->truth != Truth::True) continue;
            ASSERT_TRUE(r->strategy);
            ASSERT_TRUE(oracle::strategy_wins(sim, g, doc.formula.value(), named(*amas, *r->strategy))) << text;
        }
        VerificationResult approx = verify_approx(m, f);
        if (approx.truth == Truth::True) {
            ASSERT_TRUE(oracle::strategy_wins(sim, g, doc.formula.value(), named(*amas, *approx.strategy))) << text;
        }
        ASSERT_TRUE(approx.truth == Truth::Inconclusive || (approx.truth == Truth::True) == exact) << text;
    }
}

TEST(VerifyProperties, EventuallyIsMonotone) {
    std::mt19937 rng(42);
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
        auto amas = support::amas_of(fuzz::random_spec(rng, "F"));
        GlobalModel m = build_global_model(amas);
        const FormulaAst& f = *amas->formula;
        if (verify_bruteforce(m, f).truth != Truth::True) continue;
        ++checked;
        // phi implies phi | psi for any psi
        FormulaAst weaker = f;
        weaker.body = BoolExpr::disjunction(f.body, BoolExpr::constant(false));
        if (!amas->propositions.empty()) {
            weaker.body = BoolExpr::disjunction(f.body, BoolExpr::atom(amas->propositions.back()));
            weaker = resolve_formula(*amas, weaker);
        }
        ASSERT_EQ(verify_bruteforce(m, weaker).truth, Truth::True) << to_string(f);
    }
    EXPECT_GT(checked, 20);
}
