#include "stratcheck/amas.hpp"
#include "stratcheck/spec_lang.hpp"

#include "fuzz.hpp"
#include "oracle.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace stratcheck;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::Timeout;
}

std::size_t count_lines(const std::string& text) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) + 1;
}

std::set<std::string> owner_names(const Amas& amas, const std::string& action) {
    std::set<std::string> out;
    for (AgentId a : amas.owners.at(*amas.action_index(action))) out.insert(amas.agents[a].name);
    return out;
}

} // namespace

TEST(ParseSpec, Tgc) {
    SpecDocument doc = parse_spec(support::fixture("tgc.stv"));
    ASSERT_EQ(doc.agents.size(), 3u);
    std::size_t transitions = 0;
    for (const auto& a : doc.agents) transitions += a.transitions.size();
    EXPECT_EQ(transitions, 10u);
    EXPECT_EQ(doc.coalition, std::vector<std::string>{"Controller"});
    EXPECT_EQ(doc.propositions, (std::vector<std::string>{"in1", "in2"}));
    EXPECT_EQ(doc.agents[0].locals, (std::vector<std::string>{"G", "R"}));
    EXPECT_EQ(doc.agents[1].locals, (std::vector<std::string>{"W", "T", "A"}));
    ASSERT_TRUE(doc.formula);
    EXPECT_EQ(to_string(*doc.formula), "<<Controller>> G !(in1 & in2)");
}

TEST(ParseSpec, EmptyText) {
    try {
        parse_spec("");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Syntax);
        EXPECT_NE(e.message().find("expected AGENT"), std::string::npos);
    }
    EXPECT_EQ(kind_of([] { parse_spec("% only a comment\n\n"); }), ErrorKind::Syntax);
}

TEST(ParseSpec, DuplicateTransition) {
    std::string text = support::fixture("tgc.stv");
    const std::string line = "  W -> T : a1 [SET in1=true]\n";
    text.insert(text.find(line), "  W -> T : a1\n");
    EXPECT_EQ(kind_of([&] { parse_spec(text); }), ErrorKind::DuplicateDeclaration);
}

TEST(ParseSpec, Duplicates) {
    EXPECT_EQ(kind_of([] { parse_spec("AGENT A:\n INIT: s\nAGENT A:\n INIT: s\n"); }),
              ErrorKind::DuplicateDeclaration);
    EXPECT_EQ(kind_of([] { parse_spec("AGENT A:\n INIT: s\nPROPOSITIONS: p, p\n"); }),
              ErrorKind::DuplicateDeclaration);
}

TEST(ParseSpec, UnknownReferences) {
    EXPECT_EQ(kind_of([] { parse_spec("AGENT A:\n INIT: s\n s -> s : x [SET q=true]\n"); }),
              ErrorKind::UnknownReference);
    EXPECT_EQ(kind_of([] { parse_spec("AGENT A:\n INIT: s\nFORMULA: <<B>> F true\n"); }),
              ErrorKind::UnknownReference);
    EXPECT_EQ(kind_of([] { parse_spec("AGENT A:\n INIT: s\nFORMULA: <<A>> F q\n"); }), ErrorKind::UnknownReference);
    EXPECT_EQ(kind_of([] { parse_spec("AGENT A:\n INIT: s\nPROPOSITIONS: p\nPERSISTENT: q\n"); }),
              ErrorKind::UnknownReference);
    EXPECT_EQ(kind_of([] { parse_spec("AGENT A:\n INIT: s\nCOALITION: B\n"); }), ErrorKind::UnknownReference);
}

TEST(ParseSpec, Malformed) {
    EXPECT_EQ(kind_of([] { parse_spec("AGENT A\n INIT: s\n"); }), ErrorKind::Syntax);
    EXPECT_EQ(kind_of([] { parse_spec("AGENT A:\n s -> t : x\n"); }), ErrorKind::Syntax);
    EXPECT_EQ(kind_of([] { parse_spec("AGENT A:\n INIT: s\n s -> t x\n"); }), ErrorKind::Syntax);
    EXPECT_EQ(kind_of([] { parse_spec("AGENT A:\n INIT: s\n s -> t : x [SET p=maybe]\nPROPOSITIONS: p\n"); }),
              ErrorKind::Syntax);
    EXPECT_EQ(kind_of([] { parse_spec("AGENT A:\n INIT: s\nFORMULA: <<A>> F\n"); }), ErrorKind::Syntax);
}

TEST(ParseSpec, CommentsAndBlankLines) {
    SpecDocument doc = parse_spec("% header\n\nAGENT A: % trailing\n  INIT: s % init\n\n  s -> t : go\n");
    ASSERT_EQ(doc.agents.size(), 1u);
    EXPECT_EQ(doc.agents[0].locals, (std::vector<std::string>{"s", "t"}));
    EXPECT_FALSE(doc.formula);
}

TEST(ParseSpec, SourceSpans) {
    SpecDocument doc = parse_spec(support::fixture("tgc.stv"));
    EXPECT_EQ(doc.agents[1].pos.line, 7u);
    EXPECT_EQ(doc.agents[1].transitions[0].pos.line, 9u);
    EXPECT_EQ(doc.spans.at("FORMULA").line, 18u);
    EXPECT_EQ(doc.spans.at("PROPOSITIONS").line, 17u);
}

TEST(ParseSpec, ErrorPosition) {
    try {
        parse_spec("AGENT A:\n  INIT: s\n  s -> t : x [SET p=true]\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnknownReference);
        EXPECT_EQ(e.pos().line, 3u);
        EXPECT_GT(e.pos().column, 1u);
    }
}

TEST(ParseFormula, Examples) {
    FormulaAst f = parse_formula("<<Controller>> G !(in1 & in2)");
    EXPECT_EQ(f.coalition, std::vector<std::string>{"Controller"});
    EXPECT_EQ(f.op, TemporalOp::Always);
    EXPECT_EQ(f.body, BoolExpr::negation(BoolExpr::conjunction(BoolExpr::atom("in1"), BoolExpr::atom("in2"))));
    EXPECT_EQ(to_string(f), "<<Controller>> G !(in1 & in2)");

    FormulaAst t = parse_formula("<<Train1>> F true");
    EXPECT_EQ(t.op, TemporalOp::Eventually);
    EXPECT_EQ(t.body, BoolExpr::constant(true));

    EXPECT_EQ(kind_of([] { parse_formula("<<A>> F <<B>> G p"); }), ErrorKind::NestedModality);
}

TEST(ParseFormula, Precedence) {
    FormulaAst f = parse_formula("<<A,B>> F !p & q | r");
    auto expected = BoolExpr::disjunction(BoolExpr::conjunction(BoolExpr::negation(BoolExpr::atom("p")),
                                                                BoolExpr::atom("q")),
                                          BoolExpr::atom("r"));
    EXPECT_EQ(f.body, expected);
    EXPECT_EQ(f.coalition, (std::vector<std::string>{"A", "B"}));

    FormulaAst u = parse_formula("<<A>> p | q U !r");
    EXPECT_EQ(u.op, TemporalOp::Until);
    EXPECT_EQ(u.lhs, BoolExpr::disjunction(BoolExpr::atom("p"), BoolExpr::atom("q")));
    EXPECT_EQ(u.body, BoolExpr::negation(BoolExpr::atom("r")));
    EXPECT_EQ(parse_formula(to_string(u)), u);
}

TEST(ParseFormula, Rejects) {
    EXPECT_EQ(kind_of([] { parse_formula("<<>> F p"); }), ErrorKind::Syntax);
    EXPECT_EQ(kind_of([] { parse_formula("F p"); }), ErrorKind::Syntax);
    EXPECT_EQ(kind_of([] { parse_formula("<<A>> F p q"); }), ErrorKind::Syntax);
    EXPECT_EQ(kind_of([] { parse_formula("<<A>> F (p"); }), ErrorKind::Syntax);
    EXPECT_EQ(kind_of([] { parse_formula("<<A>> p U <<B>> q"); }), ErrorKind::NestedModality);
}

TEST(ParseRelation, Examples) {
    SpecDocument tgc = parse_spec(support::fixture("tgc.stv"));
    RelationSpec one = parse_relation("(G,W,W) ~ (G,W,W)\n", tgc, tgc);
    ASSERT_EQ(one.pairs.size(), 1u);
    EXPECT_EQ(one.pairs[0].left, (std::vector<std::size_t>{0, 0, 0}));

    EXPECT_EQ(kind_of([&] { parse_relation("(G,W) ~ (G,W,W)\n", tgc, tgc); }), ErrorKind::ArityMismatch);
    EXPECT_EQ(kind_of([&] { parse_relation("(G,W,Q) ~ (G,W,W)\n", tgc, tgc); }), ErrorKind::UnknownLocalState);
    EXPECT_EQ(kind_of([&] { parse_relation("(G,W,W) (G,W,W)\n", tgc, tgc); }), ErrorKind::Syntax);
    EXPECT_EQ(kind_of([&] { parse_relation("COALITION: Nobody\n(G,W,W) ~ (G,W,W)\n", tgc, tgc); }),
              ErrorKind::UnknownReference);
}

TEST(ParseRelation, AllReachableStates) {
    SpecDocument tgc = parse_spec(support::fixture("tgc.stv"));
    oracle::Simulator sim(tgc);
    std::string text;
    for (const auto& [s, _] : oracle::explore(sim).succ) {
        std::string tuple = "(" + detail::join(s.locals, ",") + ")";
        text += tuple + " ~ " + tuple + "\n";
    }
    RelationSpec rel = parse_relation(text, tgc, tgc);
    EXPECT_EQ(rel.pairs.size(), 8u);
    EXPECT_EQ(parse_relation(support::fixture("tgc_identity.rel"), tgc, tgc).pairs.size(), 8u);
    EXPECT_EQ(parse_relation(support::fixture("tgc_identity.rel"), tgc, tgc).coalition,
              std::vector<std::string>{"Controller"});
}

TEST(Validate, Owners) {
    Amas amas = load_amas(support::fixture("tgc.stv"));
    EXPECT_EQ(owner_names(amas, "a1"), (std::set<std::string>{"Train1", "Controller"}));
    EXPECT_EQ(owner_names(amas, "a3"), (std::set<std::string>{"Train1"}));
    EXPECT_EQ(owner_names(amas, "b2"), (std::set<std::string>{"Train2", "Controller"}));
    EXPECT_EQ(amas.actions, (std::vector<std::string>{"a1", "b1", "a2", "b2", "a3", "b3"}));
    EXPECT_EQ(amas.coalition, std::vector<AgentId>{0});
}

TEST(Validate, PersistentCleared) {
    const char* text = "AGENT A:\n  INIT: s\n  s -> t : finish [SET done=true]\n  t -> s : reset [SET done=false]\n"
                       "PROPOSITIONS: done\nPERSISTENT: done\n";
    EXPECT_EQ(kind_of([&] { load_amas(text); }), ErrorKind::PersistentCleared);
}

TEST(Validate, EmptyAgent) {
    EXPECT_EQ(kind_of([] { load_amas("AGENT A:\nAGENT B:\n  INIT: s\n"); }), ErrorKind::EmptyAgent);
}

TEST(Validate, SingleAgent) {
    Amas amas = load_amas(support::fixture("single.stv"));
    ASSERT_EQ(amas.agents.size(), 1u);
    EXPECT_TRUE(amas.actions.empty());
    GlobalModel m = build_global_model(amas);
    ASSERT_EQ(m.size(), 1u);
    ASSERT_EQ(m.edges.size(), 1u);
    EXPECT_EQ(m.edges[0].action, kEpsilon);
    EXPECT_EQ(m.edges[0].dst, 0u);
}

// Properties over generated specifications.

TEST(SpecProperties, RoundTrip) {
    std::mt19937 rng(11);
    const char* ops[] = {"F", "G", "X", "U"};
    for (int i = 0; i < 300; ++i) {
        std::string text = fuzz::random_spec(rng, ops[i % 4]);
        SpecDocument doc = parse_spec(text);
        std::string printed = to_string(doc);
        SpecDocument again = parse_spec(printed);
        ASSERT_EQ(again, doc) << text << "\n---\n" << printed;
        ASSERT_EQ(to_string(again), printed);
    }
}

TEST(SpecProperties, ErrorsCarryPositions) {
    std::mt19937 rng(12);
    int errors = 0;
    for (int i = 0; i < 400; ++i) {
        std::string text = fuzz::random_spec(rng, "G");
        // damage one character
        std::size_t at = static_cast<std::size_t>(fuzz::uniform(rng, 0, static_cast<int>(text.size()) - 1));
        const char junk[] = {'#', ':', '(', '>', '[', 'Z', ' ', '\n', '='};
        text[at] = junk[fuzz::uniform(rng, 0, 8)];
        try {
            load_amas(text);
        } catch (const Error& e) {
            ++errors;
            ASSERT_GE(e.pos().line, 1u) << e.what() << "\n" << text;
            ASSERT_LE(e.pos().line, count_lines(text)) << e.what() << "\n" << text;
            ASSERT_GE(e.pos().column, 1u) << e.what() << "\n" << text;
        }
    }
    EXPECT_GT(errors, 50);
}

TEST(SpecProperties, OwnersIgnoreAgentOrder) {
    std::mt19937 rng(13);
    for (int i = 0; i < 200; ++i) {
        SpecDocument doc = parse_spec(fuzz::random_spec(rng, "F"));
        SpecDocument shuffled = doc;
        std::shuffle(shuffled.agents.begin(), shuffled.agents.end(), rng);
        Amas a = validate(doc);
        Amas b = validate(parse_spec(to_string(shuffled)));
        ASSERT_EQ(std::set<std::string>(a.actions.begin(), a.actions.end()),
                  std::set<std::string>(b.actions.begin(), b.actions.end()));
        for (const auto& action : a.actions) ASSERT_EQ(owner_names(a, action), owner_names(b, action)) << action;
    }
}
