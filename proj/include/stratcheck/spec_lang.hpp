#pragma once

// Text specification language for asynchronous multi-agent systems.
//
// A specification is line oriented; `%` starts a comment that runs to the end
// of the line:
//
//   AGENT Controller:
//     INIT: G
//     G -> R : a1
//     R -> G : a2 [SET in1=false]
//   PROPOSITIONS: in1, in2
//   PERSISTENT: in1
//   COALITION: Controller
//   FORMULA: <<Controller>> G !(in1 & in2)
//
// Local states of an agent are the INIT state followed by transition
// endpoints in order of first appearance. Actions shared between agents are
// recognised by name: an action belongs to every agent that mentions it.

#include "stratcheck/error.hpp"

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stratcheck {

// ── Formula AST ─────────────────────────────────────────────────────────────

struct BoolExpr {
    enum class Kind { True, False, Prop, Not, And, Or };

    Kind kind = Kind::True;
    std::string prop;            // Kind::Prop only
    int prop_index = -1;         // filled in by validate(); ignored by ==
    std::vector<BoolExpr> args;  // one for Not, two for And/Or

    static BoolExpr constant(bool value) { return {value ? Kind::True : Kind::False, {}, -1, {}}; }
    static BoolExpr atom(std::string name) { return {Kind::Prop, std::move(name), -1, {}}; }
    static BoolExpr negation(BoolExpr inner) { return {Kind::Not, {}, -1, {std::move(inner)}}; }
    static BoolExpr conjunction(BoolExpr lhs, BoolExpr rhs) {
        return {Kind::And, {}, -1, {std::move(lhs), std::move(rhs)}};
    }
    static BoolExpr disjunction(BoolExpr lhs, BoolExpr rhs) {
        return {Kind::Or, {}, -1, {std::move(lhs), std::move(rhs)}};
    }

    friend bool operator==(const BoolExpr& a, const BoolExpr& b) {
        return a.kind == b.kind && a.prop == b.prop && a.args == b.args;
    }
};

enum class TemporalOp { Next, Eventually, Always, Until };

struct FormulaAst {
    std::vector<std::string> coalition;
    TemporalOp op = TemporalOp::Eventually;
    BoolExpr lhs;   // Until only
    BoolExpr body;  // the operand of X/F/G, right operand of U

    friend bool operator==(const FormulaAst& a, const FormulaAst& b) {
        return a.coalition == b.coalition && a.op == b.op && a.body == b.body &&
               (a.op != TemporalOp::Until || a.lhs == b.lhs);
    }
};

// ── Specification AST ───────────────────────────────────────────────────────

struct EffectDecl {
    std::string prop;
    bool value = false;
    SourcePos pos;

    friend bool operator==(const EffectDecl& a, const EffectDecl& b) {
        return a.prop == b.prop && a.value == b.value;
    }
};

struct TransitionDecl {
    std::string src;
    std::string dst;
    std::string action;
    std::vector<EffectDecl> effects;
    SourcePos pos;

    friend bool operator==(const TransitionDecl& a, const TransitionDecl& b) {
        return a.src == b.src && a.dst == b.dst && a.action == b.action && a.effects == b.effects;
    }
};

struct AgentDecl {
    std::string name;
    std::vector<std::string> locals;
    std::string init;  // empty when the block declares nothing
    std::vector<TransitionDecl> transitions;
    SourcePos pos;

    [[nodiscard]] std::optional<std::size_t> local_index(std::string_view local) const {
        auto it = std::find(locals.begin(), locals.end(), local);
        if (it == locals.end()) return std::nullopt;
        return static_cast<std::size_t>(it - locals.begin());
    }

    friend bool operator==(const AgentDecl& a, const AgentDecl& b) {
        return a.name == b.name && a.locals == b.locals && a.init == b.init && a.transitions == b.transitions;
    }
};

struct SpecDocument {
    std::vector<AgentDecl> agents;
    std::vector<std::string> propositions;  // declaration order, pairwise distinct
    std::vector<std::string> persistent;
    std::vector<std::string> coalition;     // explicit COALITION line, else the formula's
    std::optional<FormulaAst> formula;

    // Positions of the top-level declarations, keyed by "PROPOSITIONS",
    // "PERSISTENT", "COALITION", "FORMULA", "prop:<name>". Agents,
    // transitions and effects carry their own position.
    std::map<std::string, SourcePos> spans;

    [[nodiscard]] std::optional<std::size_t> agent_index(std::string_view name) const {
        for (std::size_t i = 0; i < agents.size(); ++i) {
            if (agents[i].name == name) return i;
        }
        return std::nullopt;
    }

    friend bool operator==(const SpecDocument& a, const SpecDocument& b) {
        return a.agents == b.agents && a.propositions == b.propositions && a.persistent == b.persistent &&
               a.coalition == b.coalition && a.formula == b.formula;
    }
};

/// One relation entry: a local-state tuple per side, already resolved to
/// local indices in each model's agent declaration order.
struct DescriptorPair {
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    SourcePos pos;

    friend bool operator==(const DescriptorPair& a, const DescriptorPair& b) {
        return a.left == b.left && a.right == b.right;
    }
};

struct RelationSpec {
    std::vector<DescriptorPair> pairs;
    std::vector<std::string> coalition;  // optional COALITION line; resolved against the left model
};

namespace detail {

enum class Tok {
    Ident, Arrow, Colon, Comma, Eq, LBracket, RBracket, LModal, RModal,
    LParen, RParen, Bang, Amp, Pipe, Tilde, End,
};

inline std::string_view describe(Tok t) {
    switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Arrow: return "'->'";
    case Tok::Colon: return "':'";
    case Tok::Comma: return "','";
    case Tok::Eq: return "'='";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LModal: return "'<<'";
    case Tok::RModal: return "'>>'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Bang: return "'!'";
    case Tok::Amp: return "'&'";
    case Tok::Pipe: return "'|'";
    case Tok::Tilde: return "'~'";
    case Tok::End: return "end of line";
    }
    return "token";
}

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourcePos pos;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

/// Tokenizes one line. The trailing End token sits just past the last
/// character so diagnostics always point inside (or at the end of) the line.
inline std::vector<Token> tokenize_line(std::string_view line, std::size_t line_no) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto at = [&](std::size_t col) { return SourcePos{line_no, col + 1}; };
    while (i < line.size()) {
        char c = line[i];
        if (c == '%') break;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < line.size() && ident_char(line[j])) ++j;
            out.push_back({Tok::Ident, std::string(line.substr(i, j - i)), at(i)});
            i = j;
            continue;
        }
        auto two = line.substr(i, 2);
        if (two == "->") { out.push_back({Tok::Arrow, "->", at(i)}); i += 2; continue; }
        if (two == "<<") { out.push_back({Tok::LModal, "<<", at(i)}); i += 2; continue; }
        if (two == ">>") { out.push_back({Tok::RModal, ">>", at(i)}); i += 2; continue; }
        Tok kind;
        switch (c) {
        case ':': kind = Tok::Colon; break;
        case ',': kind = Tok::Comma; break;
        case '=': kind = Tok::Eq; break;
        case '[': kind = Tok::LBracket; break;
        case ']': kind = Tok::RBracket; break;
        case '(': kind = Tok::LParen; break;
        case ')': kind = Tok::RParen; break;
        case '!': kind = Tok::Bang; break;
        case '&': kind = Tok::Amp; break;
        case '|': kind = Tok::Pipe; break;
        case '~': kind = Tok::Tilde; break;
        default:
            throw Error(ErrorKind::Syntax, std::string("unexpected character '") + c + "'", at(i));
        }
        out.push_back({kind, std::string(1, c), at(i)});
        ++i;
    }
    std::size_t end_col = line.size();
    if (auto pct = line.find('%'); pct != std::string_view::npos) end_col = pct;
    out.push_back({Tok::End, "", at(end_col)});
    return out;
}

struct Line {
    std::size_t number;
    std::vector<Token> tokens;
};

/// Splits text into tokenized lines, dropping blank and comment-only lines.
inline std::vector<Line> tokenize(std::string_view text) {
    std::vector<Line> lines;
    std::size_t line_no = 1;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string_view raw = text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        auto tokens = tokenize_line(raw, line_no);
        if (tokens.size() > 1) lines.push_back({line_no, std::move(tokens)});
        if (nl == std::string_view::npos) break;
        start = nl + 1;
        ++line_no;
    }
    return lines;
}

inline bool is_reserved_prop(std::string_view name) {
    return name == "true" || name == "false" || name == "X" || name == "F" || name == "G" || name == "U";
}

class Cursor {
public:
    explicit Cursor(const std::vector<Token>& tokens) : tokens_(tokens) {}

    [[nodiscard]] const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }
    const Token& next() {
        const Token& t = peek();
        if (pos_ < tokens_.size() - 1) ++pos_;
        return t;
    }
    [[nodiscard]] bool at(Tok kind) const { return peek().kind == kind; }
    [[nodiscard]] bool at_word(std::string_view word) const {
        return peek().kind == Tok::Ident && peek().text == word;
    }
    bool accept(Tok kind) {
        if (!at(kind)) return false;
        next();
        return true;
    }
    const Token& expect(Tok kind, std::string_view what = {}) {
        if (!at(kind)) fail(what.empty() ? std::string("expected ") + std::string(describe(kind)) : std::string(what));
        return next();
    }
    void expect_word(std::string_view word) {
        if (!at_word(word)) fail("expected " + std::string(word));
        next();
    }
    void expect_end() {
        if (!at(Tok::End)) fail("unexpected " + std::string(describe(peek().kind)) + " '" + peek().text + "'");
    }
    [[noreturn]] void fail(const std::string& message) const {
        throw Error(ErrorKind::Syntax, message, peek().pos);
    }

private:
    const std::vector<Token>& tokens_;
    std::size_t pos_ = 0;
};

inline std::vector<Token> identifier_list(Cursor& cur, bool allow_empty) {
    std::vector<Token> names;
    if (cur.at(Tok::End) && allow_empty) return names;
    names.push_back(cur.expect(Tok::Ident));
    while (cur.accept(Tok::Comma)) names.push_back(cur.expect(Tok::Ident));
    cur.expect_end();
    return names;
}

class FormulaParser {
public:
    explicit FormulaParser(Cursor& cur) : cur_(cur) {}

    FormulaAst parse() {
        FormulaAst f;
        cur_.expect(Tok::LModal, "expected '<<'");
        if (cur_.at(Tok::RModal)) cur_.fail("coalition must name at least one agent");
        f.coalition.push_back(cur_.expect(Tok::Ident).text);
        while (cur_.accept(Tok::Comma)) f.coalition.push_back(cur_.expect(Tok::Ident).text);
        cur_.expect(Tok::RModal, "expected '>>'");
        if (cur_.at_word("X") || cur_.at_word("F") || cur_.at_word("G")) {
            const std::string& w = cur_.next().text;
            f.op = w == "X" ? TemporalOp::Next : w == "F" ? TemporalOp::Eventually : TemporalOp::Always;
            f.body = disjunction();
        } else {
            f.op = TemporalOp::Until;
            f.lhs = disjunction();
            if (!cur_.at_word("U")) cur_.fail("expected X, F, G or U");
            cur_.next();
            f.body = disjunction();
        }
        if (cur_.at(Tok::LModal)) {
            throw Error(ErrorKind::NestedModality, "strategic operator inside the objective", cur_.peek().pos);
        }
        cur_.expect_end();
        return f;
    }

private:
    BoolExpr disjunction() {
        BoolExpr lhs = conjunction();
        while (cur_.accept(Tok::Pipe)) lhs = BoolExpr::disjunction(std::move(lhs), conjunction());
        return lhs;
    }
    BoolExpr conjunction() {
        BoolExpr lhs = unary();
        while (cur_.accept(Tok::Amp)) lhs = BoolExpr::conjunction(std::move(lhs), unary());
        return lhs;
    }
    BoolExpr unary() {
        if (cur_.accept(Tok::Bang)) return BoolExpr::negation(unary());
        if (cur_.accept(Tok::LParen)) {
            BoolExpr inner = disjunction();
            cur_.expect(Tok::RParen);
            return inner;
        }
        if (cur_.at(Tok::LModal)) {
            throw Error(ErrorKind::NestedModality, "strategic operator inside the objective", cur_.peek().pos);
        }
        if (!cur_.at(Tok::Ident)) cur_.fail("expected proposition, true, false, '!' or '('");
        const Token& t = cur_.peek();
        if (t.text == "true" || t.text == "false") {
            cur_.next();
            return BoolExpr::constant(t.text == "true");
        }
        if (t.text == "X" || t.text == "F" || t.text == "G" || t.text == "U") {
            cur_.fail("temporal operator '" + t.text + "' inside a state formula");
        }
        return BoolExpr::atom(cur_.next().text);
    }

    Cursor& cur_;
};

inline void collect_props(const BoolExpr& e, std::vector<const BoolExpr*>& out) {
    if (e.kind == BoolExpr::Kind::Prop) out.push_back(&e);
    for (const auto& a : e.args) collect_props(a, out);
}

inline void print_expr(const BoolExpr& e, std::string& out) {
    auto child = [&](const BoolExpr& c, bool parens) {
        if (parens) out += '(';
        print_expr(c, out);
        if (parens) out += ')';
    };
    switch (e.kind) {
    case BoolExpr::Kind::True: out += "true"; break;
    case BoolExpr::Kind::False: out += "false"; break;
    case BoolExpr::Kind::Prop: out += e.prop; break;
    case BoolExpr::Kind::Not: {
        out += '!';
        const auto k = e.args[0].kind;
        child(e.args[0], k == BoolExpr::Kind::And || k == BoolExpr::Kind::Or);
        break;
    }
    case BoolExpr::Kind::And:
        child(e.args[0], e.args[0].kind == BoolExpr::Kind::Or);
        out += " & ";
        child(e.args[1], e.args[1].kind == BoolExpr::Kind::Or || e.args[1].kind == BoolExpr::Kind::And);
        break;
    case BoolExpr::Kind::Or:
        child(e.args[0], false);
        out += " | ";
        child(e.args[1], e.args[1].kind == BoolExpr::Kind::Or);
        break;
    }
}

template <class Names>
std::string join(const Names& names, std::string_view sep = ", ") {
    std::string out;
    for (const auto& n : names) {
        if (!out.empty()) out += sep;
        out += n;
    }
    return out;
}

} // namespace detail

// ── Printing ────────────────────────────────────────────────────────────────

inline std::string to_string(const BoolExpr& e) {
    std::string out;
    detail::print_expr(e, out);
    return out;
}

/// Canonical text of a formula, e.g. `<<Controller>> G !(in1 & in2)`.
inline std::string to_string(const FormulaAst& f) {
    std::string out = "<<" + detail::join(f.coalition, ",") + ">> ";
    switch (f.op) {
    case TemporalOp::Next: out += "X " + to_string(f.body); break;
    case TemporalOp::Eventually: out += "F " + to_string(f.body); break;
    case TemporalOp::Always: out += "G " + to_string(f.body); break;
    case TemporalOp::Until: {
        // U binds weaker than the boolean connectives, so operands print bare.
        out += to_string(f.lhs) + " U " + to_string(f.body);
        break;
    }
    }
    return out;
}

inline std::string to_string(const SpecDocument& doc) {
    std::string out;
    for (const auto& agent : doc.agents) {
        out += "AGENT " + agent.name + ":\n";
        if (!agent.init.empty()) out += "  INIT: " + agent.init + "\n";
        for (const auto& t : agent.transitions) {
            out += "  " + t.src + " -> " + t.dst + " : " + t.action;
            if (!t.effects.empty()) {
                out += " [SET ";
                for (std::size_t i = 0; i < t.effects.size(); ++i) {
                    if (i) out += ", ";
                    out += t.effects[i].prop + (t.effects[i].value ? "=true" : "=false");
                }
                out += "]";
            }
            out += "\n";
        }
    }
    if (!doc.propositions.empty()) out += "PROPOSITIONS: " + detail::join(doc.propositions) + "\n";
    if (!doc.persistent.empty()) out += "PERSISTENT: " + detail::join(doc.persistent) + "\n";
    if (!doc.coalition.empty() && (!doc.formula || doc.coalition != doc.formula->coalition)) {
        out += "COALITION: " + detail::join(doc.coalition) + "\n";
    }
    if (doc.formula) out += "FORMULA: " + to_string(*doc.formula) + "\n";
    return out;
}

// ── Parsing ─────────────────────────────────────────────────────────────────

/// Parses a standalone formula. Proposition names are not resolved here.
inline FormulaAst parse_formula(std::string_view text) {
    std::vector<detail::Token> tokens;
    for (auto& line : detail::tokenize(text)) {
        line.tokens.pop_back();
        for (auto& t : line.tokens) tokens.push_back(std::move(t));
    }
    SourcePos end_pos{1, 1};
    if (!tokens.empty()) end_pos = {tokens.back().pos.line, tokens.back().pos.column + tokens.back().text.size()};
    tokens.push_back({detail::Tok::End, "", end_pos});
    detail::Cursor cur(tokens);
    return detail::FormulaParser(cur).parse();
}

namespace detail {

inline void parse_transition(Cursor& cur, AgentDecl& agent) {
    TransitionDecl t;
    t.pos = cur.peek().pos;
    t.src = cur.expect(Tok::Ident).text;
    cur.expect(Tok::Arrow);
    t.dst = cur.expect(Tok::Ident).text;
    cur.expect(Tok::Colon);
    t.action = cur.expect(Tok::Ident, "expected action name").text;
    bool bracketed = cur.accept(Tok::LBracket);
    if (cur.at_word("SET")) {
        cur.next();
        do {
            EffectDecl e;
            e.pos = cur.peek().pos;
            e.prop = cur.expect(Tok::Ident, "expected proposition").text;
            cur.expect(Tok::Eq);
            const Token& v = cur.expect(Tok::Ident, "expected true or false");
            if (v.text != "true" && v.text != "false") {
                throw Error(ErrorKind::Syntax, "expected true or false", v.pos);
            }
            e.value = v.text == "true";
            t.effects.push_back(std::move(e));
        } while (cur.accept(Tok::Comma));
    } else if (bracketed) {
        cur.fail("expected SET");
    }
    if (bracketed) cur.expect(Tok::RBracket);
    cur.expect_end();
    for (const auto& name : {t.src, t.dst}) {
        if (std::find(agent.locals.begin(), agent.locals.end(), name) == agent.locals.end()) {
            agent.locals.push_back(name);
        }
    }
    agent.transitions.push_back(std::move(t));
}

inline void check_names(const SpecDocument& doc) {
    std::set<std::string> seen;
    for (const auto& a : doc.agents) {
        if (!seen.insert(a.name).second) {
            throw Error(ErrorKind::DuplicateDeclaration, "agent '" + a.name + "' declared twice", a.pos);
        }
        std::set<std::pair<std::string, std::string>> src_action;
        for (const auto& t : a.transitions) {
            if (!src_action.emplace(t.src, t.action).second) {
                throw Error(ErrorKind::DuplicateDeclaration,
                            "agent '" + a.name + "' has two transitions labelled '" + t.action + "' from '" + t.src +
                                "'",
                            t.pos);
            }
        }
    }
    std::set<std::string> props(doc.propositions.begin(), doc.propositions.end());
    auto pos_of = [&](const std::string& key) {
        auto it = doc.spans.find(key);
        return it == doc.spans.end() ? SourcePos{} : it->second;
    };
    for (const auto& a : doc.agents) {
        for (const auto& t : a.transitions) {
            for (const auto& e : t.effects) {
                if (!props.count(e.prop)) {
                    throw Error(ErrorKind::UnknownReference, "undeclared proposition '" + e.prop + "'", e.pos);
                }
            }
        }
    }
    std::set<std::string> persistent;
    for (const auto& p : doc.persistent) {
        if (!props.count(p)) {
            throw Error(ErrorKind::UnknownReference, "persistent '" + p + "' is not a declared proposition",
                        pos_of("PERSISTENT"));
        }
        if (!persistent.insert(p).second) {
            throw Error(ErrorKind::DuplicateDeclaration, "persistent '" + p + "' listed twice", pos_of("PERSISTENT"));
        }
    }
    auto check_coalition = [&](const std::vector<std::string>& names, SourcePos pos) {
        std::set<std::string> members;
        for (const auto& n : names) {
            if (!doc.agent_index(n)) throw Error(ErrorKind::UnknownReference, "unknown agent '" + n + "'", pos);
            if (!members.insert(n).second) {
                throw Error(ErrorKind::DuplicateDeclaration, "agent '" + n + "' listed twice in coalition", pos);
            }
        }
    };
    check_coalition(doc.coalition, pos_of(doc.spans.count("COALITION") ? "COALITION" : "FORMULA"));
    if (doc.formula) {
        check_coalition(doc.formula->coalition, pos_of("FORMULA"));
        std::vector<const BoolExpr*> used;
        collect_props(doc.formula->body, used);
        if (doc.formula->op == TemporalOp::Until) collect_props(doc.formula->lhs, used);
        for (const auto* e : used) {
            if (!props.count(e->prop)) {
                throw Error(ErrorKind::UnknownReference, "undeclared proposition '" + e->prop + "' in formula",
                            pos_of("FORMULA"));
            }
        }
    }
}

} // namespace detail

/// Parses and resolves a specification. Throws Error with a source position.
inline SpecDocument parse_spec(std::string_view text) {
    using detail::Tok;
    SpecDocument doc;
    AgentDecl* current = nullptr;
    bool has_coalition_line = false;

    for (const auto& line : detail::tokenize(text)) {
        detail::Cursor cur(line.tokens);
        const detail::Token& head = cur.peek();
        auto once = [&](const std::string& key) {
            if (doc.spans.count(key)) {
                throw Error(ErrorKind::DuplicateDeclaration, key + " declared twice", head.pos);
            }
            doc.spans[key] = head.pos;
        };
        if (cur.at_word("AGENT")) {
            cur.next();
            AgentDecl agent;
            agent.pos = head.pos;
            agent.name = cur.expect(Tok::Ident, "expected agent name").text;
            cur.expect(Tok::Colon);
            cur.expect_end();
            doc.agents.push_back(std::move(agent));
            current = &doc.agents.back();
            continue;
        }
        if (doc.agents.empty()) cur.fail("expected AGENT");
        if (cur.at_word("INIT") && cur.peek(1).kind == Tok::Colon) {
            if (!current) cur.fail("INIT outside an AGENT block");
            if (!current->init.empty()) {
                throw Error(ErrorKind::DuplicateDeclaration, "INIT declared twice for '" + current->name + "'",
                            head.pos);
            }
            if (!current->transitions.empty()) cur.fail("INIT must precede the transitions");
            cur.next();
            cur.next();
            current->init = cur.expect(Tok::Ident, "expected local state").text;
            cur.expect_end();
            current->locals.push_back(current->init);
            continue;
        }
        if (cur.at_word("PROPOSITIONS") || cur.at_word("PERSISTENT") || cur.at_word("COALITION") ||
            cur.at_word("FORMULA")) {
            if (cur.peek(1).kind == Tok::Colon) {
                const std::string key = head.text;
                once(key);
                current = nullptr;
                cur.next();
                cur.next();
                if (key == "FORMULA") {
                    doc.formula = detail::FormulaParser(cur).parse();
                } else {
                    auto names = detail::identifier_list(cur, key != "COALITION");
                    for (const auto& n : names) {
                        if (key == "PROPOSITIONS") {
                            if (detail::is_reserved_prop(n.text)) {
                                throw Error(ErrorKind::Syntax, "'" + n.text + "' is reserved", n.pos);
                            }
                            if (doc.spans.count("prop:" + n.text)) {
                                throw Error(ErrorKind::DuplicateDeclaration,
                                            "proposition '" + n.text + "' declared twice", n.pos);
                            }
                            doc.spans["prop:" + n.text] = n.pos;
                            doc.propositions.push_back(n.text);
                        } else if (key == "PERSISTENT") {
                            doc.persistent.push_back(n.text);
                        } else {
                            doc.coalition.push_back(n.text);
                        }
                    }
                    if (key == "COALITION") has_coalition_line = true;
                }
                continue;
            }
        }
        if (cur.at(Tok::Ident) && cur.peek(1).kind == Tok::Arrow) {
            if (!current) cur.fail("transition outside an AGENT block");
            if (current->init.empty()) {
                throw Error(ErrorKind::Syntax, "expected INIT before transitions of '" + current->name + "'",
                            head.pos);
            }
            detail::parse_transition(cur, *current);
            continue;
        }
        cur.fail(current ? "expected INIT, transition or section keyword" : "expected AGENT or section keyword");
    }
    if (doc.agents.empty()) {
        std::size_t lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) + 1;
        throw Error(ErrorKind::Syntax, "expected AGENT", {lines, 1});
    }
    if (!has_coalition_line && doc.formula) doc.coalition = doc.formula->coalition;
    detail::check_names(doc);
    return doc;
}

/// Parses a relation file against the two model documents it relates. Each
/// non-blank line is `(l1,...,ln) ~ (r1,...,rm)`; an optional
/// `COALITION: a, b` line names the coalition.
inline RelationSpec parse_relation(std::string_view text, const SpecDocument& left, const SpecDocument& right) {
    using detail::Tok;
    RelationSpec rel;
    auto tuple = [](detail::Cursor& cur, const SpecDocument& doc, std::string_view side) {
        std::vector<std::size_t> out;
        const SourcePos open = cur.expect(Tok::LParen).pos;
        std::vector<detail::Token> names;
        names.push_back(cur.expect(Tok::Ident, "expected local state"));
        while (cur.accept(Tok::Comma)) names.push_back(cur.expect(Tok::Ident, "expected local state"));
        cur.expect(Tok::RParen);
        if (names.size() != doc.agents.size()) {
            throw Error(ErrorKind::ArityMismatch,
                        std::string(side) + " tuple has " + std::to_string(names.size()) + " components, model has " +
                            std::to_string(doc.agents.size()) + " agents",
                        open);
        }
        for (std::size_t i = 0; i < names.size(); ++i) {
            auto idx = doc.agents[i].local_index(names[i].text);
            if (!idx) {
                throw Error(ErrorKind::UnknownLocalState,
                            "agent '" + doc.agents[i].name + "' has no local state '" + names[i].text + "'",
                            names[i].pos);
            }
            out.push_back(*idx);
        }
        return out;
    };
    bool seen_coalition = false;
    for (const auto& line : detail::tokenize(text)) {
        detail::Cursor cur(line.tokens);
        if (cur.at_word("COALITION") && cur.peek(1).kind == Tok::Colon) {
            if (seen_coalition) {
                throw Error(ErrorKind::DuplicateDeclaration, "COALITION declared twice", cur.peek().pos);
            }
            seen_coalition = true;
            const SourcePos pos = cur.peek().pos;
            cur.next();
            cur.next();
            for (const auto& n : detail::identifier_list(cur, false)) {
                if (!left.agent_index(n.text)) {
                    throw Error(ErrorKind::UnknownReference, "unknown agent '" + n.text + "'", n.pos);
                }
                rel.coalition.push_back(n.text);
            }
            (void)pos;
            continue;
        }
        DescriptorPair pair;
        pair.pos = cur.peek().pos;
        pair.left = tuple(cur, left, "left");
        cur.expect(Tok::Tilde);
        pair.right = tuple(cur, right, "right");
        cur.expect_end();
        rel.pairs.push_back(std::move(pair));
    }
    return rel;
}

} // namespace stratcheck
