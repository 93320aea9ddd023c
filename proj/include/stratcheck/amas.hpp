#pragma once

#include "stratcheck/error.hpp"
#include "stratcheck/spec_lang.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stratcheck {

using AgentId = std::uint32_t;
using LocalId = std::uint32_t;
using ActionId = std::uint32_t;
using PropId = std::uint32_t;

/// Reserved stutter action taken at deadlocks.
inline constexpr ActionId kEpsilon = std::numeric_limits<ActionId>::max();
inline constexpr std::string_view kEpsilonName = "ε";

struct Effect {
    PropId prop;
    bool value;

    friend bool operator==(const Effect&, const Effect&) = default;
};

struct LocalTransition {
    LocalId src;
    LocalId dst;
    ActionId action;
    std::vector<Effect> effects;
};

struct Agent {
    std::string name;
    std::vector<std::string> locals;
    LocalId init = 0;
    std::vector<LocalTransition> transitions;
    /// Per local state, indices into `transitions` in declaration order.
    std::vector<std::vector<std::size_t>> outgoing;

    /// The transition this agent fires for `action` from `local`, if any.
    [[nodiscard]] const LocalTransition* find(LocalId local, ActionId action) const {
        for (std::size_t idx : outgoing[local]) {
            if (transitions[idx].action == action) return &transitions[idx];
        }
        return nullptr;
    }
    [[nodiscard]] std::optional<LocalId> local_index(std::string_view name) const {
        auto it = std::find(locals.begin(), locals.end(), name);
        if (it == locals.end()) return std::nullopt;
        return static_cast<LocalId>(it - locals.begin());
    }
};

/// A validated asynchronous multi-agent system: one local automaton per
/// agent, synchronising on shared action names. Immutable once built.
struct Amas {
    std::vector<Agent> agents;
    std::vector<std::string> actions;       // first-appearance order over the text
    std::vector<std::vector<AgentId>> owners;  // per action, ascending agent ids
    std::vector<std::string> propositions;
    std::vector<bool> persistent;            // per proposition
    std::vector<AgentId> coalition;          // ascending agent ids
    std::optional<FormulaAst> formula;       // prop_index fields resolved

    [[nodiscard]] std::optional<AgentId> agent_index(std::string_view name) const {
        for (std::size_t i = 0; i < agents.size(); ++i) {
            if (agents[i].name == name) return static_cast<AgentId>(i);
        }
        return std::nullopt;
    }
    [[nodiscard]] std::optional<ActionId> action_index(std::string_view name) const {
        auto it = std::find(actions.begin(), actions.end(), name);
        if (it == actions.end()) return std::nullopt;
        return static_cast<ActionId>(it - actions.begin());
    }
    [[nodiscard]] std::optional<PropId> prop_index(std::string_view name) const {
        auto it = std::find(propositions.begin(), propositions.end(), name);
        if (it == propositions.end()) return std::nullopt;
        return static_cast<PropId>(it - propositions.begin());
    }
    [[nodiscard]] std::string_view action_name(ActionId a) const {
        return a == kEpsilon ? kEpsilonName : std::string_view(actions[a]);
    }
    [[nodiscard]] bool owns(AgentId agent, ActionId action) const {
        if (action == kEpsilon) return false;
        const auto& o = owners[action];
        return std::binary_search(o.begin(), o.end(), agent);
    }
    /// Actions labelling the outgoing transitions of `local`, declaration order.
    [[nodiscard]] std::vector<ActionId> local_actions(AgentId agent, LocalId local) const {
        std::vector<ActionId> out;
        for (std::size_t idx : agents[agent].outgoing[local]) out.push_back(agents[agent].transitions[idx].action);
        return out;
    }
};

/// Resolves proposition names in `e` against `props`. Unknown names throw.
inline void resolve_props(BoolExpr& e, const std::vector<std::string>& props) {
    if (e.kind == BoolExpr::Kind::Prop) {
        auto it = std::find(props.begin(), props.end(), e.prop);
        if (it == props.end()) throw Error(ErrorKind::UnknownReference, "undeclared proposition '" + e.prop + "'");
        e.prop_index = static_cast<int>(it - props.begin());
    }
    for (auto& a : e.args) resolve_props(a, props);
}

inline std::vector<AgentId> resolve_coalition(const Amas& amas, const std::vector<std::string>& names) {
    std::vector<AgentId> ids;
    for (const auto& n : names) {
        auto id = amas.agent_index(n);
        if (!id) throw Error(ErrorKind::UnknownReference, "unknown agent '" + n + "'");
        ids.push_back(*id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

/// Binds a separately parsed formula to `amas`.
inline FormulaAst resolve_formula(const Amas& amas, FormulaAst f) {
    resolve_coalition(amas, f.coalition);
    resolve_props(f.body, amas.propositions);
    resolve_props(f.lhs, amas.propositions);
    return f;
}

/// Builds the immutable AMAS from a parsed document.
inline Amas validate(const SpecDocument& doc) {
    Amas amas;
    amas.propositions = doc.propositions;
    amas.persistent.assign(doc.propositions.size(), false);
    for (const auto& p : doc.persistent) {
        auto idx = amas.prop_index(p);
        if (!idx) throw Error(ErrorKind::UnknownReference, "persistent '" + p + "' is not a declared proposition");
        amas.persistent[*idx] = true;
    }
    std::map<std::string, ActionId> action_ids;
    for (const auto& decl : doc.agents) {
        if (decl.locals.empty()) {
            throw Error(ErrorKind::EmptyAgent, "agent '" + decl.name + "' has no local states", decl.pos);
        }
        Agent agent;
        agent.name = decl.name;
        agent.locals = decl.locals;
        agent.init = static_cast<LocalId>(*decl.local_index(decl.init));
        agent.outgoing.resize(agent.locals.size());
        for (const auto& t : decl.transitions) {
            LocalTransition lt;
            lt.src = static_cast<LocalId>(*decl.local_index(t.src));
            lt.dst = static_cast<LocalId>(*decl.local_index(t.dst));
            auto [it, fresh] = action_ids.emplace(t.action, static_cast<ActionId>(amas.actions.size()));
            if (fresh) amas.actions.push_back(t.action);
            lt.action = it->second;
            for (const auto& e : t.effects) {
                auto p = amas.prop_index(e.prop);
                if (!p) throw Error(ErrorKind::UnknownReference, "undeclared proposition '" + e.prop + "'", e.pos);
                if (!e.value && amas.persistent[*p]) {
                    throw Error(ErrorKind::PersistentCleared,
                                "transition '" + t.action + "' sets persistent proposition '" + e.prop + "' to false",
                                e.pos);
                }
                lt.effects.push_back({*p, e.value});
            }
            agent.outgoing[lt.src].push_back(agent.transitions.size());
            agent.transitions.push_back(std::move(lt));
        }
        amas.agents.push_back(std::move(agent));
    }
    amas.owners.resize(amas.actions.size());
    for (AgentId a = 0; a < amas.agents.size(); ++a) {
        for (const auto& t : amas.agents[a].transitions) {
            auto& o = amas.owners[t.action];
            if (o.empty() || o.back() != a) o.push_back(a);
        }
    }
    if (doc.formula) {
        amas.formula = doc.formula;
        resolve_props(amas.formula->body, amas.propositions);
        if (amas.formula->op == TemporalOp::Until) resolve_props(amas.formula->lhs, amas.propositions);
    }
    amas.coalition = resolve_coalition(amas, doc.coalition);
    return amas;
}

inline Amas load_amas(std::string_view text) { return validate(parse_spec(text)); }

} // namespace stratcheck
