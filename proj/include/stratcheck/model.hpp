#pragma once

#include "stratcheck/amas.hpp"
#include "stratcheck/error.hpp"

#include <algorithm>
#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace stratcheck {

using StateId = std::uint32_t;

struct GlobalState {
    std::vector<LocalId> locals;  // one per agent, agent declaration order
    std::vector<bool> store;      // one per proposition

    friend bool operator==(const GlobalState&, const GlobalState&) = default;
};

struct GlobalStateHash {
    std::size_t operator()(const GlobalState& s) const noexcept {
        std::size_t h = 0xcbf29ce484222325ULL;
        auto mix = [&h](std::size_t v) { h = (h ^ v) * 0x100000001b3ULL; };
        for (LocalId l : s.locals) mix(l);
        mix(std::hash<std::vector<bool>>{}(s.store));
        return h;
    }
};

struct Edge {
    StateId src;
    ActionId action;
    StateId dst;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Explicit reachable state graph of an AMAS. Every state has at least one
/// outgoing edge; deadlocks carry a single ε self-loop.
struct GlobalModel {
    std::shared_ptr<const Amas> amas;
    std::vector<GlobalState> states;
    std::unordered_map<GlobalState, StateId, GlobalStateHash> index;
    StateId initial = 0;
    std::vector<Edge> edges;               // grouped by src, ascending
    std::vector<std::size_t> edge_offset;  // edges of s are [edge_offset[s], edge_offset[s+1])
    /// partition[agent][local] = ascending ids of states where `agent` is in `local`.
    std::vector<std::vector<std::vector<StateId>>> partition;
    /// Highlight flags for the reduced submodel; empty when not marked.
    std::vector<bool> state_reduced;
    std::vector<bool> edge_reduced;

    [[nodiscard]] std::size_t size() const { return states.size(); }
    [[nodiscard]] std::span<const Edge> out(StateId s) const {
        return {edges.data() + edge_offset[s], edges.data() + edge_offset[s + 1]};
    }
    [[nodiscard]] std::optional<StateId> find(const GlobalState& s) const {
        auto it = index.find(s);
        if (it == index.end()) return std::nullopt;
        return it->second;
    }
    [[nodiscard]] LocalId local(StateId s, AgentId agent) const { return states[s].locals[agent]; }
    [[nodiscard]] bool holds(StateId s, PropId p) const { return states[s].store[p]; }
    [[nodiscard]] bool marked() const { return !state_reduced.empty(); }
};

inline GlobalState initial_state(const Amas& amas) {
    GlobalState s;
    for (const auto& a : amas.agents) s.locals.push_back(a.init);
    s.store.assign(amas.propositions.size(), false);
    return s;
}

/// Global actions enabled at `state`, ascending action id; {ε} at a deadlock.
inline std::vector<ActionId> enabled_global_actions(const Amas& amas, const GlobalState& state) {
    std::vector<ActionId> out;
    for (AgentId a = 0; a < amas.agents.size(); ++a) {
        const Agent& agent = amas.agents[a];
        for (std::size_t idx : agent.outgoing[state.locals[a]]) {
            ActionId act = agent.transitions[idx].action;
            // Each shared action is examined once, from its first owner.
            if (amas.owners[act].front() != a) continue;
            bool all_ready = std::all_of(amas.owners[act].begin(), amas.owners[act].end(), [&](AgentId o) {
                return amas.agents[o].find(state.locals[o], act) != nullptr;
            });
            if (all_ready) out.push_back(act);
        }
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) out.push_back(kEpsilon);
    return out;
}

/// Fires `action`: every owner follows its transition, effects are applied in
/// agent declaration order, non-owners stay put. ε leaves the state as is.
inline GlobalState apply_action(const Amas& amas, const GlobalState& state, ActionId action) {
    if (action == kEpsilon) {
        auto enabled = enabled_global_actions(amas, state);
        if (enabled.front() != kEpsilon) {
            throw Error(ErrorKind::NotEnabled, "stutter step taken at a state with enabled actions");
        }
        return state;
    }
    if (action >= amas.actions.size()) throw Error(ErrorKind::NotEnabled, "unknown action");
    GlobalState next = state;
    for (AgentId o : amas.owners[action]) {
        const LocalTransition* t = amas.agents[o].find(state.locals[o], action);
        if (!t) {
            throw Error(ErrorKind::NotEnabled, "action '" + amas.actions[action] + "' is not enabled: agent '" +
                                                   amas.agents[o].name + "' cannot take it");
        }
        next.locals[o] = t->dst;
        for (const auto& e : t->effects) next.store[e.prop] = e.value;
    }
    return next;
}

/// Incremental construction shared by the full and the reduced model.
class ModelBuilder {
public:
    ModelBuilder(std::shared_ptr<const Amas> amas, std::size_t state_limit)
        : state_limit_(state_limit) {
        model_.amas = std::move(amas);
    }

    /// Returns the id of `s` and whether it was newly added.
    std::pair<StateId, bool> add_state(GlobalState s) {
        auto it = model_.index.find(s);
        if (it != model_.index.end()) return {it->second, false};
        if (model_.states.size() >= state_limit_) {
            throw Error(ErrorKind::StateLimitExceeded,
                        "more than " + std::to_string(state_limit_) + " reachable states");
        }
        auto id = static_cast<StateId>(model_.states.size());
        model_.index.emplace(s, id);
        model_.states.push_back(std::move(s));
        return {id, true};
    }
    void add_edge(StateId src, ActionId action, StateId dst) { model_.edges.push_back({src, action, dst}); }
    [[nodiscard]] const GlobalState& state(StateId id) const { return model_.states[id]; }
    [[nodiscard]] std::optional<StateId> find(const GlobalState& s) const { return model_.find(s); }
    [[nodiscard]] std::size_t size() const { return model_.states.size(); }

    GlobalModel finish(StateId initial) && {
        model_.initial = initial;
        std::stable_sort(model_.edges.begin(), model_.edges.end(),
                         [](const Edge& a, const Edge& b) { return a.src < b.src; });
        model_.edge_offset.assign(model_.states.size() + 1, 0);
        for (const auto& e : model_.edges) ++model_.edge_offset[e.src + 1];
        for (std::size_t i = 1; i < model_.edge_offset.size(); ++i) {
            model_.edge_offset[i] += model_.edge_offset[i - 1];
        }
        const Amas& amas = *model_.amas;
        model_.partition.assign(amas.agents.size(), {});
        for (AgentId a = 0; a < amas.agents.size(); ++a) {
            model_.partition[a].assign(amas.agents[a].locals.size(), {});
            for (StateId s = 0; s < model_.states.size(); ++s) {
                model_.partition[a][model_.states[s].locals[a]].push_back(s);
            }
        }
        return std::move(model_);
    }

private:
    GlobalModel model_;
    std::size_t state_limit_;
};

inline constexpr std::size_t kDefaultStateLimit = 1'000'000;

/// Breadth-first closure from the initial state. States are numbered in
/// discovery order, successors explored in action declaration order.
inline GlobalModel build_global_model(std::shared_ptr<const Amas> amas,
                                      std::size_t state_limit = kDefaultStateLimit) {
    ModelBuilder builder(amas, state_limit);
    auto [init, _] = builder.add_state(initial_state(*amas));
    std::deque<StateId> frontier{init};
    while (!frontier.empty()) {
        StateId s = frontier.front();
        frontier.pop_front();
        const GlobalState current = builder.state(s);
        for (ActionId act : enabled_global_actions(*amas, current)) {
            auto [dst, fresh] = builder.add_state(apply_action(*amas, current, act));
            builder.add_edge(s, act, dst);
            if (fresh) frontier.push_back(dst);
        }
    }
    return std::move(builder).finish(init);
}

inline GlobalModel build_global_model(const Amas& amas, std::size_t state_limit = kDefaultStateLimit) {
    return build_global_model(std::make_shared<const Amas>(amas), state_limit);
}

/// States `agent` cannot distinguish from `s`: same local state of `agent`.
inline const std::vector<StateId>& epistemic_class(const GlobalModel& model, AgentId agent, StateId s) {
    return model.partition[agent][model.local(s, agent)];
}

/// Union over coalition members of their epistemic classes of `s`
/// (one-step "somebody in the coalition is uncertain"). Ascending ids.
inline std::vector<StateId> coalition_neighborhood(const GlobalModel& model, std::span<const AgentId> coalition,
                                                   StateId s) {
    if (coalition.empty()) return {s};
    std::vector<StateId> out;
    for (AgentId a : coalition) {
        const auto& cls = epistemic_class(model, a, s);
        out.insert(out.end(), cls.begin(), cls.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// "G,W,W": local state names in agent order.
inline std::string describe_locals(const Amas& amas, const GlobalState& s) {
    std::string out;
    for (std::size_t a = 0; a < s.locals.size(); ++a) {
        if (a) out += ',';
        out += amas.agents[a].locals[s.locals[a]];
    }
    return out;
}

inline std::string describe_state(const GlobalModel& model, StateId s) {
    return "(" + describe_locals(*model.amas, model.states[s]) + ")";
}

inline std::vector<std::string> true_props(const Amas& amas, const GlobalState& s) {
    std::vector<std::string> out;
    for (PropId p = 0; p < s.store.size(); ++p) {
        if (s.store[p]) out.push_back(amas.propositions[p]);
    }
    return out;
}

/// Evaluates a resolved boolean expression on the store of `s`.
inline bool eval(const BoolExpr& e, const GlobalState& s) {
    switch (e.kind) {
    case BoolExpr::Kind::True: return true;
    case BoolExpr::Kind::False: return false;
    case BoolExpr::Kind::Prop: return s.store[static_cast<std::size_t>(e.prop_index)];
    case BoolExpr::Kind::Not: return !eval(e.args[0], s);
    case BoolExpr::Kind::And: return eval(e.args[0], s) && eval(e.args[1], s);
    case BoolExpr::Kind::Or: return eval(e.args[0], s) || eval(e.args[1], s);
    }
    return false;
}

} // namespace stratcheck
