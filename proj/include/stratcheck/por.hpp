#pragma once

// Partial-order reduction with single-agent ample sets.
//
// At each state the reduction tries to explore the moves of one agent j
// outside the coalition instead of every interleaving. Agent j qualifies when
// every transition leaving its current local state is
//   - private (no other agent mentions the action),
//   - invisible (writes no visible proposition), and
//   - write-exclusive (no other agent ever writes the propositions it writes).
// Such moves commute with everything the other agents can do, and no move of
// another agent can enable a competing move of j. The cycle proviso (C3) is
// enforced during the depth-first construction.

#include "stratcheck/model.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace stratcheck {

enum class C3Mode { Safe, Aggressive };

inline std::string_view to_string(C3Mode m) { return m == C3Mode::Safe ? "safe" : "aggressive"; }

struct ReductionParams {
    std::vector<AgentId> coalition;  // ascending
    std::vector<bool> visible;       // per proposition
    C3Mode c3 = C3Mode::Safe;
};

/// Propositions read by a boolean expression.
inline void mark_props(const BoolExpr& e, std::vector<bool>& out) {
    if (e.kind == BoolExpr::Kind::Prop) out[static_cast<std::size_t>(e.prop_index)] = true;
    for (const auto& a : e.args) mark_props(a, out);
}

/// Default parameters: the formula's coalition (or the declared one) and the
/// formula's propositions plus the persistent ones as the visible set.
inline ReductionParams default_reduction_params(const Amas& amas, C3Mode c3 = C3Mode::Safe) {
    ReductionParams p;
    p.coalition = amas.coalition;
    p.visible.assign(amas.propositions.size(), false);
    if (amas.formula) {
        if (p.coalition.empty()) p.coalition = resolve_coalition(amas, amas.formula->coalition);
        mark_props(amas.formula->body, p.visible);
        if (amas.formula->op == TemporalOp::Until) mark_props(amas.formula->lhs, p.visible);
    }
    for (std::size_t i = 0; i < p.visible.size(); ++i) {
        if (amas.persistent[i]) p.visible[i] = true;
    }
    p.c3 = c3;
    return p;
}

/// Builds parameters from explicit names. Persistent propositions are always
/// added to the visible set.
inline ReductionParams make_reduction_params(const Amas& amas, const std::vector<std::string>& coalition,
                                             const std::vector<std::string>& visible, C3Mode c3) {
    ReductionParams p;
    p.coalition = resolve_coalition(amas, coalition);
    p.visible.assign(amas.propositions.size(), false);
    for (const auto& name : visible) {
        auto idx = amas.prop_index(name);
        if (!idx) throw Error(ErrorKind::UnknownReference, "undeclared proposition '" + name + "'");
        p.visible[*idx] = true;
    }
    for (std::size_t i = 0; i < p.visible.size(); ++i) {
        if (amas.persistent[i]) p.visible[i] = true;
    }
    p.c3 = c3;
    return p;
}

/// True iff no transition labelled `action`, in any owner, writes a visible
/// proposition.
inline bool invisible(const Amas& amas, ActionId action, const std::vector<bool>& visible) {
    if (action == kEpsilon) return true;
    for (AgentId o : amas.owners[action]) {
        for (const auto& t : amas.agents[o].transitions) {
            if (t.action != action) continue;
            for (const auto& e : t.effects) {
                if (visible[e.prop]) return false;
            }
        }
    }
    return true;
}

struct AmpleSet {
    std::vector<ActionId> actions;  // ascending
    bool fully_expanded = true;
};

/// Static facts about an AMAS the ample-set heuristic consults per state.
class AmpleOracle {
public:
    AmpleOracle(const Amas& amas, ReductionParams params) : amas_(amas), params_(std::move(params)) {
        writers_.assign(amas.propositions.size(), {});
        for (AgentId a = 0; a < amas.agents.size(); ++a) {
            for (const auto& t : amas.agents[a].transitions) {
                for (const auto& e : t.effects) writers_[e.prop].insert(a);
            }
        }
        // qualifies_[j][l]: every move of j out of l is private, invisible and write-exclusive.
        qualifies_.resize(amas.agents.size());
        for (AgentId j = 0; j < amas.agents.size(); ++j) {
            const Agent& agent = amas.agents[j];
            qualifies_[j].assign(agent.locals.size(), false);
            const bool in_coalition = std::binary_search(params_.coalition.begin(), params_.coalition.end(), j);
            if (in_coalition) continue;
            for (LocalId l = 0; l < agent.locals.size(); ++l) {
                if (agent.outgoing[l].empty()) continue;
                bool ok = true;
                for (std::size_t idx : agent.outgoing[l]) {
                    const auto& t = agent.transitions[idx];
                    if (amas.owners[t.action].size() != 1 || !invisible(amas, t.action, params_.visible)) {
                        ok = false;
                        break;
                    }
                    for (const auto& e : t.effects) {
                        if (writers_[e.prop].size() != 1) ok = false;
                    }
                }
                qualifies_[j][l] = ok;
            }
        }
    }

    [[nodiscard]] const ReductionParams& params() const { return params_; }

    /// Ample set at `state`: all moves of the first qualifying non-coalition
    /// agent, else every enabled action.
    [[nodiscard]] AmpleSet candidate(const GlobalState& state) const {
        for (AgentId j = 0; j < amas_.agents.size(); ++j) {
            if (!qualifies_[j][state.locals[j]]) continue;
            AmpleSet out;
            out.fully_expanded = false;
            for (std::size_t idx : amas_.agents[j].outgoing[state.locals[j]]) {
                out.actions.push_back(amas_.agents[j].transitions[idx].action);
            }
            std::sort(out.actions.begin(), out.actions.end());
            // Private moves are always enabled, so this is never the full set
            // unless j is the only agent able to move.
            if (out.actions == enabled_global_actions(amas_, state)) out.fully_expanded = true;
            return out;
        }
        return {enabled_global_actions(amas_, state), true};
    }

private:
    const Amas& amas_;
    ReductionParams params_;
    std::vector<std::set<AgentId>> writers_;
    std::vector<std::vector<bool>> qualifies_;
};

inline AmpleSet ample_candidate(const Amas& amas, const GlobalState& state, const ReductionParams& params) {
    return AmpleOracle(amas, params).candidate(state);
}

struct ReducedModel {
    GlobalModel model;                        // own numbering: DFS discovery order
    std::vector<std::vector<ActionId>> ample;  // per reduced state, the actions expanded
    std::vector<bool> fully_expanded;         // per reduced state
    ReductionParams params;
};

/// Depth-first construction expanding only ample sets. With C3Mode::Safe a
/// state whose ample set reaches a state on the DFS stack is fully expanded;
/// with C3Mode::Aggressive only if that stack segment holds no fully expanded
/// state yet.
inline ReducedModel build_reduced_model(std::shared_ptr<const Amas> amas, const ReductionParams& params,
                                        std::size_t state_limit = kDefaultStateLimit) {
    const AmpleOracle oracle(*amas, params);
    ModelBuilder builder(amas, state_limit);
    ReducedModel out;
    out.params = params;

    std::vector<bool> on_stack;
    std::vector<bool> expanded;
    std::vector<std::size_t> stack_pos;

    struct Frame {
        StateId state;
        std::vector<StateId> children;
        std::size_t next = 0;
    };
    std::vector<Frame> stack;

    auto grow = [&](StateId id) {
        if (on_stack.size() <= id) {
            on_stack.resize(id + 1, false);
            expanded.resize(id + 1, false);
            stack_pos.resize(id + 1, 0);
            out.ample.resize(id + 1);
            out.fully_expanded.resize(id + 1, false);
        }
    };

    auto expand = [&](StateId s) {
        const GlobalState current = builder.state(s);
        AmpleSet ample = oracle.candidate(current);
        on_stack[s] = true;
        stack_pos[s] = stack.size();
        if (!ample.fully_expanded) {
            bool reexpand = false;
            for (ActionId act : ample.actions) {
                auto hit = builder.find(apply_action(*amas, current, act));
                if (!hit || !on_stack[*hit]) continue;
                if (params.c3 == C3Mode::Safe) {
                    reexpand = true;
                } else {
                    bool segment_has_full = false;
                    for (std::size_t i = stack_pos[*hit]; i < stack.size(); ++i) {
                        if (out.fully_expanded[stack[i].state]) segment_has_full = true;
                    }
                    reexpand = !segment_has_full;
                }
                if (reexpand) break;
            }
            if (reexpand) ample = {enabled_global_actions(*amas, current), true};
        }
        out.ample[s] = ample.actions;
        out.fully_expanded[s] = ample.fully_expanded;
        expanded[s] = true;
        Frame frame{s, {}, 0};
        for (ActionId act : ample.actions) {
            auto [dst, fresh] = builder.add_state(apply_action(*amas, current, act));
            grow(dst);
            builder.add_edge(s, act, dst);
            frame.children.push_back(dst);
        }
        stack.push_back(std::move(frame));
    };

    auto [init, _] = builder.add_state(initial_state(*amas));
    grow(init);
    expand(init);
    while (!stack.empty()) {
        Frame& top = stack.back();
        if (top.next < top.children.size()) {
            StateId child = top.children[top.next++];
            if (!expanded[child]) expand(child);
            continue;
        }
        on_stack[top.state] = false;
        stack.pop_back();
    }
    out.model = std::move(builder).finish(init);
    return out;
}

inline ReducedModel build_reduced_model(const Amas& amas, const ReductionParams& params,
                                        std::size_t state_limit = kDefaultStateLimit) {
    return build_reduced_model(std::make_shared<const Amas>(amas), params, state_limit);
}

/// Copy of `full` with the reduced submodel's states and edges flagged.
inline GlobalModel mark_reduced(GlobalModel full, const ReducedModel& reduced) {
    full.state_reduced.assign(full.size(), false);
    full.edge_reduced.assign(full.edges.size(), false);
    std::set<std::tuple<StateId, ActionId, StateId>> edges;
    for (const auto& e : reduced.model.edges) {
        auto src = full.find(reduced.model.states[e.src]);
        auto dst = full.find(reduced.model.states[e.dst]);
        if (src && dst) edges.emplace(*src, e.action, *dst);
    }
    for (const auto& s : reduced.model.states) {
        if (auto id = full.find(s)) full.state_reduced[*id] = true;
    }
    for (std::size_t i = 0; i < full.edges.size(); ++i) {
        const Edge& e = full.edges[i];
        full.edge_reduced[i] = edges.count({e.src, e.action, e.dst}) > 0;
    }
    return full;
}

struct ReductionStats {
    std::size_t full_states = 0;
    std::size_t full_edges = 0;
    std::size_t reduced_states = 0;
    std::size_t reduced_edges = 0;
    C3Mode mode = C3Mode::Safe;
    double wall_ms = 0.0;

    [[nodiscard]] double ratio() const {
        return full_states == 0 ? 1.0 : static_cast<double>(reduced_states) / static_cast<double>(full_states);
    }
};

} // namespace stratcheck
