#pragma once

// Checking a user-supplied relation between two global models for being an
// A-bisimulation. Agents correspond by position: coalition member i of the
// left model is agent i of the right model.
//
// For every related pair (q, q') in the direction being checked:
//   valuation  q and q' agree on every proposition both models declare;
//   epistemic  for each member a, every state a confuses with q' has a
//              partner among the states a confuses with q;
//   strategic  every joint choice at q is answered by a joint choice at q'
//              whose every outcome is related to some outcome of the choice
//              at q.
// The full check runs left-to-right and then right-to-left on the inverse.

#include "stratcheck/export.hpp"
#include "stratcheck/model.hpp"
#include "stratcheck/verify.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace stratcheck {

using StatePair = std::pair<StateId, StateId>;

struct CandidateRelation {
    std::vector<StatePair> pairs;    // (left state, right state), input order
    std::vector<AgentId> coalition;  // agent positions, valid in both models
};

enum class Condition { Valuation, Epistemic, Strategic, Initial };
enum class Direction { LeftToRight, RightToLeft };

inline std::string_view to_string(Condition c) {
    switch (c) {
    case Condition::Valuation: return "valuation";
    case Condition::Epistemic: return "epistemic";
    case Condition::Strategic: return "strategic";
    case Condition::Initial: return "initial";
    }
    return "?";
}

inline std::string_view to_string(Direction d) { return d == Direction::LeftToRight ? "L2R" : "R2L"; }

struct Violation {
    Condition condition;
    Direction direction;
    StatePair pair;  // always (left-model state, right-model state)
    std::string detail;
};

struct BisimVerdict {
    bool ok = true;
    std::optional<Violation> violation;
};

using JointChoice = std::vector<ActionId>;  // one action per coalition member

/// Cartesian product of the members' options at their local states in `s`.
inline std::vector<JointChoice> joint_choices(const GlobalModel& model, const std::vector<AgentId>& coalition,
                                              StateId s) {
    std::vector<JointChoice> out{{}};
    for (AgentId a : coalition) {
        std::vector<JointChoice> next;
        for (const auto& prefix : out) {
            for (ActionId act : member_options(*model.amas, a, model.local(s, a))) {
                next.push_back(prefix);
                next.back().push_back(act);
            }
        }
        out = std::move(next);
    }
    return out;
}

/// Global actions enabled at `s` that agree with `choice` for every
/// coalition owner. Empty means the stutter is the only consistent step.
inline std::vector<ActionId> consistent_actions(const GlobalModel& model, const std::vector<AgentId>& coalition,
                                                StateId s, const JointChoice& choice) {
    std::vector<ActionId> out;
    for (const Edge& e : model.out(s)) {
        bool ok = true;
        for (std::size_t i = 0; i < coalition.size() && ok; ++i) {
            if (model.amas->owns(coalition[i], e.action) && choice[i] != e.action) ok = false;
        }
        if (ok) out.push_back(e.action);
    }
    return out;
}

inline std::vector<StateId> choice_outcomes(const GlobalModel& model, const std::vector<AgentId>& coalition,
                                            StateId s, const JointChoice& choice) {
    return detail::consistent_successors(model, coalition, s,
                                         [&](std::size_t i, LocalId) { return choice[i]; });
}

namespace detail {

inline std::string describe_choice(const Amas& amas, const JointChoice& choice) {
    std::string out;
    for (ActionId a : choice) {
        if (!out.empty()) out += ',';
        out += amas.action_name(a);
    }
    return out;
}

class SimulationCheck {
public:
    SimulationCheck(const GlobalModel& from, const GlobalModel& to, const std::vector<StatePair>& pairs,
                    const std::vector<AgentId>& coalition)
        : from_(from), to_(to), pairs_(pairs), coalition_(coalition) {
        partners_.assign(from.size(), {});
        for (auto [p, q] : pairs) partners_[p].push_back(q);
        for (auto& v : partners_) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        }
        for (std::size_t i = 0; i < from.amas->propositions.size(); ++i) {
            if (auto j = to.amas->prop_index(from.amas->propositions[i])) common_.emplace_back(i, *j);
        }
    }

    [[nodiscard]] bool related(StateId p, StateId q) const {
        return std::binary_search(partners_[p].begin(), partners_[p].end(), q);
    }

    struct Failure {
        Condition condition;
        StatePair pair;  // (from state, to state)
        std::string detail;
    };

    std::optional<Failure> valuation(StateId q, StateId qq) const {
        for (auto [i, j] : common_) {
            if (from_.holds(q, i) != to_.holds(qq, j)) {
                return Failure{Condition::Valuation, {q, qq}, from_.amas->propositions[i]};
            }
        }
        return std::nullopt;
    }

    std::optional<Failure> epistemic(StateId q, StateId qq) const {
        for (AgentId a : coalition_) {
            const auto& mine = epistemic_class(from_, a, q);
            for (StateId rr : epistemic_class(to_, a, qq)) {
                bool matched = std::any_of(mine.begin(), mine.end(), [&](StateId r) { return related(r, rr); });
                if (!matched) {
                    return Failure{Condition::Epistemic, {q, qq},
                                   from_.amas->agents[a].name + ": " + describe_state(to_, rr)};
                }
            }
        }
        return std::nullopt;
    }

    /// Answers at q' valid for `choice` at q.
    std::vector<std::size_t> answers(StateId q, StateId qq, const JointChoice& choice,
                                     const std::vector<JointChoice>& replies) const {
        std::vector<std::size_t> out;
        const auto mine = choice_outcomes(from_, coalition_, q, choice);
        for (std::size_t k = 0; k < replies.size(); ++k) {
            const auto theirs = choice_outcomes(to_, coalition_, qq, replies[k]);
            bool ok = std::all_of(theirs.begin(), theirs.end(), [&](StateId tt) {
                return std::any_of(mine.begin(), mine.end(), [&](StateId t) { return related(t, tt); });
            });
            if (ok) out.push_back(k);
        }
        return out;
    }

    std::optional<Failure> strategic(StateId q, StateId qq) const {
        const auto replies = joint_choices(to_, coalition_, qq);
        for (const auto& choice : joint_choices(from_, coalition_, q)) {
            if (answers(q, qq, choice, replies).empty()) {
                return Failure{Condition::Strategic, {q, qq}, describe_choice(*from_.amas, choice)};
            }
        }
        return std::nullopt;
    }

    std::optional<Failure> run(bool strict) const {
        for (auto [q, qq] : pairs_) {
            if (auto f = valuation(q, qq)) return f;
            if (auto f = epistemic(q, qq)) return f;
            if (auto f = strategic(q, qq)) return f;
        }
        if (strict) return uniform();
        return std::nullopt;
    }

    /// Strict mode: pairs whose coalition local states coincide on both sides
    /// must share one answer per joint choice.
    std::optional<Failure> uniform() const {
        std::vector<std::pair<std::vector<LocalId>, std::vector<std::size_t>>> groups;
        auto key = [&](StateId q, StateId qq) {
            std::vector<LocalId> k;
            for (AgentId a : coalition_) k.push_back(from_.local(q, a));
            for (AgentId a : coalition_) k.push_back(to_.local(qq, a));
            return k;
        };
        for (std::size_t idx = 0; idx < pairs_.size(); ++idx) {
            auto k = key(pairs_[idx].first, pairs_[idx].second);
            auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == k; });
            if (it == groups.end()) {
                groups.push_back({std::move(k), {idx}});
            } else {
                it->second.push_back(idx);
            }
        }
        for (const auto& [k, members] : groups) {
            const auto [q0, qq0] = pairs_[members.front()];
            const auto replies = joint_choices(to_, coalition_, qq0);
            for (const auto& choice : joint_choices(from_, coalition_, q0)) {
                std::vector<std::size_t> common = answers(q0, qq0, choice, replies);
                for (std::size_t m = 1; m < members.size() && !common.empty(); ++m) {
                    auto [q, qq] = pairs_[members[m]];
                    auto mine = answers(q, qq, choice, replies);
                    std::vector<std::size_t> both;
                    std::set_intersection(common.begin(), common.end(), mine.begin(), mine.end(),
                                          std::back_inserter(both));
                    common = std::move(both);
                }
                if (common.empty()) {
                    return Failure{Condition::Strategic, {q0, qq0},
                                   "no uniform answer to " + describe_choice(*from_.amas, choice)};
                }
            }
        }
        return std::nullopt;
    }

private:
    const GlobalModel& from_;
    const GlobalModel& to_;
    const std::vector<StatePair>& pairs_;
    const std::vector<AgentId>& coalition_;
    std::vector<std::vector<StateId>> partners_;
    std::vector<std::pair<std::size_t, std::size_t>> common_;
};

inline void check_coalition_positions(const GlobalModel& left, const GlobalModel& right,
                                      const std::vector<AgentId>& coalition) {
    for (AgentId a : coalition) {
        if (a >= left.amas->agents.size() || a >= right.amas->agents.size()) {
            throw Error(ErrorKind::ArityMismatch,
                        "coalition position " + std::to_string(a) + " does not exist in both models");
        }
    }
}

} // namespace detail

/// One direction: does every pair satisfy the three conditions from `from`
/// towards `to`? Pairs are (from state, to state).
inline BisimVerdict check_simulation(const GlobalModel& from, const GlobalModel& to,
                                     const std::vector<StatePair>& pairs, const std::vector<AgentId>& coalition,
                                     bool strict = false) {
    detail::check_coalition_positions(from, to, coalition);
    detail::SimulationCheck check(from, to, pairs, coalition);
    BisimVerdict v;
    if (auto f = check.run(strict)) {
        v.ok = false;
        v.violation = Violation{f->condition, Direction::LeftToRight, f->pair, f->detail};
    }
    return v;
}

inline BisimVerdict check_a_bisimulation(const GlobalModel& left, const GlobalModel& right,
                                         const CandidateRelation& relation, bool strict = false) {
    BisimVerdict v;
    const StatePair init{left.initial, right.initial};
    if (std::find(relation.pairs.begin(), relation.pairs.end(), init) == relation.pairs.end()) {
        v.ok = false;
        v.violation = Violation{Condition::Initial, Direction::LeftToRight, init, "initial states are not related"};
        return v;
    }
    v = check_simulation(left, right, relation.pairs, relation.coalition, strict);
    if (!v.ok) return v;
    std::vector<StatePair> inverse;
    inverse.reserve(relation.pairs.size());
    for (auto [p, q] : relation.pairs) inverse.emplace_back(q, p);
    v = check_simulation(right, left, inverse, relation.coalition, strict);
    if (!v.ok) {
        v.violation->direction = Direction::RightToLeft;
        std::swap(v.violation->pair.first, v.violation->pair.second);
    }
    return v;
}

/// Expands descriptor pairs to every pair of reachable states with the
/// described local tuples (stores may differ). Input order, duplicates dropped.
inline std::vector<StatePair> expand_relation(const RelationSpec& spec, const GlobalModel& left,
                                              const GlobalModel& right) {
    auto matching = [](const GlobalModel& m, const std::vector<std::size_t>& tuple) {
        std::vector<StateId> out;
        for (StateId s = 0; s < m.size(); ++s) {
            const auto& locals = m.states[s].locals;
            if (std::equal(locals.begin(), locals.end(), tuple.begin(), tuple.end())) out.push_back(s);
        }
        return out;
    };
    std::vector<StatePair> out;
    std::set<StatePair> seen;
    for (const auto& d : spec.pairs) {
        for (StateId l : matching(left, d.left)) {
            for (StateId r : matching(right, d.right)) {
                if (seen.insert({l, r}).second) out.emplace_back(l, r);
            }
        }
    }
    return out;
}

/// Identity relation on the reachable states of a model.
inline CandidateRelation identity_relation(const GlobalModel& model, std::vector<AgentId> coalition) {
    CandidateRelation r;
    for (StateId s = 0; s < model.size(); ++s) r.pairs.emplace_back(s, s);
    r.coalition = std::move(coalition);
    return r;
}

inline Json verdict_to_json(const BisimVerdict& v, const GlobalModel& left, const GlobalModel& right) {
    if (v.ok) return Json{{"ok", true}};
    const Violation& x = *v.violation;
    return Json{{"ok", false},
                {"condition", std::string(to_string(x.condition))},
                {"direction", std::string(to_string(x.direction))},
                {"pair", {describe_state(left, x.pair.first), describe_state(right, x.pair.second)}},
                {"detail", x.detail}};
}

} // namespace stratcheck
