#pragma once

// Deciding <<A>> objectives under uniform memoryless (ir) strategies.
//
// A strategy fixes, for every coalition member and every one of its local
// states, one action of that local state. Its outcome is every infinite path
// of the pruned model, starting anywhere in the coalition neighbourhood of the
// initial state; the environment resolves all interleaving.

#include "stratcheck/export.hpp"
#include "stratcheck/model.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace stratcheck {

struct Strategy {
    std::vector<AgentId> members;                // ascending
    std::vector<std::vector<ActionId>> choice;   // choice[i][local] for members[i]; kEpsilon if no moves

    [[nodiscard]] ActionId at(std::size_t member, LocalId local) const { return choice[member][local]; }

    friend bool operator==(const Strategy&, const Strategy&) = default;
};

/// {"Controller":{"G":"a1","R":"a2"}}: members and local states in
/// declaration order.
inline Json strategy_to_json(const Amas& amas, const Strategy& s) {
    Json out = Json::object();
    for (std::size_t i = 0; i < s.members.size(); ++i) {
        const Agent& agent = amas.agents[s.members[i]];
        Json row = Json::object();
        for (LocalId l = 0; l < agent.locals.size(); ++l) row[agent.locals[l]] = std::string(amas.action_name(s.at(i, l)));
        out[agent.name] = std::move(row);
    }
    return out;
}

/// Actions a member may pick at `local`: its outgoing labels, or {ε}.
inline std::vector<ActionId> member_options(const Amas& amas, AgentId agent, LocalId local) {
    auto out = amas.local_actions(agent, local);
    if (out.empty()) out.push_back(kEpsilon);
    return out;
}

enum class Truth { True, False, Inconclusive };
enum class Method { Bruteforce, Fixpoint, Dfs };

inline std::string_view to_string(Truth t) {
    switch (t) {
    case Truth::True: return "true";
    case Truth::False: return "false";
    case Truth::Inconclusive: return "inconclusive";
    }
    return "?";
}

inline std::string_view to_string(Method m) {
    switch (m) {
    case Method::Bruteforce: return "bruteforce";
    case Method::Fixpoint: return "approx";
    case Method::Dfs: return "dfs";
    }
    return "?";
}

struct VerificationStats {
    std::size_t states = 0;
    std::size_t strategies_examined = 0;
    std::size_t nodes = 0;          // dfs: partial assignments analysed; fixpoint: iterations
    std::size_t pruned = 0;         // dfs: branches skipped by a recorded refutation
    double wall_ms = 0.0;
};

struct VerificationResult {
    Truth truth = Truth::False;
    std::optional<Strategy> strategy;
    Method method = Method::Bruteforce;
    VerificationStats stats;
    // approx only
    std::optional<bool> lower;
    std::optional<bool> upper;
};

/// Caps shared by every engine.
struct Limits {
    std::size_t max_strategies = 10'000'000;
    std::optional<std::chrono::steady_clock::time_point> deadline;

    void check_deadline() const {
        if (deadline && std::chrono::steady_clock::now() > *deadline) {
            throw Error(ErrorKind::Timeout, "verification exceeded its time budget");
        }
    }
};

// ── Outcome construction ────────────────────────────────────────────────────

/// The part of a model a strategy leaves to the environment. succ[s] lists
/// kept successors (a state with none kept stutters on itself); only states
/// reachable from `starts` are present.
struct Submodel {
    std::vector<std::vector<StateId>> succ;
    std::vector<bool> present;
    std::vector<StateId> starts;
};

/// True iff every coalition owner of `action` picks it at its local state in `src`.
inline bool edge_allowed(const GlobalModel& model, const Strategy& strategy, StateId src, ActionId action) {
    if (action == kEpsilon) return true;
    for (std::size_t i = 0; i < strategy.members.size(); ++i) {
        AgentId a = strategy.members[i];
        if (model.amas->owns(a, action) && strategy.at(i, model.local(src, a)) != action) return false;
    }
    return true;
}

inline Submodel prune_model(const GlobalModel& model, const Strategy& strategy) {
    Submodel sub;
    sub.succ.assign(model.size(), {});
    sub.present.assign(model.size(), false);
    sub.starts = coalition_neighborhood(model, strategy.members, model.initial);
    std::deque<StateId> work;
    for (StateId s : sub.starts) {
        sub.present[s] = true;
        work.push_back(s);
    }
    while (!work.empty()) {
        StateId s = work.front();
        work.pop_front();
        for (const Edge& e : model.out(s)) {
            if (edge_allowed(model, strategy, s, e.action)) sub.succ[s].push_back(e.dst);
        }
        if (sub.succ[s].empty()) sub.succ[s].push_back(s);
        for (StateId t : sub.succ[s]) {
            if (!sub.present[t]) {
                sub.present[t] = true;
                work.push_back(t);
            }
        }
    }
    return sub;
}

/// Per-state truth of a boolean expression.
inline std::vector<bool> label(const GlobalModel& model, const BoolExpr& e) {
    std::vector<bool> out(model.size());
    for (StateId s = 0; s < model.size(); ++s) out[s] = eval(e, model.states[s]);
    return out;
}

struct Objective {
    TemporalOp op;
    std::vector<bool> lhs;   // Until only
    std::vector<bool> body;

    static Objective of(const GlobalModel& model, const FormulaAst& f) {
        Objective o{f.op, {}, label(model, f.body)};
        if (f.op == TemporalOp::Until) o.lhs = label(model, f.lhs);
        if (f.op == TemporalOp::Eventually) {
            o.op = TemporalOp::Until;
            o.lhs.assign(model.size(), true);
        }
        return o;
    }
};

namespace detail {

/// Universal until over successor lists: no path from `starts` leaves
/// lhs∧¬body before reaching body, and none stays in lhs∧¬body forever.
template <class Succ>
bool all_paths_until(std::size_t n, const std::vector<StateId>& starts, const std::vector<bool>& lhs,
                     const std::vector<bool>& body, Succ&& succ) {
    std::vector<bool> pending(n, false);
    std::vector<StateId> order;
    std::deque<StateId> work;
    for (StateId s : starts) {
        if (!body[s] && !pending[s]) {
            pending[s] = true;
            work.push_back(s);
        }
    }
    while (!work.empty()) {
        StateId s = work.front();
        work.pop_front();
        if (!lhs[s]) return false;
        order.push_back(s);
        for (StateId t : succ(s)) {
            if (!body[t] && !pending[t]) {
                pending[t] = true;
                work.push_back(t);
            }
        }
    }
    // Kahn's algorithm on the pending subgraph: a leftover node lies on or
    // behind a cycle, i.e. some path never reaches `body`.
    std::vector<std::size_t> indeg(n, 0);
    for (StateId s : order) {
        for (StateId t : succ(s)) {
            if (pending[t]) ++indeg[t];
        }
    }
    std::vector<StateId> ready;
    for (StateId s : order) {
        if (indeg[s] == 0) ready.push_back(s);
    }
    std::size_t removed = 0;
    while (!ready.empty()) {
        StateId s = ready.back();
        ready.pop_back();
        ++removed;
        for (StateId t : succ(s)) {
            if (pending[t] && --indeg[t] == 0) ready.push_back(t);
        }
    }
    return removed == order.size();
}

} // namespace detail

/// Universal path semantics of an objective on a pruned submodel.
inline bool eval_objective(const Submodel& sub, const std::vector<StateId>& starts, const Objective& obj) {
    const std::size_t n = sub.succ.size();
    auto succ = [&](StateId s) -> const std::vector<StateId>& { return sub.succ[s]; };
    switch (obj.op) {
    case TemporalOp::Next:
        for (StateId s : starts) {
            for (StateId t : sub.succ[s]) {
                if (!obj.body[t]) return false;
            }
        }
        return true;
    case TemporalOp::Always: {
        std::vector<bool> seen(n, false);
        std::deque<StateId> work(starts.begin(), starts.end());
        for (StateId s : starts) seen[s] = true;
        while (!work.empty()) {
            StateId s = work.front();
            work.pop_front();
            if (!obj.body[s]) return false;
            for (StateId t : sub.succ[s]) {
                if (!seen[t]) {
                    seen[t] = true;
                    work.push_back(t);
                }
            }
        }
        return true;
    }
    case TemporalOp::Eventually: {
        std::vector<bool> all(n, true);
        return detail::all_paths_until(n, starts, all, obj.body, succ);
    }
    case TemporalOp::Until: return detail::all_paths_until(n, starts, obj.lhs, obj.body, succ);
    }
    return false;
}

inline bool wins(const GlobalModel& model, const Strategy& strategy, const Objective& obj) {
    const Submodel sub = prune_model(model, strategy);
    return eval_objective(sub, sub.starts, obj);
}

// ── Strategy space ──────────────────────────────────────────────────────────

/// One decision point of a strategy: a member and one of its local states.
struct Slot {
    std::size_t member;
    LocalId local;
    std::vector<ActionId> options;
};

inline std::vector<Slot> strategy_slots(const Amas& amas, const std::vector<AgentId>& members) {
    std::vector<Slot> slots;
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (LocalId l = 0; l < amas.agents[members[i]].locals.size(); ++l) {
            slots.push_back({i, l, member_options(amas, members[i], l)});
        }
    }
    return slots;
}

inline Strategy empty_strategy(const Amas& amas, const std::vector<AgentId>& members) {
    Strategy s;
    s.members = members;
    for (AgentId a : members) s.choice.emplace_back(amas.agents[a].locals.size(), kEpsilon);
    return s;
}

/// Members of the formula's coalition, ascending agent ids.
inline std::vector<AgentId> formula_coalition(const Amas& amas, const FormulaAst& f) {
    auto ids = resolve_coalition(amas, f.coalition);
    if (ids.empty()) throw Error(ErrorKind::UnknownReference, "formula coalition is empty");
    return ids;
}

namespace detail {

template <class Fn>
auto timed(VerificationResult& r, Fn&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    r.stats.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace detail

/// Enumerates strategies lexicographically (member, local state, action in
/// declaration order) and returns the first winning one.
inline VerificationResult verify_bruteforce(const GlobalModel& model, const FormulaAst& formula,
                                            const Limits& limits = {}) {
    const Amas& amas = *model.amas;
    VerificationResult r;
    r.method = Method::Bruteforce;
    r.stats.states = model.size();
    detail::timed(r, [&] {
        const auto members = formula_coalition(amas, formula);
        const auto slots = strategy_slots(amas, members);
        double space = 1.0;
        for (const auto& s : slots) space *= static_cast<double>(s.options.size());
        if (space > static_cast<double>(limits.max_strategies)) {
            throw Error(ErrorKind::StrategySpaceExceeded,
                        "strategy space of " + std::to_string(static_cast<long double>(space)) + " exceeds the cap");
        }
        const Objective obj = Objective::of(model, formula);
        Strategy strat = empty_strategy(amas, members);
        std::vector<std::size_t> digit(slots.size(), 0);
        for (std::size_t k = 0; k < slots.size(); ++k) strat.choice[slots[k].member][slots[k].local] = slots[k].options[0];
        while (true) {
            ++r.stats.strategies_examined;
            if ((r.stats.strategies_examined & 0xff) == 1) limits.check_deadline();
            if (wins(model, strat, obj)) {
                r.truth = Truth::True;
                r.strategy = strat;
                return;
            }
            // Odometer: the last slot varies fastest.
            std::size_t k = slots.size();
            while (k > 0) {
                --k;
                if (++digit[k] < slots[k].options.size()) {
                    strat.choice[slots[k].member][slots[k].local] = slots[k].options[digit[k]];
                    break;
                }
                digit[k] = 0;
                strat.choice[slots[k].member][slots[k].local] = slots[k].options[0];
                if (k == 0) {
                    r.truth = Truth::False;
                    return;
                }
            }
            if (slots.empty()) {
                r.truth = Truth::False;
                return;
            }
        }
    });
    return r;
}

// ── Fixpoint approximation ──────────────────────────────────────────────────

namespace detail {

/// Successors of `s` consistent with the members' picks; {s} if none.
template <class Pick>
std::vector<StateId> consistent_successors(const GlobalModel& model, const std::vector<AgentId>& members, StateId s,
                                           Pick&& pick) {
    std::vector<StateId> out;
    for (const Edge& e : model.out(s)) {
        bool ok = true;
        if (e.action != kEpsilon) {
            for (std::size_t i = 0; i < members.size(); ++i) {
                if (model.amas->owns(members[i], e.action) && pick(i, model.local(s, members[i])) != e.action) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) out.push_back(e.dst);
    }
    if (out.empty()) out.push_back(s);
    return out;
}

/// Iterates over every assignment of options to `slots`; stops when `fn` returns true.
template <class Fn>
bool for_each_assignment(const std::vector<Slot>& slots, std::vector<ActionId>& values, Fn&& fn) {
    std::vector<std::size_t> digit(slots.size(), 0);
    values.resize(slots.size());
    for (std::size_t k = 0; k < slots.size(); ++k) values[k] = slots[k].options[0];
    while (true) {
        if (fn()) return true;
        std::size_t k = slots.size();
        while (true) {
            if (k == 0) return false;
            --k;
            if (++digit[k] < slots[k].options.size()) {
                values[k] = slots[k].options[digit[k]];
                break;
            }
            digit[k] = 0;
            values[k] = slots[k].options[0];
        }
    }
}

enum class PreKind { PerfectInformation, Uniform };

/// Controllable pre-image. For PerfectInformation a joint choice is picked per
/// state; for Uniform one partial strategy must work for the whole coalition
/// neighbourhood of the state. On success the winning picks are stored in
/// `witness` as (member, local, action) triples.
class PreImage {
public:
    PreImage(const GlobalModel& model, std::vector<AgentId> members, PreKind kind, const Limits& limits)
        : model_(model), members_(std::move(members)), kind_(kind), limits_(limits) {}

    bool contains(StateId q, const std::vector<bool>& target, std::vector<std::tuple<std::size_t, LocalId, ActionId>>* witness) {
        const Amas& amas = *model_.amas;
        std::vector<StateId> region = kind_ == PreKind::Uniform ? coalition_neighborhood(model_, members_, q)
                                                                : std::vector<StateId>{q};
        std::vector<Slot> slots;
        for (std::size_t i = 0; i < members_.size(); ++i) {
            std::vector<LocalId> locals;
            for (StateId r : region) locals.push_back(model_.local(r, members_[i]));
            std::sort(locals.begin(), locals.end());
            locals.erase(std::unique(locals.begin(), locals.end()), locals.end());
            for (LocalId l : locals) slots.push_back({i, l, member_options(amas, members_[i], l)});
        }
        double space = 1.0;
        for (const auto& s : slots) space *= static_cast<double>(s.options.size());
        if (space > static_cast<double>(limits_.max_strategies)) {
            throw Error(ErrorKind::StrategySpaceExceeded, "joint choice space exceeds the cap");
        }
        std::vector<ActionId> values;
        auto pick = [&](std::size_t member, LocalId local) {
            for (std::size_t k = 0; k < slots.size(); ++k) {
                if (slots[k].member == member && slots[k].local == local) return values[k];
            }
            return kEpsilon;
        };
        bool found = for_each_assignment(slots, values, [&] {
            for (StateId r : region) {
                for (StateId t : consistent_successors(model_, members_, r, pick)) {
                    if (!target[t]) return false;
                }
            }
            return true;
        });
        if (found && witness) {
            witness->clear();
            for (std::size_t k = 0; k < slots.size(); ++k) witness->emplace_back(slots[k].member, slots[k].local, values[k]);
        }
        return found;
    }

private:
    const GlobalModel& model_;
    std::vector<AgentId> members_;
    PreKind kind_;
    const Limits& limits_;
};

struct FixpointOutcome {
    std::vector<bool> set;
    // States in the order they were (last) justified, with their witnesses.
    std::vector<std::pair<StateId, std::vector<std::tuple<std::size_t, LocalId, ActionId>>>> justification;
    std::size_t iterations = 0;
};

inline FixpointOutcome solve_fixpoint(const GlobalModel& model, const FormulaAst& formula, PreKind kind,
                                      const Limits& limits) {
    const auto members = formula_coalition(*model.amas, formula);
    const Objective obj = Objective::of(model, formula);
    PreImage pre(model, members, kind, limits);
    const std::size_t n = model.size();
    FixpointOutcome out;
    std::vector<std::tuple<std::size_t, LocalId, ActionId>> w;
    switch (obj.op) {
    case TemporalOp::Next: {
        out.set.assign(n, false);
        for (StateId q = 0; q < n; ++q) {
            if (pre.contains(q, obj.body, &w)) {
                out.set[q] = true;
                out.justification.emplace_back(q, w);
            }
        }
        out.iterations = 1;
        break;
    }
    case TemporalOp::Always: {
        // Greatest fixpoint: Z = body ∩ Pre(Z).
        out.set = obj.body;
        bool changed = true;
        while (changed) {
            limits.check_deadline();
            ++out.iterations;
            changed = false;
            std::vector<bool> next = out.set;
            for (StateId q = 0; q < n; ++q) {
                if (out.set[q] && !pre.contains(q, out.set, nullptr)) {
                    next[q] = false;
                    changed = true;
                }
            }
            out.set = std::move(next);
        }
        for (StateId q = 0; q < n; ++q) {
            if (out.set[q] && pre.contains(q, out.set, &w)) out.justification.emplace_back(q, w);
        }
        break;
    }
    case TemporalOp::Eventually:
    case TemporalOp::Until: {
        // Least fixpoint: Z = body ∪ (lhs ∩ Pre(Z)).
        out.set = obj.body;
        bool changed = true;
        while (changed) {
            limits.check_deadline();
            ++out.iterations;
            changed = false;
            std::vector<bool> next = out.set;
            for (StateId q = 0; q < n; ++q) {
                if (!out.set[q] && obj.lhs[q] && pre.contains(q, out.set, &w)) {
                    next[q] = true;
                    changed = true;
                    out.justification.emplace_back(q, w);
                }
            }
            out.set = std::move(next);
        }
        break;
    }
    }
    return out;
}

inline bool covers_neighborhood(const GlobalModel& model, const FormulaAst& formula, const std::vector<bool>& set) {
    for (StateId s : coalition_neighborhood(model, formula_coalition(*model.amas, formula), model.initial)) {
        if (!set[s]) return false;
    }
    return true;
}

} // namespace detail

/// Perfect-information relaxation: never false when the exact answer is true.
inline bool fixpoint_upper(const GlobalModel& model, const FormulaAst& formula, const Limits& limits = {},
                           VerificationStats* stats = nullptr) {
    auto fp = detail::solve_fixpoint(model, formula, detail::PreKind::PerfectInformation, limits);
    if (stats) stats->nodes += fp.iterations;
    return detail::covers_neighborhood(model, formula, fp.set);
}

/// Uniform under-approximation. The fixpoint's per-neighbourhood choices are
/// assembled into one strategy (earliest justification wins), which must then
/// pass the outcome check; `strategy` receives it on success.
inline bool fixpoint_lower(const GlobalModel& model, const FormulaAst& formula, const Limits& limits = {},
                           Strategy* strategy = nullptr, VerificationStats* stats = nullptr) {
    const Amas& amas = *model.amas;
    auto fp = detail::solve_fixpoint(model, formula, detail::PreKind::Uniform, limits);
    if (stats) stats->nodes += fp.iterations;
    if (!detail::covers_neighborhood(model, formula, fp.set)) return false;
    const auto members = formula_coalition(amas, formula);
    Strategy strat = empty_strategy(amas, members);
    std::vector<std::vector<bool>> fixed(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) fixed[i].assign(amas.agents[members[i]].locals.size(), false);
    for (const auto& [q, picks] : fp.justification) {
        for (const auto& [member, local, action] : picks) {
            if (!fixed[member][local]) {
                fixed[member][local] = true;
                strat.choice[member][local] = action;
            }
        }
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (LocalId l = 0; l < fixed[i].size(); ++l) {
            if (!fixed[i][l]) strat.choice[i][l] = member_options(amas, members[i], l).front();
        }
    }
    if (!wins(model, strat, Objective::of(model, formula))) return false;
    if (strategy) *strategy = std::move(strat);
    return true;
}

/// Lower true decides true, upper false decides false, otherwise inconclusive.
/// Both bounds are always computed and reported; stats.nodes counts fixpoint
/// iterations.
inline VerificationResult verify_approx(const GlobalModel& model, const FormulaAst& formula, const Limits& limits = {}) {
    VerificationResult r;
    r.method = Method::Fixpoint;
    r.stats.states = model.size();
    detail::timed(r, [&] {
        Strategy strat;
        r.lower = fixpoint_lower(model, formula, limits, &strat, &r.stats);
        r.upper = fixpoint_upper(model, formula, limits, &r.stats);
        if (*r.lower) {
            r.truth = Truth::True;
            r.strategy = std::move(strat);
        } else {
            r.truth = *r.upper ? Truth::Inconclusive : Truth::False;
        }
    });
    return r;
}

// ── Depth-first strategy search ─────────────────────────────────────────────

namespace detail {

/// Search over partial strategies. Local states are assigned in the order the
/// outcome exploration meets them; a partial strategy is abandoned as soon as
/// the part of the outcome it already fixes refutes the objective. The
/// assignments a refutation depended on are recorded, and any later partial
/// strategy containing a recorded refutation is skipped unexplored.
class StrategySearch {
public:
    StrategySearch(const GlobalModel& model, const FormulaAst& formula, const Limits& limits)
        : model_(model),
          amas_(*model.amas),
          limits_(limits),
          members_(formula_coalition(amas_, formula)),
          obj_(Objective::of(model, formula)),
          starts_(coalition_neighborhood(model, members_, model.initial)) {
        assigned_ = empty_strategy(amas_, members_);
        for (auto& row : assigned_.choice) std::fill(row.begin(), row.end(), kUnassigned);
    }

    std::optional<Strategy> run(VerificationStats& stats) {
        stats_ = &stats;
        return search() ? std::optional<Strategy>(result_) : std::nullopt;
    }

private:
    static constexpr ActionId kUnassigned = kEpsilon - 1;

    using Assignment = std::pair<std::size_t, LocalId>;  // (member, local)
    using Core = std::vector<std::pair<Assignment, ActionId>>;

    enum class EdgeStatus { Kept, Removed, Open };

    struct Analysis {
        enum class Kind { Refuted, Complete, Branch } kind = Kind::Complete;
        Core core;
        Assignment branch{};
    };

    EdgeStatus status(StateId s, ActionId action, Core* why = nullptr) const {
        if (action == kEpsilon) return EdgeStatus::Kept;
        bool open = false;
        for (std::size_t i = 0; i < members_.size(); ++i) {
            if (!amas_.owns(members_[i], action)) continue;
            LocalId l = model_.local(s, members_[i]);
            ActionId v = assigned_.choice[i][l];
            if (v == kUnassigned) {
                open = true;
            } else if (v != action) {
                if (why) why->push_back({{i, l}, v});
                return EdgeStatus::Removed;
            }
        }
        return open ? EdgeStatus::Open : EdgeStatus::Kept;
    }

    void explain_kept(StateId s, ActionId action, Core& core) const {
        if (action == kEpsilon) return;
        for (std::size_t i = 0; i < members_.size(); ++i) {
            if (amas_.owns(members_[i], action)) {
                LocalId l = model_.local(s, members_[i]);
                core.push_back({{i, l}, assigned_.choice[i][l]});
            }
        }
    }

    /// Successors certain under every completion, with the reason for each.
    /// A state whose edges are all removed stutters on itself.
    struct CertainEdge {
        StateId dst;
        ActionId action;  // kEpsilon for the implicit stutter
    };

    std::vector<CertainEdge> certain_out(StateId s, bool& has_open) const {
        std::vector<CertainEdge> out;
        has_open = false;
        bool any_kept = false;
        for (const Edge& e : model_.out(s)) {
            switch (status(s, e.action)) {
            case EdgeStatus::Kept:
                out.push_back({e.dst, e.action});
                any_kept = true;
                break;
            case EdgeStatus::Open: has_open = true; break;
            case EdgeStatus::Removed: break;
            }
        }
        if (!any_kept && !has_open) out.push_back({s, kEpsilon});
        return out;
    }

    void explain_edge(StateId s, const CertainEdge& e, Core& core) const {
        if (e.action != kEpsilon || e.dst != s) {
            explain_kept(s, e.action, core);
            return;
        }
        // Stutter: every real edge of s is removed (or s is a deadlock).
        for (const Edge& real : model_.out(s)) status(s, real.action, &core);
    }

    Analysis analyze() {
        const std::size_t n = model_.size();
        Analysis result;
        // Certain graph restricted to the reachable part, with BFS parents.
        std::vector<std::vector<CertainEdge>> certain(n);
        std::vector<bool> has_open(n, false), seen(n, false);
        std::vector<std::optional<std::pair<StateId, CertainEdge>>> parent(n);
        std::deque<StateId> work;
        // Open exploration: reachable over kept or open edges, to find the branch point.
        std::vector<bool> maybe(n, false);
        std::deque<StateId> maybe_work;
        for (StateId s : starts_) {
            seen[s] = true;
            work.push_back(s);
            maybe[s] = true;
            maybe_work.push_back(s);
        }
        std::vector<StateId> order;
        while (!work.empty()) {
            StateId s = work.front();
            work.pop_front();
            order.push_back(s);
            bool open = false;
            certain[s] = certain_out(s, open);
            has_open[s] = open;
            for (const auto& e : certain[s]) {
                if (!seen[e.dst]) {
                    seen[e.dst] = true;
                    parent[e.dst] = {s, e};
                    work.push_back(e.dst);
                }
            }
        }
        auto path_core = [&](StateId s, Core& core) {
            while (parent[s]) {
                auto [p, e] = *parent[s];
                explain_edge(p, e, core);
                s = p;
            }
        };
        auto refuted = [&](Core core) {
            std::sort(core.begin(), core.end());
            core.erase(std::unique(core.begin(), core.end()), core.end());
            result.kind = Analysis::Kind::Refuted;
            result.core = std::move(core);
            return result;
        };

        switch (obj_.op) {
        case TemporalOp::Always:
            for (StateId s : order) {
                if (!obj_.body[s]) {
                    Core core;
                    path_core(s, core);
                    return refuted(std::move(core));
                }
            }
            break;
        case TemporalOp::Next:
            for (StateId s : starts_) {
                for (const auto& e : certain[s]) {
                    if (!obj_.body[e.dst]) {
                        Core core;
                        explain_edge(s, e, core);
                        return refuted(std::move(core));
                    }
                }
            }
            break;
        case TemporalOp::Eventually:
        case TemporalOp::Until: {
            if (auto core = until_refutation(certain)) return refuted(std::move(*core));
            break;
        }
        }

        // Branch on the first open decision met by a breadth-first walk over
        // edges that may survive.
        while (!maybe_work.empty()) {
            StateId s = maybe_work.front();
            maybe_work.pop_front();
            for (const Edge& e : model_.out(s)) {
                EdgeStatus st = status(s, e.action);
                if (st == EdgeStatus::Open) {
                    for (std::size_t i = 0; i < members_.size(); ++i) {
                        LocalId l = model_.local(s, members_[i]);
                        if (amas_.owns(members_[i], e.action) && assigned_.choice[i][l] == kUnassigned) {
                            result.kind = Analysis::Kind::Branch;
                            result.branch = {i, l};
                            return result;
                        }
                    }
                }
                if (st != EdgeStatus::Removed && !maybe[e.dst]) {
                    maybe[e.dst] = true;
                    maybe_work.push_back(e.dst);
                }
            }
        }
        result.kind = Analysis::Kind::Complete;
        return result;
    }

    /// Refutes lhs U body when a reachable certain path reaches ¬lhs∧¬body or
    /// a certain cycle stays inside lhs∧¬body.
    std::optional<Core> until_refutation(const std::vector<std::vector<CertainEdge>>& certain) const {
        const std::size_t n = model_.size();
        std::vector<bool> pending(n, false);
        std::vector<std::optional<std::pair<StateId, CertainEdge>>> parent(n);
        std::deque<StateId> work;
        std::vector<StateId> order;
        for (StateId s : starts_) {
            if (!obj_.body[s] && !pending[s]) {
                pending[s] = true;
                work.push_back(s);
            }
        }
        auto path_core = [&](StateId s, Core& core) {
            while (parent[s]) {
                auto [p, e] = *parent[s];
                explain_edge(p, e, core);
                s = p;
            }
        };
        while (!work.empty()) {
            StateId s = work.front();
            work.pop_front();
            if (!obj_.lhs[s]) {
                Core core;
                path_core(s, core);
                return core;
            }
            order.push_back(s);
            for (const auto& e : certain[s]) {
                if (!obj_.body[e.dst] && !pending[e.dst]) {
                    pending[e.dst] = true;
                    parent[e.dst] = {s, e};
                    work.push_back(e.dst);
                }
            }
        }
        // Cycle search among pending states (iterative DFS, colours).
        std::vector<std::uint8_t> colour(n, 0);
        for (StateId root : order) {
            if (colour[root]) continue;
            std::vector<std::pair<StateId, std::size_t>> stack{{root, 0}};
            colour[root] = 1;
            while (!stack.empty()) {
                auto& [s, i] = stack.back();
                if (i < certain[s].size()) {
                    const CertainEdge e = certain[s][i++];
                    if (!pending[e.dst]) continue;
                    if (colour[e.dst] == 1) {
                        Core core;
                        explain_edge(s, e, core);
                        // Cycle edges: from e.dst up the stack to s.
                        std::size_t k = stack.size() - 1;
                        while (stack[k].first != e.dst) --k;
                        for (std::size_t j = k; j + 1 < stack.size(); ++j) {
                            StateId from = stack[j].first;
                            const CertainEdge& taken = certain[from][stack[j].second - 1];
                            explain_edge(from, taken, core);
                        }
                        path_core(e.dst, core);
                        return core;
                    }
                    if (colour[e.dst] == 0) {
                        colour[e.dst] = 1;
                        stack.push_back({e.dst, 0});
                    }
                } else {
                    colour[s] = 2;
                    stack.pop_back();
                }
            }
        }
        return std::nullopt;
    }

    bool blocked() const {
        for (const auto& core : nogoods_) {
            bool contained = std::all_of(core.begin(), core.end(), [&](const auto& entry) {
                return assigned_.choice[entry.first.first][entry.first.second] == entry.second;
            });
            if (contained) return true;
        }
        return false;
    }

    bool search() {
        ++stats_->nodes;
        if (stats_->nodes > limits_.max_strategies) {
            throw Error(ErrorKind::StrategySpaceExceeded, "search exceeded the node cap");
        }
        if ((stats_->nodes & 0xff) == 1) limits_.check_deadline();
        Analysis a = analyze();
        switch (a.kind) {
        case Analysis::Kind::Refuted:
            nogoods_.push_back(std::move(a.core));
            return false;
        case Analysis::Kind::Complete: {
            ++stats_->strategies_examined;
            Strategy full = assigned_;
            for (std::size_t i = 0; i < members_.size(); ++i) {
                for (LocalId l = 0; l < full.choice[i].size(); ++l) {
                    if (full.choice[i][l] == kUnassigned) full.choice[i][l] = member_options(amas_, members_[i], l).front();
                }
            }
            if (!wins(model_, full, obj_)) return false;
            result_ = std::move(full);
            return true;
        }
        case Analysis::Kind::Branch: {
            auto [member, local] = a.branch;
            for (ActionId option : member_options(amas_, members_[member], local)) {
                assigned_.choice[member][local] = option;
                if (blocked()) {
                    ++stats_->pruned;
                    continue;
                }
                if (search()) return true;
            }
            assigned_.choice[member][local] = kUnassigned;
            return false;
        }
        }
        return false;
    }

    const GlobalModel& model_;
    const Amas& amas_;
    const Limits& limits_;
    std::vector<AgentId> members_;
    Objective obj_;
    std::vector<StateId> starts_;
    Strategy assigned_;
    Strategy result_;
    std::vector<Core> nogoods_;
    VerificationStats* stats_ = nullptr;
};

} // namespace detail

inline VerificationResult verify_dfs(const GlobalModel& model, const FormulaAst& formula, const Limits& limits = {}) {
    VerificationResult r;
    r.method = Method::Dfs;
    r.stats.states = model.size();
    detail::timed(r, [&] {
        detail::StrategySearch search(model, formula, limits);
        r.strategy = search.run(r.stats);
        r.truth = r.strategy ? Truth::True : Truth::False;
    });
    return r;
}

inline VerificationResult verify(const GlobalModel& model, const FormulaAst& formula, Method method,
                                 const Limits& limits = {}) {
    switch (method) {
    case Method::Bruteforce: return verify_bruteforce(model, formula, limits);
    case Method::Fixpoint: return verify_approx(model, formula, limits);
    case Method::Dfs: return verify_dfs(model, formula, limits);
    }
    return verify_bruteforce(model, formula, limits);
}

} // namespace stratcheck
