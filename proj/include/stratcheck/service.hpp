#pragma once

// Shared core of the command line and the HTTP service: content-addressed
// model store and the JSON records both front ends print.

#include "stratcheck/bisim.hpp"
#include "stratcheck/export.hpp"
#include "stratcheck/por.hpp"
#include "stratcheck/verify.hpp"

#include <chrono>
#include <cstdint>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace stratcheck {

/// FNV-1a 64-bit of the text, as 16 hex digits.
inline std::string content_id(std::string_view text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

/// Process exit codes shared by every command.
namespace exit_code {
inline constexpr int kTrue = 0;
inline constexpr int kFalse = 1;
inline constexpr int kInconclusive = 2;
inline constexpr int kTimeout = 3;
inline constexpr int kLimit = 4;  // state or strategy cap hit
inline constexpr int kInput = 64;
inline constexpr int kUnavailable = 69;
} // namespace exit_code

inline std::optional<Method> parse_method(std::string_view s) {
    if (s == "bruteforce") return Method::Bruteforce;
    if (s == "approx" || s == "fixpoint") return Method::Fixpoint;
    if (s == "dfs") return Method::Dfs;
    return std::nullopt;
}

inline std::optional<C3Mode> parse_c3(std::string_view s) {
    if (s == "safe") return C3Mode::Safe;
    if (s == "aggressive") return C3Mode::Aggressive;
    return std::nullopt;
}

/// "a, b,c" -> {"a","b","c"}; empty items dropped.
inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        auto b = cur.find_first_not_of(" \t");
        auto e = cur.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
        cur.clear();
    };
    for (char c : s) {
        if (c == ',') {
            flush();
        } else {
            cur += c;
        }
    }
    flush();
    return out;
}

inline Json error_record(const Error& e) {
    Json j{{"error", std::string(to_string(e.kind()))}, {"message", e.message()}};
    if (e.pos().line) {
        j["line"] = e.pos().line;
        j["column"] = e.pos().column;
    }
    return j;
}

inline int exit_code_for(const Error& e) {
    switch (e.kind()) {
    case ErrorKind::Timeout: return exit_code::kTimeout;
    case ErrorKind::StateLimitExceeded:
    case ErrorKind::StrategySpaceExceeded: return exit_code::kLimit;
    default: return exit_code::kInput;
    }
}

inline int exit_code_for(Truth t) {
    switch (t) {
    case Truth::True: return exit_code::kTrue;
    case Truth::False: return exit_code::kFalse;
    case Truth::Inconclusive: return exit_code::kInconclusive;
    }
    return exit_code::kInput;
}

// ── Records ─────────────────────────────────────────────────────────────────

inline Json model_summary(const std::string& id, const GlobalModel& model) {
    return Json{{"id", id}, {"states", model.size()}, {"edges", model.edges.size()}};
}

struct ReduceRequest {
    std::optional<std::vector<std::string>> coalition;  // default: the spec's
    std::optional<std::vector<std::string>> props;      // default: formula props
    C3Mode c3 = C3Mode::Safe;
};

inline ReductionParams reduction_params(const Amas& amas, const ReduceRequest& req) {
    ReductionParams p = default_reduction_params(amas, req.c3);
    if (req.coalition || req.props) {
        std::vector<std::string> coalition;
        for (AgentId a : p.coalition) coalition.push_back(amas.agents[a].name);
        std::vector<std::string> props;
        for (PropId i = 0; i < p.visible.size(); ++i) {
            if (p.visible[i]) props.push_back(amas.propositions[i]);
        }
        p = make_reduction_params(amas, req.coalition.value_or(coalition), req.props.value_or(props), req.c3);
    }
    return p;
}

struct Reduction {
    ReducedModel reduced;
    GlobalModel marked;  // full model with the reduced part flagged
    ReductionStats stats;
};

inline Reduction reduce(const GlobalModel& full, const ReductionParams& params) {
    auto t0 = std::chrono::steady_clock::now();
    ReducedModel reduced = build_reduced_model(full.amas, params);
    ReductionStats stats;
    stats.full_states = full.size();
    stats.full_edges = full.edges.size();
    stats.reduced_states = reduced.model.size();
    stats.reduced_edges = reduced.model.edges.size();
    stats.mode = params.c3;
    stats.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    GlobalModel marked = mark_reduced(full, reduced);
    return {std::move(reduced), std::move(marked), stats};
}

/// "full: 8 states / 14 edges; reduced: 5 / 6"
inline std::string reduction_summary(const ReductionStats& s) {
    return "full: " + std::to_string(s.full_states) + " states / " + std::to_string(s.full_edges) +
           " edges; reduced: " + std::to_string(s.reduced_states) + " / " + std::to_string(s.reduced_edges);
}

inline Json reduce_record(const Amas& amas, const ReductionParams& params, const ReductionStats& s, bool timing) {
    Json coalition = Json::array();
    for (AgentId a : params.coalition) coalition.push_back(amas.agents[a].name);
    Json visible = Json::array();
    for (PropId p = 0; p < params.visible.size(); ++p) {
        if (params.visible[p]) visible.push_back(amas.propositions[p]);
    }
    Json j{{"coalition", std::move(coalition)},
           {"visible", std::move(visible)},
           {"mode", std::string(to_string(s.mode))},
           {"full", {{"states", s.full_states}, {"edges", s.full_edges}}},
           {"reduced", {{"states", s.reduced_states}, {"edges", s.reduced_edges}}},
           {"ratio", s.ratio()}};
    if (timing) j["wall_ms"] = s.wall_ms;
    return j;
}

struct VerifyRequest {
    Method method = Method::Bruteforce;
    bool por = false;
    C3Mode c3 = C3Mode::Safe;
    std::optional<std::string> formula;  // default: the spec's
    double timeout_s = 60.0;

    [[nodiscard]] std::string key() const {
        return std::string(to_string(method)) + "|" + (por ? "por" : "full") + "|" + std::string(to_string(c3)) +
               "|" + std::to_string(timeout_s) + "|" + formula.value_or("");
    }
};

inline FormulaAst request_formula(const Amas& amas, const VerifyRequest& req) {
    if (req.formula) return resolve_formula(amas, parse_formula(*req.formula));
    if (!amas.formula) throw Error(ErrorKind::UnknownReference, "the specification has no FORMULA");
    return *amas.formula;
}

/// Runs one verification and returns its record. Limit and timeout errors
/// become records with "truth":"timeout" / "error"; input errors propagate.
inline Json run_verify(const GlobalModel& full, const VerifyRequest& req, bool timing) {
    const Amas& amas = *full.amas;
    const FormulaAst formula = request_formula(amas, req);
    Json j{{"method", std::string(to_string(req.method))}, {"formula", to_string(formula)}, {"por", req.por}};
    Limits limits;
    limits.deadline = std::chrono::steady_clock::now() +
                      std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                          std::chrono::duration<double>(req.timeout_s));
    try {
        std::optional<ReducedModel> reduced;
        if (req.por) {
            ReductionParams params = default_reduction_params(amas, req.c3);
            params.coalition = formula_coalition(amas, formula);
            mark_props(formula.body, params.visible);
            if (formula.op == TemporalOp::Until) mark_props(formula.lhs, params.visible);
            reduced = build_reduced_model(full.amas, params);
            j["c3"] = std::string(to_string(req.c3));
        }
        const GlobalModel& target = reduced ? reduced->model : full;
        VerificationResult r = verify(target, formula, req.method, limits);
        j["truth"] = std::string(to_string(r.truth));
        j["strategy"] = r.strategy ? strategy_to_json(amas, *r.strategy) : Json(nullptr);
        if (r.lower) j["lower"] = *r.lower;
        if (r.upper) j["upper"] = *r.upper;
        Json stats{{"states", r.stats.states},
                   {"strategies_examined", r.stats.strategies_examined},
                   {"nodes", r.stats.nodes},
                   {"pruned", r.stats.pruned}};
        if (timing) stats["wall_ms"] = r.stats.wall_ms;
        j["stats"] = std::move(stats);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Timeout) {
            j["truth"] = "timeout";
        } else if (e.kind() == ErrorKind::StateLimitExceeded || e.kind() == ErrorKind::StrategySpaceExceeded) {
            j["truth"] = "error";
            j["error"] = error_record(e);
        } else {
            throw;
        }
    }
    return j;
}

inline int exit_code_for(const Json& verify_record) {
    const std::string t = verify_record.at("truth").get<std::string>();
    if (t == "true") return exit_code::kTrue;
    if (t == "false") return exit_code::kFalse;
    if (t == "inconclusive") return exit_code::kInconclusive;
    if (t == "timeout") return exit_code::kTimeout;
    return exit_code::kLimit;
}

struct BisimRequest {
    std::string left;
    std::string right;
    std::string relation;
    std::optional<std::vector<std::string>> coalition;  // overrides the relation file
    bool strict = false;
};

inline Json run_bisim(const BisimRequest& req) {
    SpecDocument ldoc = parse_spec(req.left);
    SpecDocument rdoc = parse_spec(req.right);
    GlobalModel left = build_global_model(std::make_shared<const Amas>(validate(ldoc)));
    GlobalModel right = build_global_model(std::make_shared<const Amas>(validate(rdoc)));
    RelationSpec spec = parse_relation(req.relation, ldoc, rdoc);
    CandidateRelation rel;
    rel.pairs = expand_relation(spec, left, right);
    rel.coalition = resolve_coalition(*left.amas, req.coalition.value_or(spec.coalition));
    if (rel.coalition.empty()) throw Error(ErrorKind::UnknownReference, "no coalition given for the relation");
    return verdict_to_json(check_a_bisimulation(left, right, rel, req.strict), left, right);
}

// ── Session store ───────────────────────────────────────────────────────────

/// Content-addressed store of built models and their results. Entries are
/// never modified once written; lookups and inserts are thread-safe.
class SessionStore {
public:
    struct Artifacts {
        std::string text;
        GlobalModel full;
    };

    struct Added {
        std::string id;
        std::shared_ptr<const Artifacts> artifacts;
        bool hit = false;
    };

    Added add(const std::string& text) {
        const std::string id = content_id(text);
        {
            std::lock_guard lock(mu_);
            if (auto it = models_.find(id); it != models_.end()) {
                ++hits_;
                return {id, it->second, true};
            }
        }
        auto built = std::make_shared<const Artifacts>(
            Artifacts{text, build_global_model(std::make_shared<const Amas>(load_amas(text)))});
        std::lock_guard lock(mu_);
        auto [it, fresh] = models_.emplace(id, built);
        if (fresh) {
            ++misses_;
        } else {
            ++hits_;
        }
        return {id, it->second, !fresh};
    }

    [[nodiscard]] std::shared_ptr<const Artifacts> find(const std::string& id) const {
        std::lock_guard lock(mu_);
        auto it = models_.find(id);
        return it == models_.end() ? nullptr : it->second;
    }

    /// Returns the cached result for `key` or computes it with `fn`, at most
    /// once per key. The second member tells whether it was cached.
    template <class Fn>
    std::pair<Json, bool> result(const std::string& key, Fn&& fn) {
        std::shared_future<Json> fut;
        bool cached = false;
        {
            std::lock_guard lock(mu_);
            if (auto it = results_.find(key); it != results_.end()) {
                fut = it->second;
                cached = true;
                ++hits_;
            } else {
                std::promise<Json> p;
                fut = p.get_future().share();
                results_.emplace(key, fut);
                ++misses_;
                pending_.emplace(key, std::move(p));
            }
        }
        if (!cached) complete(key, fn);
        return {fut.get(), cached};
    }

    /// Starts `fn` in the background unless `key` is known; returns at once.
    template <class Fn>
    void start(const std::string& key, Fn fn) {
        {
            std::lock_guard lock(mu_);
            if (results_.count(key)) {
                ++hits_;
                return;
            }
            std::promise<Json> p;
            results_.emplace(key, p.get_future().share());
            pending_.emplace(key, std::move(p));
            ++misses_;
        }
        std::thread([this, key, fn = std::move(fn)] { complete(key, fn); }).detach();
    }

    /// Result for `key`: nullopt if unknown, a null Json while running.
    [[nodiscard]] std::optional<Json> poll(const std::string& key) const {
        std::lock_guard lock(mu_);
        auto it = results_.find(key);
        if (it == results_.end()) return std::nullopt;
        if (it->second.wait_for(std::chrono::seconds(0)) != std::future_status::ready) {
            return std::make_optional<Json>(nullptr);
        }
        return std::make_optional<Json>(it->second.get());
    }

    [[nodiscard]] Json stats() const {
        std::lock_guard lock(mu_);
        return Json{{"models", models_.size()}, {"results", results_.size()}, {"hits", hits_}, {"misses", misses_}};
    }

    ~SessionStore() {
        // Background jobs hold `this`; wait for them before tearing down.
        std::vector<std::shared_future<Json>> all;
        {
            std::lock_guard lock(mu_);
            for (const auto& [k, f] : results_) all.push_back(f);
        }
        for (auto& f : all) f.wait();
    }

private:
    template <class Fn>
    void complete(const std::string& key, Fn& fn) {
        Json value;
        try {
            value = fn();
        } catch (const Error& e) {
            value = error_record(e);
        } catch (const std::exception& e) {
            value = Json{{"error", "InternalError"}, {"message", e.what()}};
        }
        std::promise<Json> p;
        {
            std::lock_guard lock(mu_);
            p = std::move(pending_.at(key));
            pending_.erase(key);
        }
        p.set_value(std::move(value));
    }

    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<const Artifacts>> models_;
    std::map<std::string, std::shared_future<Json>> results_;
    std::map<std::string, std::promise<Json>> pending_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

} // namespace stratcheck
