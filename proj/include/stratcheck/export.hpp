#pragma once

#include "stratcheck/model.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace stratcheck {

using Json = nlohmann::ordered_json;

enum class GraphFormat { Dot, Json };

namespace detail {

inline std::string dot_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

} // namespace detail

inline Json graph_to_json(const GlobalModel& model, bool highlight_reduced) {
    const Amas& amas = *model.amas;
    const bool hl = highlight_reduced && model.marked();
    Json agents = Json::array();
    for (const auto& a : amas.agents) agents.push_back(a.name);
    Json states = Json::array();
    for (StateId s = 0; s < model.size(); ++s) {
        Json locals = Json::array();
        for (AgentId a = 0; a < amas.agents.size(); ++a) locals.push_back(amas.agents[a].locals[model.local(s, a)]);
        states.push_back(Json{{"id", s},
                              {"locals", std::move(locals)},
                              {"props", true_props(amas, model.states[s])},
                              {"reduced", hl && model.state_reduced[s]}});
    }
    Json edges = Json::array();
    for (std::size_t i = 0; i < model.edges.size(); ++i) {
        const Edge& e = model.edges[i];
        edges.push_back(Json{{"src", e.src},
                             {"dst", e.dst},
                             {"action", std::string(amas.action_name(e.action))},
                             {"reduced", hl && model.edge_reduced[i]}});
    }
    return Json{{"agents", std::move(agents)}, {"states", std::move(states)}, {"edges", std::move(edges)},
                {"initial", model.initial}};
}

inline std::string graph_to_dot(const GlobalModel& model, bool highlight_reduced) {
    const Amas& amas = *model.amas;
    const bool hl = highlight_reduced && model.marked();
    std::string out = "digraph M {\n";
    for (StateId s = 0; s < model.size(); ++s) {
        std::string label = detail::dot_escape(describe_locals(amas, model.states[s]));
        auto props = true_props(amas, model.states[s]);
        if (!props.empty()) label += "\\n" + detail::dot_escape(detail::join(props, ","));
        out += "  " + std::to_string(s) + " [label=\"" + label + "\"";
        if (s == model.initial) out += ", peripheries=2";
        if (hl && model.state_reduced[s]) out += ", color=blue";
        out += "];\n";
    }
    for (std::size_t i = 0; i < model.edges.size(); ++i) {
        const Edge& e = model.edges[i];
        out += "  " + std::to_string(e.src) + " -> " + std::to_string(e.dst) + " [label=\"" +
               detail::dot_escape(amas.action_name(e.action)) + "\"";
        if (hl && model.edge_reduced[i]) out += ", color=blue";
        out += "];\n";
    }
    out += "}\n";
    return out;
}

inline std::string export_graph(const GlobalModel& model, GraphFormat format, bool highlight_reduced) {
    if (format == GraphFormat::Dot) return graph_to_dot(model, highlight_reduced);
    return graph_to_json(model, highlight_reduced).dump(2) + "\n";
}

/// Plain-data view of an exported graph, as read back from JSON.
struct GraphData {
    struct State {
        std::vector<std::string> locals;
        std::vector<std::string> props;
        bool reduced = false;

        friend auto operator<=>(const State&, const State&) = default;
    };
    struct Transition {
        std::vector<std::string> src;
        std::string action;
        std::vector<std::string> dst;
        bool reduced = false;

        friend auto operator<=>(const Transition&, const Transition&) = default;
    };
    std::vector<std::string> agents;
    std::vector<State> states;
    std::vector<Transition> edges;  // endpoints by local tuple
    std::size_t initial = 0;
};

inline GraphData graph_from_json(const Json& j) {
    GraphData g;
    g.agents = j.at("agents").get<std::vector<std::string>>();
    for (const auto& s : j.at("states")) {
        g.states.push_back({s.at("locals").get<std::vector<std::string>>(), s.at("props").get<std::vector<std::string>>(),
                            s.value("reduced", false)});
    }
    for (const auto& e : j.at("edges")) {
        auto src = e.at("src").get<std::size_t>();
        auto dst = e.at("dst").get<std::size_t>();
        g.edges.push_back({g.states.at(src).locals, e.at("action").get<std::string>(), g.states.at(dst).locals,
                           e.value("reduced", false)});
    }
    g.initial = j.at("initial").get<std::size_t>();
    return g;
}

} // namespace stratcheck
