#pragma once

// HTTP adapter over the session store. Needs cpp-httplib on the include path.

#include "stratcheck/service.hpp"

#include <httplib.h>

#include <iostream>
#include <string>

namespace stratcheck {

/// Every record goes out the same way on every front end.
inline std::string render_record(const Json& j) { return j.dump(2) + "\n"; }

struct ServeOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string ui_dir;  // static assets, optional
};

class HttpService {
public:
    explicit HttpService(ServeOptions options = {}) : options_(std::move(options)) {
        // no SO_REUSEPORT: a port already in use must fail to bind
        server_.set_socket_options([](socket_t sock) {
            int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
        });
        install();
    }

    httplib::Server& server() { return server_; }
    SessionStore& store() { return store_; }

    /// Blocks until stop(). Returns the process exit code.
    int run() {
        if (!server_.bind_to_port(options_.host, options_.port)) {
            std::cerr << "cannot bind " << options_.host << ":" << options_.port << "\n";
            return exit_code::kUnavailable;
        }
        std::cerr << "listening on http://" << options_.host << ":" << options_.port << "\n";
        server_.listen_after_bind();
        return 0;
    }

    /// Binds an ephemeral port; returns it, or -1.
    int bind_any() { return server_.bind_to_any_port(options_.host); }
    void listen() { server_.listen_after_bind(); }
    void stop() { server_.stop(); }

private:
    using Req = httplib::Request;
    using Res = httplib::Response;

    static void reply(Res& res, int status, const Json& body) {
        res.status = status;
        res.set_content(render_record(body), "application/json");
    }

    static void fail(Res& res, int status, std::string kind, std::string message) {
        reply(res, status, Json{{"error", std::move(kind)}, {"message", std::move(message)}});
    }

    /// Runs `fn`, mapping input errors to 400.
    template <class Fn>
    static void guarded(Res& res, Fn&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            reply(res, e.kind() == ErrorKind::Timeout ? 504 : 400, error_record(e));
        } catch (const Json::exception& e) {
            fail(res, 400, "BadRequest", e.what());
        }
    }

    std::shared_ptr<const SessionStore::Artifacts> model_or_404(const Req& req, Res& res) {
        auto art = store_.find(req.matches[1]);
        if (!art) fail(res, 404, "NotFound", "unknown model '" + std::string(req.matches[1]) + "'");
        return art;
    }

    static Json body_json(const Req& req) { return req.body.empty() ? Json::object() : Json::parse(req.body); }

    /// A list given either as a JSON array or as "a,b".
    static std::optional<std::vector<std::string>> list_field(const Json& j, const char* key) {
        if (!j.contains(key) || j[key].is_null()) return std::nullopt;
        if (j[key].is_string()) return split_list(j[key].get<std::string>());
        return j[key].get<std::vector<std::string>>();
    }

    static C3Mode c3_field(std::string_view s, C3Mode fallback) {
        if (s.empty()) return fallback;
        auto m = parse_c3(s);
        if (!m) throw Error(ErrorKind::Syntax, "unknown c3 mode '" + std::string(s) + "'");
        return *m;
    }

    void install() {
        server_.Post("/models", [this](const Req& req, Res& res) {
            guarded(res, [&] {
                auto added = store_.add(req.body);
                reply(res, 200, model_summary(added.id, added.artifacts->full));
            });
        });

        server_.Get(R"(/models/([0-9a-f]{16})/graph)", [this](const Req& req, Res& res) {
            auto art = model_or_404(req, res);
            if (!art) return;
            guarded(res, [&] {
                const bool reduced = req.get_param_value("reduced") == "true";
                const std::string format = req.has_param("format") ? req.get_param_value("format") : "json";
                if (format != "json" && format != "dot") throw Error(ErrorKind::Syntax, "unknown format '" + format + "'");
                std::string body;
                if (!reduced) {
                    body = format == "dot" ? export_graph(art->full, GraphFormat::Dot, false)
                                           : render_record(graph_to_json(art->full, false));
                } else {
                    ReduceRequest rr;
                    if (req.has_param("coalition")) rr.coalition = split_list(req.get_param_value("coalition"));
                    if (req.has_param("props")) rr.props = split_list(req.get_param_value("props"));
                    rr.c3 = c3_field(req.get_param_value("c3"), C3Mode::Aggressive);
                    Reduction r = reduce(art->full, reduction_params(*art->full.amas, rr));
                    body = format == "dot" ? export_graph(r.marked, GraphFormat::Dot, true)
                                           : render_record(graph_to_json(r.marked, true));
                }
                res.status = 200;
                res.set_content(body, format == "dot" ? "text/vnd.graphviz" : "application/json");
            });
        });

        server_.Post(R"(/models/([0-9a-f]{16})/reduce)", [this](const Req& req, Res& res) {
            auto art = model_or_404(req, res);
            if (!art) return;
            guarded(res, [&] {
                const Json body = body_json(req);
                ReduceRequest rr;
                rr.coalition = list_field(body, "coalition");
                rr.props = list_field(body, "props");
                rr.c3 = c3_field(body.value("c3", std::string()), C3Mode::Safe);
                const Amas& amas = *art->full.amas;
                const ReductionParams params = reduction_params(amas, rr);
                Reduction r = reduce(art->full, params);
                reply(res, 200, reduce_record(amas, params, r.stats, false));
            });
        });

        server_.Post(R"(/models/([0-9a-f]{16})/verify)", [this](const Req& req, Res& res) {
            auto art = model_or_404(req, res);
            if (!art) return;
            guarded(res, [&] {
                const Json body = body_json(req);
                VerifyRequest vr;
                const std::string method = body.value("method", std::string("bruteforce"));
                auto m = parse_method(method);
                if (!m) throw Error(ErrorKind::Syntax, "unknown method '" + method + "'");
                vr.method = *m;
                vr.por = body.value("por", false);
                vr.c3 = c3_field(body.value("c3", std::string()), C3Mode::Safe);
                if (body.contains("formula") && body["formula"].is_string()) vr.formula = body["formula"];
                vr.timeout_s = body.value("timeout", 60.0);
                request_formula(*art->full.amas, vr);  // reject bad formulas up front

                const std::string model_id = req.matches[1];
                const std::string job = content_id(model_id + "|" + vr.key());
                auto run = [art, vr] { return run_verify(art->full, vr, false); };
                if (body.value("wait", true)) {
                    reply(res, 200, store_.result(model_id + "/" + job, run).first);
                } else {
                    store_.start(model_id + "/" + job, run);
                    reply(res, 202, Json{{"job", job}, {"status", "running"}});
                }
            });
        });

        server_.Get(R"(/models/([0-9a-f]{16})/results/([0-9a-f]{16}))", [this](const Req& req, Res& res) {
            const std::string job = req.matches[2];
            auto r = store_.poll(std::string(req.matches[1]) + "/" + job);
            if (!r) return fail(res, 404, "NotFound", "unknown job '" + job + "'");
            if (r->is_null()) return reply(res, 202, Json{{"job", job}, {"status", "running"}});
            reply(res, 200, *r);
        });

        server_.Post("/bisim", [](const Req& req, Res& res) {
            guarded(res, [&] {
                for (const char* field : {"left", "right", "relation"}) {
                    if (!req.has_file(field)) throw Error(ErrorKind::Syntax, std::string("missing form field '") + field + "'");
                }
                BisimRequest br;
                br.left = req.get_file_value("left").content;
                br.right = req.get_file_value("right").content;
                br.relation = req.get_file_value("relation").content;
                if (req.has_file("coalition")) {
                    auto c = split_list(req.get_file_value("coalition").content);
                    if (!c.empty()) br.coalition = std::move(c);
                }
                br.strict = req.has_file("strict") && req.get_file_value("strict").content == "true";
                reply(res, 200, run_bisim(br));
            });
        });

        server_.Get("/stats", [this](const Req&, Res& res) { reply(res, 200, store_.stats()); });

        if (!options_.ui_dir.empty() && !server_.set_mount_point("/", options_.ui_dir)) {
            std::cerr << "ui directory '" << options_.ui_dir << "' not found, serving the API only\n";
        }
    }

    ServeOptions options_;
    SessionStore store_;
    httplib::Server server_;
};

} // namespace stratcheck
