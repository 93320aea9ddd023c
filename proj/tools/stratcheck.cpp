// stratcheck command line: verify, reduce, bisim, export, bench, serve.

#include "stratcheck/benchmark.hpp"
#include "stratcheck/http.hpp"
#include "stratcheck/service.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace stratcheck;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

GlobalModel load_model(const std::string& path) {
    return build_global_model(std::make_shared<const Amas>(load_amas(read_file(path))));
}

struct Options {
    std::string spec;
    std::string right;
    std::string relation;
    std::string method = "bruteforce";
    bool por = false;
    std::string coalition;
    std::string props;
    std::string c3 = "safe";
    bool strict = false;
    double timeout = 60.0;
    std::string format;
    bool timing = false;
    std::string out;
    int n = 2;
    std::string family = "tgc";
    bool stats = false;
    bool reduced = false;
    ServeOptions serve;
};

C3Mode c3_of(const Options& o) {
    auto m = parse_c3(o.c3);
    if (!m) throw Error(ErrorKind::Syntax, "unknown c3 mode '" + o.c3 + "'");
    return *m;
}

ReduceRequest reduce_request(const Options& o) {
    ReduceRequest rr;
    if (!o.coalition.empty()) rr.coalition = split_list(o.coalition);
    if (!o.props.empty()) rr.props = split_list(o.props);
    rr.c3 = c3_of(o);
    return rr;
}

GraphFormat format_of(const std::string& f) {
    if (f == "dot") return GraphFormat::Dot;
    if (f == "json") return GraphFormat::Json;
    throw Error(ErrorKind::Syntax, "unknown format '" + f + "'");
}

std::string graph_text(const GlobalModel& m, GraphFormat f, bool highlight) {
    return f == GraphFormat::Json ? render_record(graph_to_json(m, highlight)) : export_graph(m, f, highlight);
}

int cmd_verify(const Options& o) {
    GlobalModel full = load_model(o.spec);
    VerifyRequest vr;
    auto m = parse_method(o.method);
    if (!m) throw Error(ErrorKind::Syntax, "unknown method '" + o.method + "'");
    vr.method = *m;
    vr.por = o.por;
    vr.c3 = c3_of(o);
    vr.timeout_s = o.timeout;
    Json record = run_verify(full, vr, o.timing);
    std::cout << render_record(record);
    return exit_code_for(record);
}

int cmd_reduce(const Options& o) {
    GlobalModel full = load_model(o.spec);
    const ReductionParams params = reduction_params(*full.amas, reduce_request(o));
    Reduction r = reduce(full, params);
    std::cout << reduction_summary(r.stats) << "\n" << render_record(reduce_record(*full.amas, params, r.stats, o.timing));
    if (!o.out.empty()) {
        const GraphFormat f = format_of(o.format.empty() ? "dot" : o.format);
        const std::string ext = f == GraphFormat::Dot ? ".dot" : ".json";
        std::filesystem::create_directories(o.out);
        write_file(std::filesystem::path(o.out) / ("full" + ext), graph_text(r.marked, f, true));
        write_file(std::filesystem::path(o.out) / ("reduced" + ext), graph_text(r.reduced.model, f, false));
    }
    return 0;
}

int cmd_bisim(const Options& o) {
    BisimRequest br;
    br.left = read_file(o.spec);
    br.right = read_file(o.right);
    br.relation = read_file(o.relation);
    if (!o.coalition.empty()) br.coalition = split_list(o.coalition);
    br.strict = o.strict;
    Json verdict = run_bisim(br);
    std::cout << render_record(verdict);
    return verdict.at("ok").get<bool>() ? 0 : 1;
}

int cmd_export(const Options& o) {
    GlobalModel full = load_model(o.spec);
    const GraphFormat f = format_of(o.format.empty() ? "dot" : o.format);
    if (!o.reduced) {
        std::cout << graph_text(full, f, false);
        return 0;
    }
    Reduction r = reduce(full, reduction_params(*full.amas, reduce_request(o)));
    std::cout << graph_text(r.marked, f, true);
    return 0;
}

int cmd_bench(const Options& o) {
    const std::string text = generate_benchmark({o.family, o.n});
    if (!o.stats) {
        std::cout << text;
        return 0;
    }
    GlobalModel full = build_global_model(std::make_shared<const Amas>(load_amas(text)));
    ReduceRequest rr;
    rr.c3 = c3_of(o);
    const ReductionParams params = reduction_params(*full.amas, rr);
    Reduction r = reduce(full, params);
    VerifyRequest vr;
    auto m = parse_method(o.method);
    if (!m) throw Error(ErrorKind::Syntax, "unknown method '" + o.method + "'");
    vr.method = *m;
    vr.por = o.por;
    vr.c3 = rr.c3;
    vr.timeout_s = o.timeout;
    Json record{{"family", o.family},
                {"n", o.n},
                {"reduction", reduce_record(*full.amas, params, r.stats, o.timing)},
                {"verify", run_verify(full, vr, o.timing)}};
    std::cout << render_record(record);
    return exit_code_for(record["verify"]);
}

HttpService* g_service = nullptr;

int cmd_serve(const Options& o) {
    HttpService service(o.serve);
    g_service = &service;
    std::signal(SIGINT, [](int) {
        if (g_service) g_service->stop();
    });
    std::signal(SIGTERM, [](int) {
        if (g_service) g_service->stop();
    });
    int code = service.run();
    g_service = nullptr;
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Strategic ability checking for asynchronous multi-agent systems"};
    app.require_subcommand(1);
    Options o;

    auto common_reduction = [&](CLI::App* c) {
        c->add_option("--coalition", o.coalition, "Coalition override, a,b");
        c->add_option("--props", o.props, "Visible propositions override, p,q");
        c->add_option("--c3", o.c3, "Cycle proviso")->check(CLI::IsMember({"safe", "aggressive"}));
    };

    auto* verify = app.add_subcommand("verify", "Verify the spec's formula");
    verify->add_option("spec", o.spec, "Specification file")->required();
    verify->add_option("--method", o.method, "Engine")->check(CLI::IsMember({"bruteforce", "approx", "dfs"}));
    verify->add_flag("--por", o.por, "Verify on the reduced model");
    verify->add_option("--c3", o.c3, "Cycle proviso for --por")->check(CLI::IsMember({"safe", "aggressive"}));
    verify->add_option("--timeout", o.timeout, "Wall-clock budget in seconds");
    verify->add_flag("--timing", o.timing, "Include wall times in the record");

    auto* reduce_cmd = app.add_subcommand("reduce", "Partial-order reduction statistics and graphs");
    reduce_cmd->add_option("spec", o.spec, "Specification file")->required();
    common_reduction(reduce_cmd);
    reduce_cmd->add_option("--out", o.out, "Directory for full/reduced graph exports");
    reduce_cmd->add_option("--format", o.format, "Graph format")->check(CLI::IsMember({"dot", "json"}));
    reduce_cmd->add_flag("--timing", o.timing, "Include wall times in the record");

    auto* bisim = app.add_subcommand("bisim", "Check a candidate A-bisimulation");
    bisim->add_option("left", o.spec, "Left specification")->required();
    bisim->add_option("right", o.right, "Right specification")->required();
    bisim->add_option("relation", o.relation, "Relation file")->required();
    bisim->add_option("--coalition", o.coalition, "Coalition, a,b");
    bisim->add_flag("--strict-bisim", o.strict, "Match joint choices across related states");

    auto* exp = app.add_subcommand("export", "Export the global model");
    exp->add_option("spec", o.spec, "Specification file")->required();
    exp->add_option("--format", o.format, "Graph format")->check(CLI::IsMember({"dot", "json"}));
    exp->add_flag("--reduced", o.reduced, "Flag the reduced part");
    common_reduction(exp);

    auto* bench = app.add_subcommand("bench", "Generate a parameterized benchmark");
    bench->add_option("--n", o.n, "Number of trains")->check(CLI::PositiveNumber);
    bench->add_option("--family", o.family, "Benchmark family")->check(CLI::IsMember({"tgc"}));
    bench->add_flag("--stats", o.stats, "Build, reduce and verify instead of printing the spec");
    bench->add_option("--method", o.method, "Engine for --stats")->check(CLI::IsMember({"bruteforce", "approx", "dfs"}));
    bench->add_flag("--por", o.por, "Verify on the reduced model");
    bench->add_option("--c3", o.c3, "Cycle proviso")->check(CLI::IsMember({"safe", "aggressive"}));
    bench->add_option("--timeout", o.timeout, "Wall-clock budget in seconds");
    bench->add_flag("--timing", o.timing, "Include wall times in the record");

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--port", o.serve.port, "Port");
    serve->add_option("--host", o.serve.host, "Host");
    serve->add_option("--ui", o.serve.ui_dir, "Directory of built UI assets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : exit_code::kInput;
    }

    try {
        if (*verify) return cmd_verify(o);
        if (*reduce_cmd) return cmd_reduce(o);
        if (*bisim) return cmd_bisim(o);
        if (*exp) return cmd_export(o);
        if (*bench) return cmd_bench(o);
        if (*serve) return cmd_serve(o);
    } catch (const Error& e) {
        std::cerr << "stratcheck: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "stratcheck: " << e.what() << "\n";
        return exit_code::kInput;
    }
    return exit_code::kInput;
}
