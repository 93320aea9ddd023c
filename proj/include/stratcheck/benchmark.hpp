#pragma once

#include "stratcheck/error.hpp"

#include <string>

namespace stratcheck {

struct BenchmarkParams {
    std::string family = "tgc";
    int n = 2;
};

namespace detail {

/// Action prefix of train i (1-based): a, b, ..., z, then t27_, t28_, ...
inline std::string train_prefix(int i) {
    if (i <= 26) return std::string(1, static_cast<char>('a' + i - 1));
    return "t" + std::to_string(i) + "_";
}

} // namespace detail

/// Trains, gate and controller with `n` trains. Train i cycles
/// W -> T -> A -> W; entering the tunnel (action <p>1) and leaving it (<p>2)
/// synchronise with the controller, which lets one train in at a time.
/// The formula states mutual exclusion in the tunnel.
inline std::string generate_tgc(int n) {
    if (n < 1) throw Error(ErrorKind::Syntax, "number of trains must be at least 1");
    std::string out = "AGENT Controller:\n  INIT: G\n";
    for (int i = 1; i <= n; ++i) out += "  G -> R : " + detail::train_prefix(i) + "1\n";
    for (int i = 1; i <= n; ++i) out += "  R -> G : " + detail::train_prefix(i) + "2\n";
    for (int i = 1; i <= n; ++i) {
        const std::string p = detail::train_prefix(i);
        const std::string in = "in" + std::to_string(i);
        out += "AGENT Train" + std::to_string(i) + ":\n  INIT: W\n";
        out += "  W -> T : " + p + "1 [SET " + in + "=true]\n";
        out += "  T -> A : " + p + "2 [SET " + in + "=false]\n";
        out += "  A -> W : " + p + "3\n";
    }
    out += "PROPOSITIONS: ";
    for (int i = 1; i <= n; ++i) out += (i > 1 ? ", in" : "in") + std::to_string(i);
    out += "\nFORMULA: <<Controller>> G ";
    if (n == 1) {
        out += "true";
    } else {
        std::string clash;
        for (int i = 1; i <= n; ++i) {
            for (int j = i + 1; j <= n; ++j) {
                if (!clash.empty()) clash += " | ";
                clash += "in" + std::to_string(i) + " & in" + std::to_string(j);
            }
        }
        out += "!(" + clash + ")";
    }
    out += "\n";
    return out;
}

inline std::string generate_benchmark(const BenchmarkParams& params) {
    if (params.family != "tgc") throw Error(ErrorKind::Syntax, "unknown benchmark family '" + params.family + "'");
    return generate_tgc(params.n);
}

} // namespace stratcheck
