#pragma once

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <stdexcept>
#include <string>

#ifndef STRATCHECK_CLI
#error "STRATCHECK_CLI must point at the stratcheck binary"
#endif

namespace support {

struct CliRun {
    int code = -1;
    std::string out;  // stdout only
};

/// Runs the CLI with `args` (shell words), stderr discarded.
inline CliRun run_cli(const std::string& args) {
    const std::string cmd = std::string("'") + STRATCHECK_CLI + "' " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    CliRun r;
    std::array<char, 4096> buf{};
    for (std::size_t n; (n = fread(buf.data(), 1, buf.size(), pipe)) > 0;) r.out.append(buf.data(), n);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

inline std::string quoted(const std::string& s) { return "'" + s + "'"; }

} // namespace support
