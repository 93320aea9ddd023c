#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stratcheck {

enum class ErrorKind {
    Syntax,
    DuplicateDeclaration,
    UnknownReference,
    NestedModality,
    ArityMismatch,
    UnknownLocalState,
    PersistentCleared,
    EmptyAgent,
    NotEnabled,
    StateLimitExceeded,
    StrategySpaceExceeded,
    Timeout,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::DuplicateDeclaration: return "DuplicateDeclaration";
    case ErrorKind::UnknownReference: return "UnknownReference";
    case ErrorKind::NestedModality: return "NestedModality";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::UnknownLocalState: return "UnknownLocalState";
    case ErrorKind::PersistentCleared: return "PersistentClearedError";
    case ErrorKind::EmptyAgent: return "EmptyAgent";
    case ErrorKind::NotEnabled: return "NotEnabled";
    case ErrorKind::StateLimitExceeded: return "StateLimitExceeded";
    case ErrorKind::StrategySpaceExceeded: return "StrategySpaceExceeded";
    case ErrorKind::Timeout: return "Timeout";
    }
    return "Error";
}

/// 1-based line/column inside a source text. Line 0 means "no position".
struct SourcePos {
    std::size_t line = 0;
    std::size_t column = 0;

    friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

/// Every failure raised by the library. Parse-level failures carry the
/// position of the offending token.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message, SourcePos pos = {})
        : std::runtime_error(format(kind, message, pos)), kind_(kind), pos_(pos), message_(std::move(message)) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] const SourcePos& pos() const noexcept { return pos_; }
    [[nodiscard]] const std::string& message() const noexcept { return message_; }

private:
    static std::string format(ErrorKind kind, const std::string& message, SourcePos pos) {
        std::string out{to_string(kind)};
        if (pos.line != 0) {
            out += " at " + std::to_string(pos.line) + ":" + std::to_string(pos.column);
        }
        out += ": " + message;
        return out;
    }

    ErrorKind kind_;
    SourcePos pos_;
    std::string message_;
};

} // namespace stratcheck
