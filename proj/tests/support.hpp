#pragma once

#include "stratcheck/amas.hpp"
#include "stratcheck/model.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#ifndef STRATCHECK_MODELS_DIR
#error "STRATCHECK_MODELS_DIR must point at the fixture directory"
#endif

namespace support {

inline std::filesystem::path fixture_path(const std::string& name) {
    return std::filesystem::path(STRATCHECK_MODELS_DIR) / name;
}

inline std::string fixture(const std::string& name) {
    std::ifstream in(fixture_path(name), std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::shared_ptr<const stratcheck::Amas> amas_of(const std::string& text) {
    return std::make_shared<const stratcheck::Amas>(stratcheck::load_amas(text));
}

inline stratcheck::GlobalModel model_of(const std::string& text) {
    return stratcheck::build_global_model(amas_of(text));
}

/// State id by local tuple, e.g. "G,W,A". Throws if absent or ambiguous.
inline stratcheck::StateId state(const stratcheck::GlobalModel& m, const std::string& locals) {
    std::optional<stratcheck::StateId> hit;
    for (stratcheck::StateId s = 0; s < m.size(); ++s) {
        if (stratcheck::describe_locals(*m.amas, m.states[s]) != locals) continue;
        if (hit) throw std::runtime_error("ambiguous tuple " + locals);
        hit = s;
    }
    if (!hit) throw std::runtime_error("no state " + locals);
    return *hit;
}

inline const char* const kFixtures[] = {"tgc.stv", "tgc_stripped.stv", "tgc_no_train2.stv", "guess.stv", "single.stv"};

} // namespace support
