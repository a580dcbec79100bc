#pragma once

#include <string>

#include "wormnc/platform.hpp"

namespace wormnc::testing {

inline std::string fixture_dir() {
#ifdef WORMNC_FIXTURE_DIR
    const char* env = std::getenv("WORMNC_FIXTURE_DIR");
    return env ? env : WORMNC_FIXTURE_DIR;
#else
    const char* env = std::getenv("WORMNC_FIXTURE_DIR");
    return env ? env : "fixtures";
#endif
}

inline Config load_fixture(const std::string& name) {
    return load_config(fixture_dir() + "/" + name);
}

inline NodeId node(int x, int y, Port p) { return NodeId{x, y, p}; }

}  // namespace wormnc::testing
