#pragma once

#include <cstdint>

#include "wormnc/platform.hpp"

namespace wormnc {

struct ParamRange {
    std::int64_t lo = 1;
    std::int64_t hi = 1;
};

/// Random configuration generator. `uniform` draws source and destination
/// cores i.i.d. over the grid; `quadrant` draws each flow from one of three
/// corridor families (lower-left to lower-right, lower-right to upper-right,
/// upper-left to upper-right) that concentrate contention.
struct GeneratorSpec {
    enum class Paradigm { Uniform, Quadrant };
    Paradigm paradigm = Paradigm::Uniform;
    int flow_count = 1;
    int width = 8;
    int height = 8;
    ParamRange length{2, 8};
    ParamRange period{100, 400};
    ParamRange burst{1, 1};
    ParamRange jitter{0, 0};
    std::uint64_t seed = 1;
    int vc_count = 1;
    std::int64_t buffer = 1;
    Rat rate{1};
    Rat latency{1};
    int max_retries = 500;
};

/// Deterministic in the seed; regenerates flows that break validation until
/// the whole configuration passes, or throws GenerationExhausted.
Config generate(const GeneratorSpec& spec);

}  // namespace wormnc
