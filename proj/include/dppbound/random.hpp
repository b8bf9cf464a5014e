#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dppbound {

using Rng = std::mt19937_64;

/// Independent generator for a named sub-stream of a run seed
/// ("synth", "proposal", "retrospective", ...).
Rng make_stream(std::uint64_t seed, std::string_view name);

}  // namespace dppbound
