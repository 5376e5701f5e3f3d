#pragma once

#include <cstdint>

namespace boundlab::harness {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);
int default_threads();

}  // namespace boundlab::harness
