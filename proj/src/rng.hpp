#pragma once

#include <cstdint>
#include <random>

namespace sculptor {

using Rng = std::mt19937_64;

// Independent uses of a single seed draw from distinct streams so that, e.g.,
// random restarts never perturb the background sample of the same trial.
enum class Stream : std::uint64_t {
  Background = 1,
  Restart = 2,
  Calibrate = 3,
};

// Generator for (seed, stream, block). Blocks let sample generation be split
// across threads while staying bit-identical to a serial run.
Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t block = 0);

}  // namespace sculptor
