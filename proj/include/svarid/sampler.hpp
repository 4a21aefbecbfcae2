#pragma once

#include <cstdint>

#include "svarid/svar_core.hpp"

namespace svarid {

/// Absolutely continuous law over reduced-form points: Sigma = L L' with
/// L lower triangular, diag(L) = |N(0,1)| * scale + diag_floor, strictly
/// lower entries N(0,1) * scale, and B entries N(0,1) * scale.
struct SamplerConfig {
  ModelDims dims;
  double diag_floor = 0.1;
  double scale = 1.0;
  std::uint64_t seed = 0;
};

/// Seed of the independent stream used for draw `index`.
std::uint64_t draw_seed(std::uint64_t base_seed, std::uint64_t index);

/// Deterministic in (cfg.seed, index); draws with different indices use
/// independent streams, so they can be generated in any order.
ReducedFormParams draw_reduced_form(const SamplerConfig& cfg, std::uint64_t index);

}  // namespace svarid
