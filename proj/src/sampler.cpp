#include "svarid/sampler.hpp"

#include <cmath>
#include <random>

#include "svarid/error.hpp"

namespace svarid {

namespace {

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t draw_seed(std::uint64_t base_seed, std::uint64_t index) { return mix(mix(base_seed) ^ mix(~index)); }

ReducedFormParams draw_reduced_form(const SamplerConfig& cfg, std::uint64_t index) {
  if (!(cfg.diag_floor > 0.0)) throw Error(Errc::InvalidArgument, "sampler: diag_floor must be positive");
  if (!(cfg.scale > 0.0)) throw Error(Errc::InvalidArgument, "sampler: scale must be positive");
  const int n = cfg.dims.n;
  const int m = cfg.dims.m();

  std::mt19937_64 rng(draw_seed(cfg.seed, index));
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix l = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) l(i, j) = normal(rng) * cfg.scale;
    l(i, i) = std::abs(normal(rng)) * cfg.scale + cfg.diag_floor;
  }
  Matrix b(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = normal(rng) * cfg.scale;

  Matrix sigma = l * l.transpose();
  sigma = 0.5 * (sigma + sigma.transpose()).eval();
  return ReducedFormParams(cfg.dims, std::move(b), std::move(sigma));
}

}  // namespace svarid
