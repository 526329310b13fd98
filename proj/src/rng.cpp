#include "qclock/rng.hpp"

namespace qclock {

namespace {

std::mt19937_64 keyed_engine(const RngStreamKey& key) {
  auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x & 0xffffffffu); };
  auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
  std::seed_seq seq{lo(key.master_seed),   hi(key.master_seed),  lo(key.experiment_id),
                    hi(key.experiment_id), lo(key.sample_index), hi(key.sample_index)};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(const RngStreamKey& key) : key_(key), engine_(keyed_engine(key)) {}

double RngStream::uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double RngStream::normal() {
  return std::normal_distribution<double>(0.0, 1.0)(engine_);
}

}  // namespace qclock
