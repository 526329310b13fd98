#pragma once

#include <cstdint>
#include <random>

namespace qclock {

// Identifies one independent random stream. Streams are derived from the key
// alone, so sample i draws the same numbers whichever worker runs it.
struct RngStreamKey {
  std::uint64_t master_seed = 0;
  std::uint64_t experiment_id = 0;
  std::uint64_t sample_index = 0;
};

// Experiment identifiers used to separate streams of different drivers that
// share a master seed.
namespace experiment_ids {
inline constexpr std::uint64_t kC3MonteCarlo = 1;
inline constexpr std::uint64_t kTimeBasisChain = 2;
inline constexpr std::uint64_t kKrausChain = 3;
inline constexpr std::uint64_t kWaveform = 4;
inline constexpr std::uint64_t kScaledProcess = 5;
inline constexpr std::uint64_t kDampingAverage = 6;
}  // namespace experiment_ids

class RngStream {
 public:
  explicit RngStream(const RngStreamKey& key);

  double uniform();  // [0, 1)
  double normal();   // standard normal
  std::mt19937_64& engine() { return engine_; }
  const RngStreamKey& key() const { return key_; }

 private:
  RngStreamKey key_;
  std::mt19937_64 engine_;
};

}  // namespace qclock
