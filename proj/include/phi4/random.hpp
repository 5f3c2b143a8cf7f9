#pragma once

// Counter-based Gaussian source. Every draw is a pure function of
// (seed, tag, replica, step, draw index), so replicas can be generated in any
// order or on any thread without changing a single bit of output.

#include <array>
#include <cstdint>

namespace phi4 {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

/// Purpose tags keep independent uses of one seed apart.
enum class StreamTag : std::uint32_t {
  kNoise = 0,
  kInitialData = 1,
  kSynthetic = 2,
  kBootstrap = 3,
};

class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint32_t replica, StreamTag tag = StreamTag::kNoise)
      : seed_(seed), replica_(replica), tag_(tag) {}

  /// A stream whose every Gaussian draw is exactly zero.
  static NoiseStream silent() {
    NoiseStream s(0, 0);
    s.silent_ = true;
    return s;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint32_t replica() const { return replica_; }
  StreamTag tag() const { return tag_; }
  std::uint32_t step() const { return step_; }
  bool is_silent() const { return silent_; }

  NoiseStream at_step(std::uint32_t step) const {
    NoiseStream s = *this;
    s.step_ = step;
    return s;
  }
  NoiseStream with_tag(StreamTag tag) const {
    NoiseStream s = *this;
    s.tag_ = tag;
    return s;
  }
  void advance() { ++step_; }

  /// Two independent standard normals keyed by (step, draw).
  std::array<double, 2> normal_pair(std::uint32_t draw) const;
  /// Two independent uniforms on (0, 1] keyed by (step, draw).
  std::array<double, 2> uniform_pair(std::uint32_t draw) const;

 private:
  PhiloxCounter counter(std::uint32_t draw) const {
    return {draw, step_, replica_, static_cast<std::uint32_t>(tag_)};
  }
  PhiloxKey key() const { return {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)}; }

  std::uint64_t seed_;
  std::uint32_t replica_;
  StreamTag tag_;
  std::uint32_t step_ = 0;
  bool silent_ = false;
};

}  // namespace phi4
