#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace signrec {

// Deterministic splittable random stream.
//
// A stream is identified by a master seed plus a path of child ids.  The path
// is absorbed into a 64-bit key with splitmix64-style mixing and the key
// expands into xoshiro256++ state.  Two streams with the same (seed, path)
// produce identical output on every platform, compiler and thread schedule,
// which is what makes reruns byte-identical: work items are addressed by
// child id, never by draw order across threads.
//
// All samplers are implemented here (no std::*_distribution) because the
// standard distributions are implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed);

  // Derived stream for work item `id`.  Independent of draws made on the
  // parent before or after the call.
  RngStream child(std::uint64_t id) const;

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01();

  // Uniform integer on [0, bound).  bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound);

  // Standard normal via the Marsaglia polar method (caches the spare value).
  double normal();

  void fill_normal(double* out, std::size_t count);

  std::uint64_t master_seed() const { return master_seed_; }

 private:
  RngStream(std::uint64_t master_seed, std::uint64_t key);

  std::uint64_t master_seed_ = 0;
  std::uint64_t key_ = 0;
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace signrec
