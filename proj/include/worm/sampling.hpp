#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace worm {

/// Randomly shifted Halton sequence (Cranley-Patterson rotation); the shift
/// is a pure function of the seed, so every stream is reproducible.
class Halton {
 public:
  static constexpr unsigned kMaxDim = 8;

  explicit Halton(std::uint64_t seed = 0);
  /// Coordinate `dim` of point `index`, in [0, 1).
  double operator()(std::size_t index, unsigned dim) const;

 private:
  std::array<double, kMaxDim> shift_{};
};

inline constexpr std::uint64_t kDefaultSeed = 20170101;

struct ArgMin {
  double value;
  std::size_t index;
};

using ArgMax = ArgMin;

/// Minimum of f over [0, n) computed over fixed blocks on a thread pool and
/// reduced in block order; the result (value and lowest argmin) does not
/// depend on the number of threads. NaN counts as -infinity.
ArgMin parallel_argmin(std::size_t n, const std::function<double(std::size_t)>& f);

/// Maximum, same reduction rules (NaN counts as +infinity).
ArgMin parallel_argmax(std::size_t n, const std::function<double(std::size_t)>& f);

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace worm
