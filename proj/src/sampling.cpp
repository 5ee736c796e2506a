#include "worm/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>
#include <vector>

namespace worm {

namespace {

constexpr std::array<unsigned, Halton::kMaxDim> kPrimes = {2, 3, 5, 7, 11, 13, 17, 19};
constexpr std::size_t kBlock = 1024;

double radical_inverse(std::size_t i, unsigned base) {
  const double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

unsigned worker_count(std::size_t blocks) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(hw, blocks));
}

void run_blocks(std::size_t blocks, const std::function<void(std::size_t)>& body) {
  const unsigned workers = worker_count(blocks);
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) body(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t b = next++; b < blocks; b = next++) body(b);
    });
  }
  for (auto& t : pool) t.join();
}

template <class Better>
ArgMin reduce(std::size_t n, const std::function<double(std::size_t)>& f,
              double worst, double nan_value, Better better) {
  if (n == 0) return {worst, 0};
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<ArgMin> partial(blocks, ArgMin{worst, 0});
  run_blocks(blocks, [&](std::size_t b) {
    ArgMin best{worst, b * kBlock};
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      double v = f(i);
      if (std::isnan(v)) v = nan_value;
      if (better(v, best.value)) best = {v, i};
    }
    partial[b] = best;
  });
  ArgMin out = partial[0];
  for (std::size_t b = 1; b < blocks; ++b) {
    if (better(partial[b].value, out.value)) out = partial[b];
  }
  return out;
}

}  // namespace

Halton::Halton(std::uint64_t seed) {
  if (seed == 0) return;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& s : shift_) s = u(rng);
}

double Halton::operator()(std::size_t index, unsigned dim) const {
  const double v = radical_inverse(index + 1, kPrimes[dim % kMaxDim]) + shift_[dim % kMaxDim];
  return v - std::floor(v);
}

ArgMin parallel_argmin(std::size_t n, const std::function<double(std::size_t)>& f) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return reduce(n, f, inf, -inf, [](double a, double b) { return a < b; });
}

ArgMin parallel_argmax(std::size_t n, const std::function<double(std::size_t)>& f) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return reduce(n, f, -inf, inf, [](double a, double b) { return a > b; });
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  run_blocks(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) f(i);
  });
}

}  // namespace worm
