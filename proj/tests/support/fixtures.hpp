#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "exotest/dataset.hpp"

namespace fixture {

struct CellSpec {
  exotest::Level x, w, z;
  std::size_t count;
  double censoring_rate;
};

// Cell sizes and censoring shares of a job-training evaluation sample
// (x = diploma status, w = random assignment, z = participation).
inline constexpr std::array<CellSpec, 8> kJtpaCells = {{
    {0, 0, 0, 171, 0.895},
    {0, 0, 1, 32, 0.906},
    {1, 0, 0, 141, 0.908},
    {1, 0, 1, 22, 0.909},
    {0, 1, 0, 152, 0.875},
    {0, 1, 1, 255, 0.906},
    {1, 1, 0, 126, 0.873},
    {1, 1, 1, 228, 0.899},
}};

inline std::size_t censored_count(const CellSpec& c) {
  return static_cast<std::size_t>(std::lround(c.censoring_rate * static_cast<double>(c.count)));
}

// Synthetic data with exactly the cell structure above. Durations are
// exponential with a cell-dependent scale; censored rows get a time below
// the administrative horizon.
inline exotest::Dataset jtpa_like(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  std::vector<exotest::Observation> rows;
  for (const auto& c : kJtpaCells) {
    const std::size_t censored = censored_count(c);
    const double scale = 200.0 + 40.0 * c.x - 30.0 * c.z;
    for (std::size_t i = 0; i < c.count; ++i) {
      exotest::Observation o;
      o.x = c.x;
      o.w = c.w;
      o.z = c.z;
      o.delta = i < censored ? 0 : 1;
      o.y = std::ceil(-scale * std::log(uniform()));
      if (o.delta == 0) o.y = std::ceil(uniform() * 600.0);
      rows.push_back(o);
    }
  }
  std::shuffle(rows.begin(), rows.end(), rng);
  return exotest::Dataset(std::move(rows));
}

// The six-row instance with two treatment levels whose ranks, rank CDFs, D
// surface and statistics are worked out by hand in the tests.
inline exotest::Dataset six_rows() {
  return exotest::Dataset({
      {1, 1, 0, 0, 0},
      {2, 0, 0, 1, 0},
      {3, 1, 0, 0, 0},
      {1, 1, 0, 0, 1},
      {2, 1, 0, 1, 1},
      {3, 1, 0, 1, 1},
  });
}

inline exotest::Dataset random_dataset(std::mt19937_64& rng, std::size_t n, bool censoring,
                                       int levels = 2, bool ties = false) {
  std::uniform_int_distribution<int> level(0, levels - 1);
  std::uniform_int_distribution<int> coin(0, 3);
  std::uniform_int_distribution<int> tick(1, 8);
  std::exponential_distribution<double> expo(1.0);
  std::vector<exotest::Observation> rows;
  for (std::size_t i = 0; i < n; ++i) {
    exotest::Observation o;
    o.x = level(rng);
    o.w = level(rng);
    o.z = level(rng);
    o.y = ties ? tick(rng) : 0.01 + expo(rng);
    o.delta = censoring && coin(rng) == 0 ? 0 : 1;
    rows.push_back(o);
  }
  return exotest::Dataset(std::move(rows));
}

}  // namespace fixture
