#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace exotest {

// Categorical level code. Codes are opaque labels; only equality matters,
// the ordering is used for deterministic iteration.
using Level = std::int32_t;

inline constexpr Level kAnyLevel = -1;

// One right-censored observation: follow-up y = min(T, C), delta = 1 if T was
// observed, and the covariate (x), instrument (w) and treatment (z) codes.
struct Observation {
  double y = 0.0;
  int delta = 0;
  Level x = 0;
  Level w = 0;
  Level z = 0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

// A categorical cell. Coordinates not used by a stratification scheme hold
// kAnyLevel, e.g. (x, *, z) for the duration fit.
struct Cell {
  Level x = kAnyLevel;
  Level w = kAnyLevel;
  Level z = kAnyLevel;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

std::string to_string(const Cell& cell);

enum class Scheme { kXZ, kXW, kXWZ };

Cell cell_of(const Observation& obs, Scheme scheme);

// Immutable, validated sample. Level sets hold the distinct codes present.
class Dataset {
public:
  // Throws std::invalid_argument when the observations break an invariant
  // (empty, y <= 0 or non-finite, delta outside {0,1}, negative code).
  explicit Dataset(std::vector<Observation> observations);

  std::size_t size() const noexcept { return observations_.size(); }
  std::span<const Observation> observations() const noexcept { return observations_; }
  const Observation& operator[](std::size_t i) const { return observations_[i]; }

  const std::vector<Level>& levels_x() const noexcept { return levels_x_; }
  const std::vector<Level>& levels_w() const noexcept { return levels_w_; }
  const std::vector<Level>& levels_z() const noexcept { return levels_z_; }

  double censoring_rate() const noexcept;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.observations_ == b.observations_;
  }

private:
  std::vector<Observation> observations_;
  std::vector<Level> levels_x_;
  std::vector<Level> levels_w_;
  std::vector<Level> levels_z_;
};

// Parses `y,delta,x,w,z` CSV. Extra trailing columns are accepted and ignored
// (so simulated files carrying a latent column read back). Throws ParseError.
Dataset parse_csv(std::string_view text);
Dataset read_csv_file(const std::string& path);

// Inverse of parse_csv; doubles are written in shortest round-trip form.
std::string to_csv(const Dataset& data);

struct CellSummary {
  Cell cell;
  std::size_t count = 0;
  double censoring_rate = 0.0;
};

// Per nonempty (x,w,z) cell, in cell order. Empty cells are omitted.
using CellTable = std::vector<CellSummary>;

CellTable cell_audit(const Dataset& data);
std::string to_csv(const CellTable& table);

inline constexpr std::size_t kDefaultMinCellCount = 5;

// Nonempty (x,*,z) and (x,w,z) cells with fewer than `threshold` rows.
std::vector<CellSummary> min_cell_check(const Dataset& data, std::size_t threshold);

// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

}  // namespace exotest
