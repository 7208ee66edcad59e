#include "exotest/random.hpp"

namespace exotest {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

inline PhiloxCounter round(const PhiloxCounter& c, const PhiloxKey& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, c[0], hi0, lo0);
  mulhilo(kMul1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    counter = round(counter, key);
  }
  return counter;
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept {
  return splitmix64(seed ^ splitmix64(value));
}

UniformStream::UniformStream(const StreamId& id, std::uint32_t item) noexcept {
  std::uint64_t k = hash_combine(id.seed, static_cast<std::uint64_t>(id.domain));
  k = hash_combine(k, id.group);
  k = hash_combine(k, id.attempt);
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  counter_ = {0u, item, static_cast<std::uint32_t>(id.replicate),
              static_cast<std::uint32_t>(id.replicate >> 32)};
}

double UniformStream::next() noexcept {
  if (buffered_ == 0) {
    const PhiloxCounter block = philox4x32_10(counter_, key_);
    ++counter_[0];
    buffer_ = {to_unit(block[0], block[1]), to_unit(block[2], block[3])};
    buffered_ = 2;
  }
  return buffer_[2 - buffered_--];
}

double UniformStream::next_open() noexcept {
  const double u = next();
  return u == 0.0 ? 0x1.0p-54 : u;
}

}  // namespace exotest
