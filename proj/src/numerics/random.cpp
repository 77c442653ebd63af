#include "mfqp/numerics/random.hpp"

#include "mfqp/error.hpp"

#include <cmath>
#include <numbers>

namespace mfqp {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo)
{
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::uint64_t splitmix64(std::uint64_t z) noexcept
{
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// 53-bit uniform in (0, 1): never returns 0, so log() below is safe.
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo)
{
  const std::uint64_t bits =
    ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::array<std::uint32_t, 4> block(const RandomStream& rs, std::uint64_t index)
{
  const std::array<std::uint32_t, 4> ctr{
    static_cast<std::uint32_t>(index),
    static_cast<std::uint32_t>(index >> 32),
    static_cast<std::uint32_t>(rs.stream_id),
    static_cast<std::uint32_t>(rs.stream_id >> 32)};
  const std::array<std::uint32_t, 2> key{
    static_cast<std::uint32_t>(rs.seed),
    static_cast<std::uint32_t>(rs.seed >> 32)};
  return philox4x32_10(ctr, key);
}

} // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> c,
                                            std::array<std::uint32_t, 2> k) noexcept
{
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

RandomStream RandomStream::substream(std::uint64_t i) const noexcept
{
  return {seed, splitmix64(stream_id ^ splitmix64(i + 1))};
}

std::vector<double> uniform_stream(const RandomStream& rs, std::size_t count)
{
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; i += 2) {
    const auto b = block(rs, i / 2);
    out[i] = to_open_unit(b[0], b[1]);
    if (i + 1 < count)
      out[i + 1] = to_open_unit(b[2], b[3]);
  }
  return out;
}

void fill_gaussian(const RandomStream& rs, std::span<double> out)
{
  const std::size_t count = out.size();
  for (std::size_t i = 0; i < count; i += 2) {
    const auto b = block(rs, i / 2);
    const double u1 = to_open_unit(b[0], b[1]);
    const double u2 = to_open_unit(b[2], b[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    out[i] = r * std::cos(theta);
    if (i + 1 < count)
      out[i + 1] = r * std::sin(theta);
  }
}

std::vector<double> gaussian_stream(const RandomStream& rs, std::size_t count)
{
  if (count == 0)
    throw Error(ErrorCode::invalid_params, "gaussian_stream needs count >= 1");
  std::vector<double> out(count);
  fill_gaussian(rs, out);
  return out;
}

} // namespace mfqp
