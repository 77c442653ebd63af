#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace mfqp {

//! Philox4x32-10 counter-based bijection (Salmon et al., Random123).
//! Stateless: output depends only on (counter, key).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key) noexcept;

//! Immutable descriptor of a reproducible random sequence. The seed is the
//! Philox key; stream_id occupies the high half of the counter, so distinct
//! ids address disjoint blocks of the same bijection.
struct RandomStream
{
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  //! Derived stream for the i-th member of an ensemble built on this one.
  RandomStream substream(std::uint64_t i) const noexcept;

  friend bool operator==(const RandomStream&, const RandomStream&) = default;
};

//! Uniform doubles in the open interval (0, 1), 53-bit resolution.
std::vector<double> uniform_stream(const RandomStream& rs, std::size_t count);

//! i.i.d. N(0, 1) draws via Box-Muller on consecutive Philox blocks.
std::vector<double> gaussian_stream(const RandomStream& rs, std::size_t count);

//! In-place variant: fills `out` with the first out.size() draws.
void fill_gaussian(const RandomStream& rs, std::span<double> out);

} // namespace mfqp
