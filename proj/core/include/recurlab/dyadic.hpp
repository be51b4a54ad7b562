#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "big_real.hpp"
#include "rng.hpp"

namespace recurlab
{
/*!
 * Binary expansion 0.b1 b2 b3 ... of a dyadic rational in [0, 1).
 *
 * Under the doubling map f^j shifts the expansion left by j bits, so orbit
 * points are windows into one bit string. Bits past size() are zero.
 */
class DyadicStream
{
  public:
    static DyadicStream random(SampleEngine& engine, std::size_t bits);
    //! From a literal like "1010"; characters other than 0/1 are rejected.
    static DyadicStream from_bits(std::string_view bits);
    //! Leading \c bits of x in [0, 1), truncated.
    static DyadicStream from_real(BigReal const& x, std::size_t bits);

    std::size_t size() const noexcept { return size_; }
    bool bit(std::size_t offset) const;

    //! \c width (<= 64) bits starting at \c offset; out_of_range past the end.
    std::uint64_t window(std::size_t offset, unsigned width) const;
    //! 64 bits starting at \c offset, zero-padded past the end.
    std::uint64_t window64(std::size_t offset) const noexcept;

    //! Exact value at precision max(size, 2).
    BigReal to_real() const;
    //! f^j(x) exactly, at precision max(size, 2).
    BigReal shifted_real(std::size_t j) const;

  private:
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

//! Spec-level name for DyadicStream::window.
inline std::uint64_t dyadic_window(DyadicStream const& s, std::size_t offset, unsigned width)
{
    return s.window(offset, width);
}

}  // namespace recurlab
