#include "recurlab/dyadic.hpp"

#include <stdexcept>
#include <string>

#include "recurlab/errors.hpp"

namespace recurlab
{
namespace
{
void mask_tail(std::vector<std::uint64_t>& words, std::size_t bits)
{
    if (bits % 64 != 0 && !words.empty())
    {
        words.back() &= ~std::uint64_t{0} << (64 - bits % 64);
    }
}
}  // namespace

DyadicStream DyadicStream::random(SampleEngine& engine, std::size_t bits)
{
    DyadicStream s;
    s.size_ = bits;
    s.words_ = random_words(engine, (bits + 63) / 64);
    mask_tail(s.words_, bits);
    return s;
}

DyadicStream DyadicStream::from_bits(std::string_view bits)
{
    DyadicStream s;
    s.size_ = bits.size();
    s.words_.assign((bits.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
    {
        if (bits[i] != '0' && bits[i] != '1')
        {
            throw ContractError("bit literal may only contain 0 and 1");
        }
        if (bits[i] == '1')
        {
            s.words_[i / 64] |= std::uint64_t{1} << (63 - i % 64);
        }
    }
    return s;
}

DyadicStream DyadicStream::from_real(BigReal const& x, std::size_t bits)
{
    if (mpfr_sgn(x.get()) < 0 || mpfr_cmp_ui(x.get(), 1) >= 0)
    {
        throw DomainError("dyadic stream needs x in [0, 1)");
    }
    DyadicStream s;
    s.size_ = bits;
    s.words_.assign((bits + 63) / 64, 0);
    BigReal rest(static_cast<mpfr_prec_t>(std::max<std::size_t>(x.precision(), 64)));
    mpfr_set(rest.get(), x.get(), MPFR_RNDN);
    for (auto& w : s.words_)
    {
        mpfr_mul_2ui(rest.get(), rest.get(), 64, MPFR_RNDN);
        w = mpfr_get_uj(rest.get(), MPFR_RNDZ);
        mpfr_frac(rest.get(), rest.get(), MPFR_RNDN);
    }
    mask_tail(s.words_, bits);
    return s;
}

bool DyadicStream::bit(std::size_t offset) const
{
    if (offset >= size_)
    {
        throw std::out_of_range("dyadic bit offset past end of stream");
    }
    return (words_[offset / 64] >> (63 - offset % 64)) & 1U;
}

std::uint64_t DyadicStream::window64(std::size_t offset) const noexcept
{
    std::size_t q = offset / 64;
    unsigned s = offset % 64;
    std::uint64_t hi = q < words_.size() ? words_[q] : 0;
    std::uint64_t lo = q + 1 < words_.size() ? words_[q + 1] : 0;
    return s == 0 ? hi : (hi << s) | (lo >> (64 - s));
}

std::uint64_t DyadicStream::window(std::size_t offset, unsigned width) const
{
    if (width == 0 || width > 64 || offset + width > size_)
    {
        throw std::out_of_range("dyadic window [" + std::to_string(offset) + ", "
                                + std::to_string(offset + width) + ") outside stream of "
                                + std::to_string(size_) + " bits");
    }
    return window64(offset) >> (64 - width);
}

BigReal DyadicStream::to_real() const
{
    return shifted_real(0);
}

BigReal DyadicStream::shifted_real(std::size_t j) const
{
    auto prec = static_cast<mpfr_prec_t>(std::max<std::size_t>(size_, 2));
    BigReal result(prec);
    mpfr_set_zero(result.get(), 1);
    if (j >= size_)
    {
        return result;
    }
    BigReal word(64);
    std::size_t remaining = size_ - j;
    std::size_t count = (remaining + 63) / 64;
    // Least significant first keeps every partial sum exact.
    for (std::size_t i = count; i-- > 0;)
    {
        mpfr_set_uj(word.get(), window64(j + 64 * i), MPFR_RNDN);
        mpfr_div_2ui(word.get(), word.get(), 64 * (i + 1), MPFR_RNDN);
        mpfr_add(result.get(), result.get(), word.get(), MPFR_RNDN);
    }
    return result;
}

}  // namespace recurlab
