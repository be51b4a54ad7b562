#include "recurlab/rng.hpp"

namespace recurlab
{
SampleEngine make_sample_engine(std::uint64_t master_seed,
                                std::uint64_t index,
                                StreamTag tag)
{
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32),
                      static_cast<std::uint32_t>(tag)};
    return SampleEngine(seq);
}

double uniform01(SampleEngine& engine)
{
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

void random_fraction(BigReal& out, SampleEngine& engine)
{
    auto prec = out.precision();
    auto words = static_cast<std::size_t>((prec + 63) / 64);
    mpfr_set_zero(out.get(), 1);
    BigReal word(64);
    // Accumulate most significant word last so every add is exact.
    for (std::size_t i = words; i-- > 0;)
    {
        std::uint64_t w = engine();
        if (i + 1 == words && prec % 64 != 0)
        {
            w &= ~std::uint64_t{0} << (64 - prec % 64);
        }
        mpfr_set_uj(word.get(), w, MPFR_RNDN);
        mpfr_div_2ui(word.get(), word.get(), 64 * (i + 1), MPFR_RNDN);
        mpfr_add(out.get(), out.get(), word.get(), MPFR_RNDN);
    }
}

std::vector<std::uint64_t> random_words(SampleEngine& engine, std::size_t count)
{
    std::vector<std::uint64_t> words(count);
    for (auto& w : words)
    {
        w = engine();
    }
    return words;
}

}  // namespace recurlab
