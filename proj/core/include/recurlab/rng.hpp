#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "big_real.hpp"

namespace recurlab
{
using SampleEngine = std::mt19937_64;

//! Named substreams so sampling and diagnostics never share state.
enum class StreamTag : std::uint32_t
{
    InitialPoint = 1,
    BurnIn = 2,
    Lyapunov = 3,
    Diagnostic = 4,
};

/*!
 * Engine for sample \c index of a run seeded with \c master_seed.
 *
 * Counter-mode derivation: the engine depends only on (seed, index, tag),
 * so any sample can be replayed in isolation and worker layout is irrelevant.
 */
SampleEngine make_sample_engine(std::uint64_t master_seed,
                                std::uint64_t index,
                                StreamTag tag = StreamTag::InitialPoint);

//! Uniform on [0, 1) with 53 random bits (portable, unlike std distributions).
double uniform01(SampleEngine& engine);

//! Fill \c out with a uniform dyadic in [0, 1) carrying precision(out) random bits.
void random_fraction(BigReal& out, SampleEngine& engine);

//! \c count raw 64-bit words.
std::vector<std::uint64_t> random_words(SampleEngine& engine, std::size_t count);

}  // namespace recurlab
