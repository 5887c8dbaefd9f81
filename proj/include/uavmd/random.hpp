#pragma once

#include "uavmd/types.hpp"

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <cmath>
#include <cstdint>

namespace uavmd {

using Rng = boost::random::mt19937_64;

// Independent deterministic stream for (seed, index).
Rng substream(std::uint64_t seed, std::uint64_t index);

// Circular complex Gaussian sampler.
class ComplexNormal {
public:
    explicit ComplexNormal(double variance) : dist_(0.0, std::sqrt(variance / 2.0)) {}
    cplx operator()(Rng& rng) { return {dist_(rng), dist_(rng)}; }

private:
    boost::random::normal_distribution<double> dist_;
};

} // namespace uavmd
