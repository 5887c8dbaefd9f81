#include "uavmd/random.hpp"

namespace uavmd {

namespace {
std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}
} // namespace

Rng substream(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix(splitmix(seed) ^ splitmix(index + 0x632BE59BD9B4E019ull)));
}

} // namespace uavmd
