#ifndef GARCHMOM_RNG_HPP
#define GARCHMOM_RNG_HPP

#include <cstdint>

namespace garchmom {

namespace detail {

inline std::uint64_t splitmix64_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based random stream: the k-th output is a pure function of
/// (seed, stream, k), so draws can be generated in any order and from any
/// thread without changing the result. Stream i of seed s is the splitmix64
/// sequence started at a state derived from (s, i).
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : base_(detail::splitmix64_finalize(
              seed ^ detail::splitmix64_finalize(stream + 0x9E3779B97F4A7C15ull))),
          counter_(0) {}

    std::uint64_t next_u64() {
        return detail::splitmix64_finalize(base_ +
                                           (++counter_) * 0x9E3779B97F4A7C15ull);
    }

    /// Uniform draw in the open interval (0, 1).
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t base_;
    std::uint64_t counter_;
};

}  // namespace garchmom

#endif  // GARCHMOM_RNG_HPP
