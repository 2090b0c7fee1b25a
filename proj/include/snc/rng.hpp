// rng.hpp - Counter-based random streams keyed by (seed, replication, hop, source).

#ifndef SNC_RNG_HPP
#define SNC_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace snc {

// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Output k of the stream is mix64(key + (k+1) * golden); streams with different keys are
// independent for practical purposes and never share state.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key) : _key(key) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        ++_counter;
        return mix64(_key + _counter * 0x9e3779b97f4a7c15ULL);
    }

    // Uniform on (0, 1].
    double uniform_open_closed() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

    std::uint64_t counter() const { return _counter; }

    // Derives a stream key from a base seed and a path of indices.
    static std::uint64_t derive(std::uint64_t base_seed, std::initializer_list<std::uint64_t> path)
    {
        std::uint64_t key = mix64(base_seed ^ 0x6a09e667f3bcc909ULL);
        for (std::uint64_t p : path) {
            key = mix64(key + mix64(p + 0x9e3779b97f4a7c15ULL));
        }
        return key;
    }

private:
    std::uint64_t _key;
    std::uint64_t _counter = 0;
};

} // namespace snc

#endif // SNC_RNG_HPP
