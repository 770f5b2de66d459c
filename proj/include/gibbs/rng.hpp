#ifndef GIBBS_RNG_HPP
#define GIBBS_RNG_HPP

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace gibbs
{

// Seeded generator for one named stream. Every draw goes through uniform() or
// below(), so a (seed, stream) pair fixes the whole sequence regardless of the
// standard library's distribution implementations.
class RngState
{
public:
    RngState(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t seed() const
    {
        return seed_;
    }
    std::uint64_t stream() const
    {
        return stream_;
    }

    std::uint64_t next()
    {
        return engine_();
    }
    // Uniform in [0, 1) with 53 random bits.
    double uniform();
    // Uniform in {0, ..., n-1}; n must be positive.
    std::uint64_t below(std::uint64_t n);

    // Index drawn from a cumulative table (last entry is the total mass).
    std::size_t pick(std::span<const double> cdf);

    std::uint64_t poisson(double lambda);

    template <typename T> void shuffle(std::vector<T> &v)
    {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    // Independent child stream; used to give every sample its own generator.
    RngState split(std::uint64_t index) const;

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

} // namespace gibbs

#endif
