#include <gibbs/rng.hpp>

#include <cmath>
#include <stdexcept>

namespace gibbs
{

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

RngState::RngState(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL)))
{
}

double RngState::uniform()
{
    return static_cast<double>(engine_() >> 11U) * 0x1.0p-53;
}

std::uint64_t RngState::below(std::uint64_t n)
{
    if (n == 0) {
        throw std::invalid_argument("RngState::below(0)");
    }
    // Rejection on the top of the range keeps the draw exactly uniform.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

std::size_t RngState::pick(std::span<const double> cdf)
{
    const double u = uniform() * cdf.back();
    std::size_t lo = 0, hi = cdf.size() - 1;
    while (lo < hi) {
        const auto mid = (lo + hi) / 2;
        if (u < cdf[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo;
}

std::uint64_t RngState::poisson(double lambda)
{
    if (lambda <= 0) {
        return 0;
    }
    // Inversion; the samplers only use moderate rates.
    double u = uniform();
    double p = std::exp(-lambda);
    std::uint64_t k = 0;
    double cum = p;
    while (u >= cum) {
        ++k;
        p *= lambda / static_cast<double>(k);
        if (p == 0 && k > lambda) {
            break;
        }
        cum += p;
    }
    return k;
}

RngState RngState::split(std::uint64_t index) const
{
    return RngState(splitmix64(seed_ ^ splitmix64(stream_)), index);
}

} // namespace gibbs
