#include "rsmhp/random.hpp"

#include <cmath>
#include <numbers>

namespace rsmhp {

std::uint64_t derive_key(std::uint64_t parent, std::uint64_t tag) noexcept
{
    return mix64(mix64(parent ^ 0x6A09E667F3BCC909ULL) + mix64(tag + 0x9E3779B97F4A7C15ULL));
}

std::uint64_t derive_key(std::uint64_t root, std::span<const std::uint64_t> path) noexcept
{
    std::uint64_t key = derive_key(root, static_cast<std::uint64_t>(path.size()));
    for (std::uint64_t step : path)
        key = derive_key(key, step);
    return key;
}

std::uint64_t derive_key(std::uint64_t root, std::initializer_list<std::uint64_t> path) noexcept
{
    return derive_key(root, std::span<const std::uint64_t>(path.begin(), path.size()));
}

double RandomStream::uniform() noexcept
{
    // 53 random bits, shifted off zero.
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() noexcept
{
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace rsmhp
