#pragma once

#include <cstdint>
#include <cstdio>
#include <functional>
#include <span>
#include <string>

namespace touchloc {

/// 128-bit digest of a belief's canonical encoding.
struct BeliefKey {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    friend auto operator<=>(const BeliefKey&, const BeliefKey&) = default;

    std::string hex() const {
        char buf[33];
        std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(hi),
                      static_cast<unsigned long long>(lo));
        return buf;
    }
};

struct BeliefKeyHash {
    std::size_t operator()(const BeliefKey& k) const noexcept {
        return static_cast<std::size_t>(k.hi ^ (k.lo * 0x9e3779b97f4a7c15ULL));
    }
};

/// Streams 64-bit words through two independently seeded mixers.
class KeyBuilder {
public:
    KeyBuilder& add(std::uint64_t w) noexcept {
        a_ = mix(a_ ^ w) + 0x9e3779b97f4a7c15ULL;
        b_ = mix(b_ + w * 0xc2b2ae3d27d4eb4fULL) ^ 0x165667b19e3779f9ULL;
        ++n_;
        return *this;
    }
    KeyBuilder& add(std::int64_t w) noexcept { return add(static_cast<std::uint64_t>(w)); }
    KeyBuilder& add(int w) noexcept { return add(static_cast<std::uint64_t>(static_cast<std::int64_t>(w))); }
    KeyBuilder& add(std::span<const std::uint64_t> words) noexcept {
        add(static_cast<std::uint64_t>(words.size()));
        for (auto w : words) add(w);
        return *this;
    }

    BeliefKey finish() const noexcept { return {mix(a_ ^ n_), mix(b_ + n_ * 0xff51afd7ed558ccdULL)}; }

private:
    static std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t a_ = 0x243f6a8885a308d3ULL;
    std::uint64_t b_ = 0x13198a2e03707344ULL;
    std::uint64_t n_ = 0;
};

}  // namespace touchloc
