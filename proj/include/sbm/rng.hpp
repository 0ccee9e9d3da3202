#pragma once
#include <cstdint>
#include <random>

#include "sbm/math.hpp"

namespace sbm {

inline std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// per-path stream: results do not depend on how paths are scheduled
class PathRng {
  public:
    PathRng(std::uint64_t seed, std::uint64_t path_index) {
        std::uint64_t s = seed ^ (path_index * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
        const std::uint64_t a = splitmix64(s), b = splitmix64(s);
        std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                          static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
        gen_.seed(seq);
    }

    double uniform() {  // open interval (0,1)
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { return norm_ppf(uniform()); }

  private:
    std::mt19937_64 gen_;
};

}  // namespace sbm
