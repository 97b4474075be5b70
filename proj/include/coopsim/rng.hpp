#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace coopsim {

// splitmix64 step; also used as the finalizer when hashing seed material.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Small deterministic generator. The standard engines/distributions are
// avoided on purpose: every simulation value must be reproducible
// bit-for-bit from the scenario seed, independent of the standard library
// in use.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, n). n == 0 returns 0.
    std::uint64_t uniform(std::uint64_t n) {
        if (n == 0) return 0;
        // Multiply-shift rejection-free mapping; bias is negligible for the
        // small ranges used here and keeps draws O(1).
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Uniform integer in [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(
                        uniform(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform_real() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform_real() < p; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform(i));
            using std::swap;
            swap(v[i - 1], v[j]);
        }
    }

   private:
    std::uint64_t state_;
};

// Stable seed derivation: fold tag material into the master seed so that
// every entity (task, maze, attempt, replication) gets an independent
// stream. FNV-1a over the bytes, then one splitmix64 finalize.
class SeedDeriver {
   public:
    explicit SeedDeriver(std::uint64_t master) : h_(0xCBF29CE484222325ULL) {
        mix(master);
    }

    SeedDeriver& mix(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h_ ^= (v >> (8 * i)) & 0xFF;
            h_ *= 0x100000001B3ULL;
        }
        return *this;
    }

    SeedDeriver& mix(std::string_view s) {
        for (unsigned char c : s) {
            h_ ^= c;
            h_ *= 0x100000001B3ULL;
        }
        // Length separator so that ("ab","c") != ("a","bc").
        return mix(static_cast<std::uint64_t>(s.size()));
    }

    std::uint64_t finish() const {
        std::uint64_t s = h_;
        return splitmix64(s);
    }

   private:
    std::uint64_t h_;
};

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
    return SeedDeriver(master).mix(tag).finish();
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::string_view id) {
    return SeedDeriver(master).mix(tag).mix(id).finish();
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::string_view id, std::uint64_t n) {
    return SeedDeriver(master).mix(tag).mix(id).mix(n).finish();
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t n) {
    return SeedDeriver(master).mix(tag).mix(n).finish();
}

}  // namespace coopsim
