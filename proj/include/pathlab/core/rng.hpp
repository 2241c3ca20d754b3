#pragma once

// Counter-based random numbers (Philox4x32-10) with per-index sub-streams,
// plus a deterministic parallel loop. A draw depends only on (seed, stream
// index, draw counter), so results do not depend on how work is scheduled.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "pathlab/core/error.hpp"

namespace pathlab {

namespace philox {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline constexpr std::uint32_t M0 = 0xD2511F53u;
inline constexpr std::uint32_t M1 = 0xCD9E8D57u;
inline constexpr std::uint32_t W0 = 0x9E3779B9u;
inline constexpr std::uint32_t W1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

/// Ten-round Philox bijection of a 128-bit counter under a 64-bit key.
inline Counter block(Counter c, Key k) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(M0, c[0], hi0, lo0);
        mulhilo(M1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += W0;
        k[1] += W1;
    }
    return c;
}

} // namespace philox

/// Deterministic stream of uniforms keyed by (seed, stream index).
class RngStream {
public:
    static constexpr const char* algorithm = "philox4x32-10";

    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_index() const { return stream_; }

    /// Independent sub-stream, e.g. one per walker.
    RngStream substream(std::uint64_t index) const {
        require(stream_ == 0, "sub-streams derive from a root stream");
        return RngStream(seed_, index + 1);
    }

    std::uint32_t next_u32() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal by Box-Muller; both outputs are used in turn.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double phi = 2.0 * 3.14159265358979323846 * uniform();
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

    /// Fair +-1 step.
    int sign() { return (next_u32() & 1u) ? 1 : -1; }

private:
    void refill() {
        const philox::Counter c{static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                                static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        const philox::Key k{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
        buf_ = philox::block(c, k);
        ++counter_;
        pos_ = 0;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    philox::Counter buf_{};
    int pos_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline RngStream rng_stream(std::uint64_t seed) { return RngStream(seed); }

/// Worker count: explicit value if positive, else PATHLAB_THREADS, else hardware.
inline unsigned resolve_threads(int requested = 0) {
    if (requested > 0) return static_cast<unsigned>(requested);
    if (const char* env = std::getenv("PATHLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(begin, end, chunk) over fixed chunks of [0, n). Chunk boundaries
/// depend on n and `chunks` only, never on the thread count.
template <class Body>
void parallel_chunks(std::size_t n, std::size_t chunks, unsigned threads, Body&& body) {
    chunks = std::max<std::size_t>(1, std::min(chunks, n));
    auto run_chunk = [&](std::size_t c) {
        const std::size_t b = n * c / chunks, e = n * (c + 1) / chunks;
        body(b, e, c);
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
    if (threads == 1) {
        for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t c = t; c < chunks; c += threads) run_chunk(c);
        });
    for (auto& th : pool) th.join();
}

} // namespace pathlab
