#pragma once

// Random variate generation.  Streams are counter-based (Philox4x32-10), so
// distinct (base_seed, stream_index) pairs give reproducible, independent
// sequences and generation never shares mutable state across streams.
//
// Gamma variates are drawn by quantile inversion of a single uniform, which
// makes the coupling Z -> X of the inverse-transform GGN sampler exactly
// testable against the quantile function.

#include <array>
#include <cstdint>
#include <cmath>

#include "ggn/ggn_dist.hpp"
#include "ggn/sample.hpp"
#include "ggn/specfun.hpp"

namespace ggn {

struct StreamSpec {
    std::uint64_t base_seed = 0;
    std::uint64_t stream_index = 0;
};

/// Name of the pinned generator, recorded in report metadata.
inline constexpr const char* kRngName = "philox4x32-10";

namespace detail {

// Philox4x32-10 block cipher (Salmon et al. 2011 constants).
struct Philox4x32 {
    std::array<std::uint32_t, 4> ctr{};
    std::array<std::uint32_t, 2> key{};

    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    static void round(std::array<std::uint32_t, 4>& c, const std::array<std::uint32_t, 2>& k) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }

    std::array<std::uint32_t, 4> operator()() const {
        auto c = ctr;
        auto k = key;
        for (int r = 0; r < 10; ++r) {
            round(c, k);
            k[0] += kW0;
            k[1] += kW1;
        }
        return c;
    }
};

}  // namespace detail

/// Counter-based uniform stream; value-like, cheap to copy.
class RngStream {
public:
    explicit RngStream(StreamSpec spec) : spec_(spec) {}

    /// Uniform double in the open interval (0, 1).
    double uniform() {
        if (!have_spare_) {
            detail::Philox4x32 px;
            px.key = {static_cast<std::uint32_t>(spec_.base_seed),
                      static_cast<std::uint32_t>(spec_.base_seed >> 32)};
            px.ctr = {static_cast<std::uint32_t>(block_index_),
                      static_cast<std::uint32_t>(block_index_ >> 32),
                      static_cast<std::uint32_t>(spec_.stream_index),
                      static_cast<std::uint32_t>(spec_.stream_index >> 32)};
            ++block_index_;
            const auto out = px();
            block_[0] = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
            block_[1] = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
            have_spare_ = true;
            return to_unit(block_[0]);
        }
        have_spare_ = false;
        return to_unit(block_[1]);
    }

    StreamSpec spec() const { return spec_; }

private:
    static double to_unit(std::uint64_t x) {
        // 53 mantissa bits, shifted into (0,1) by a half-ulp offset
        return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
    }

    StreamSpec spec_;
    std::uint64_t block_index_ = 0;
    std::array<std::uint64_t, 2> block_{};
    bool have_spare_ = false;
};

/// One Gamma(shape, 1) draw by quantile inversion.
inline double gamma_variate(double shape, RngStream& stream) {
    detail::require(shape > 0.0 && std::isfinite(shape), "gamma_variate: requires shape > 0");
    return gamma_quantile(shape, stream.uniform());
}

inline double gamma_variate(double shape, StreamSpec spec) {
    RngStream stream(spec);
    return gamma_variate(shape, stream);
}

/// One GGN draw from an existing stream: Z ~ Gamma(a,1), then the
/// branch-at-log-2 inverse transform.
inline double ggn_draw(const GgnParams& p, RngStream& stream) {
    const double z = gamma_variate(p.a, stream);
    return gn_quantile_from_gamma_draw(p.baseline(), z);
}

/// count GGN draws on the stream identified by spec.
inline Sample ggn_sample(const GgnParams& p, std::size_t count, StreamSpec spec) {
    p.validate();
    detail::require(count >= 1, "ggn_sample: requires count >= 1");
    Sample out;
    out.values.reserve(count);
    out.source = "ggn_sample(seed=" + std::to_string(spec.base_seed) +
                 ",stream=" + std::to_string(spec.stream_index) + ")";
    RngStream stream(spec);
    for (std::size_t i = 0; i < count; ++i) out.values.push_back(ggn_draw(p, stream));
    return out;
}

}  // namespace ggn
