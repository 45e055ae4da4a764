#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace coexsim {

/// The single seeded PRNG of a run.
///
/// Draw order is part of the determinism contract: backoff draws happen in
/// event order, one draw per call to `uniform`, nothing else consumes the
/// stream. The bounded draw uses rejection sampling on raw mt19937_64
/// output so results do not depend on the standard library's distributions.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [0, bound].
    std::uint64_t uniform(std::uint64_t bound)
    {
        if (bound == 0)
            return 0;
        const std::uint64_t span = bound + 1;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max()
                                    - std::numeric_limits<std::uint64_t>::max() % span;
        ++draws_;
        std::uint64_t value = engine_();
        while (value >= limit)
            value = engine_();
        return value % span;
    }

    std::uint64_t draws() const { return draws_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t draws_ = 0;
};

}  // namespace coexsim
