// Copyright 2026 The starlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace star {

using Rng = std::mt19937_64;

/// Independent stream for one unit of work (a shot or a 64-shot batch).
/// Streams depend only on (seed, stream), never on scheduling order.
inline Rng make_stream(uint64_t seed, uint64_t stream) {
    std::seed_seq seq{
        static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
        static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32),
        0x5354u};
    return Rng(seq);
}

inline double uniform01(Rng &rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Bernoulli(p) trials delivered 64 at a time by geometric gap sampling.
/// Cost is proportional to the number of successes, not trials.
class BernoulliGaps {
   public:
    explicit BernoulliGaps(double p = 0.0) : p_(p) {
        if (p_ > 0.0 && p_ < 1.0) {
            dist_ = std::geometric_distribution<uint64_t>(p_);
        }
    }

    double p() const {
        return p_;
    }

    uint64_t next_mask(Rng &rng) {
        if (p_ <= 0.0) {
            return 0;
        }
        if (p_ >= 1.0) {
            return ~uint64_t{0};
        }
        if (!primed_) {
            gap_ = dist_(rng);
            primed_ = true;
        }
        uint64_t mask = 0;
        uint64_t pos = 0;
        while (gap_ < 64 - pos) {
            pos += gap_;
            mask |= uint64_t{1} << pos;
            pos++;
            gap_ = dist_(rng);
        }
        gap_ -= 64 - pos;
        return mask;
    }

   private:
    double p_;
    std::geometric_distribution<uint64_t> dist_{0.5};
    uint64_t gap_ = 0;
    bool primed_ = false;
};

}  // namespace star
