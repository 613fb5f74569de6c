/*
   Copyright 2026 The gwtheta Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Counter-based random streams (Philox4x32-10, Salmon et al. 2011).
// A stream is identified by a 64-bit key derived from (base seed, replicate
// index); its state is a 128-bit counter, so streams never overlap and can be
// created in any order on any thread.

#include <array>
#include <cstdint>
#include <limits>

namespace gwtheta {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Ten-round Philox4x32 bijection.
PhiloxBlock philox4x32(PhiloxBlock ctr, PhiloxKey key);

/// Stream key for replicate `index` of a run seeded with `base_seed`.
std::uint64_t derive_stream_key(std::uint64_t base_seed, std::uint64_t index);

class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key) noexcept
        : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

    static CounterRng for_replicate(std::uint64_t base_seed, std::uint64_t index) noexcept {
        return CounterRng(derive_stream_key(base_seed, index));
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform on (0, 1) with 53 random bits; never 0 or 1.
    double uniform() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t blocks_used() const noexcept { return counter_; }

private:
    PhiloxKey key_;
    std::uint64_t counter_ = 0;
    PhiloxBlock buffer_{};
    int available_ = 0;  // 64-bit words left in buffer_
};

}  // namespace gwtheta
