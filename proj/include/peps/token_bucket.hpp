/*
 * Copyright 2026 The pepsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "peps/net.hpp"

namespace peps {

/// Integer token bucket guarding the control plane against update floods.
/// Starts full; refills `refill_rate` tokens per elapsed tick.
class TokenBucket {
 public:
    TokenBucket(std::uint32_t capacity, std::uint32_t refill_rate)
        : capacity_(capacity), refill_rate_(refill_rate), tokens_(capacity) {}

    void advance_to(Tick now);
    bool try_take();

    std::uint32_t tokens() const { return tokens_; }
    std::uint32_t capacity() const { return capacity_; }

 private:
    std::uint32_t capacity_;
    std::uint32_t refill_rate_;
    std::uint32_t tokens_;
    Tick last_tick_ = 0;
};

}  // namespace peps
