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

#include "peps/token_bucket.hpp"

namespace peps {

void TokenBucket::advance_to(Tick now) {
    if (now <= last_tick_) return;
    const Tick elapsed = now - last_tick_;
    last_tick_ = now;
    const std::uint64_t refill = static_cast<std::uint64_t>(refill_rate_) * elapsed;
    const std::uint64_t next = tokens_ + refill;
    tokens_ = next > capacity_ ? capacity_ : static_cast<std::uint32_t>(next);
}

bool TokenBucket::try_take() {
    if (tokens_ == 0) return false;
    --tokens_;
    return true;
}

}  // namespace peps
