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

#include <string>
#include <vector>

#include "peps/net.hpp"

namespace peps {

/// Controller-load experiment: a bank of switches feeds the controller new
/// flows at its full per-tick message budget while location-ticket requests
/// compete for the same budget. Flow-handling throughput per tick is the
/// sampled quantity; ticket load degrades it as a queueing effect.
struct BenchConfig {
    std::size_t switch_count = 32;
    std::uint32_t ltr_load = 1000;        // total ticket requests
    std::uint32_t flow_load = 10000;      // total new-flow packet_ins
    std::uint32_t budget_per_tick = 100;  // controller messages per tick
    Tick window = 100;                    // sampling window, ticks
    Tick ltr_burst_ticks = 50;            // LTRs arrive over this prefix
};

struct BenchResult {
    std::vector<std::uint64_t> flows_per_tick;  // size == window
    std::vector<std::uint64_t> msgs_per_tick;
    std::uint64_t flows_processed = 0;
    std::uint64_t ltrs_processed = 0;
};

BenchResult bench_packet_in(const BenchConfig& config);

/// Two-column CSV for a baseline (ltr = 0) and a loaded run.
std::string bench_csv(const BenchResult& baseline, const BenchResult& loaded);

}  // namespace peps
