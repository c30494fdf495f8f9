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

/// Where packets ended up, per tick. Unit packet size: one traversal adds
/// one byte-unit to the traversed link.
struct MetricsRow {
    std::uint64_t dropped_at_source_edge = 0;
    std::uint64_t dropped_in_transit = 0;
    std::uint64_t dropped_at_dp_network = 0;
    std::uint64_t dropped_at_dp_app = 0;
    std::uint64_t delivered = 0;
    std::uint64_t packet_in_count = 0;
    std::uint64_t controller_msgs_processed = 0;
    std::vector<std::uint64_t> link_bytes;  // aligned with MetricsReport::link_ids

    std::uint64_t drops() const {
        return dropped_at_source_edge + dropped_in_transit + dropped_at_dp_network +
               dropped_at_dp_app;
    }

    void add(const MetricsRow& other);
};

struct MetricsReport {
    std::vector<std::string> link_ids;
    std::vector<MetricsRow> rows;  // rows[t] is tick t
    std::uint64_t injected = 0;

    MetricsRow totals() const;
    std::uint64_t link_total(const std::string& link_id) const;

    /// Header row, one row per tick, and a final TOTALS row.
    std::string to_csv() const;
};

}  // namespace peps
