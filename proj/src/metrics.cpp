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

#include "peps/metrics.hpp"

#include <sstream>

namespace peps {

void MetricsRow::add(const MetricsRow& other) {
    dropped_at_source_edge += other.dropped_at_source_edge;
    dropped_in_transit += other.dropped_in_transit;
    dropped_at_dp_network += other.dropped_at_dp_network;
    dropped_at_dp_app += other.dropped_at_dp_app;
    delivered += other.delivered;
    packet_in_count += other.packet_in_count;
    controller_msgs_processed += other.controller_msgs_processed;
    if (link_bytes.size() < other.link_bytes.size())
        link_bytes.resize(other.link_bytes.size(), 0);
    for (std::size_t i = 0; i < other.link_bytes.size(); ++i)
        link_bytes[i] += other.link_bytes[i];
}

MetricsRow MetricsReport::totals() const {
    MetricsRow total;
    total.link_bytes.assign(link_ids.size(), 0);
    for (const auto& row : rows) total.add(row);
    return total;
}

std::uint64_t MetricsReport::link_total(const std::string& link_id) const {
    for (std::size_t i = 0; i < link_ids.size(); ++i) {
        if (link_ids[i] == link_id) {
            std::uint64_t sum = 0;
            for (const auto& row : rows)
                if (i < row.link_bytes.size()) sum += row.link_bytes[i];
            return sum;
        }
    }
    return 0;
}

std::string MetricsReport::to_csv() const {
    std::ostringstream os;
    os << "tick,dropped_at_source_edge,dropped_in_transit,dropped_at_dp_network,"
          "dropped_at_dp_app,delivered,packet_in_count,controller_msgs_processed";
    for (const auto& id : link_ids) os << ",link_bytes[" << id << "]";
    os << '\n';

    auto emit = [&](const std::string& label, const MetricsRow& row) {
        os << label << ',' << row.dropped_at_source_edge << ','
           << row.dropped_in_transit << ',' << row.dropped_at_dp_network << ','
           << row.dropped_at_dp_app << ',' << row.delivered << ','
           << row.packet_in_count << ',' << row.controller_msgs_processed;
        for (std::size_t i = 0; i < link_ids.size(); ++i)
            os << ',' << (i < row.link_bytes.size() ? row.link_bytes[i] : 0);
        os << '\n';
    };

    for (std::size_t t = 0; t < rows.size(); ++t)
        emit(std::to_string(t), rows[t]);
    emit("TOTALS", totals());
    return os.str();
}

}  // namespace peps
