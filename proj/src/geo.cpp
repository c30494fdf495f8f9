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

#include "peps/geo.hpp"

namespace peps {

void GeoLocationTable::define_zone(LocationZone zone) {
    zones_[zone.zone_id] = std::move(zone);
}

bool GeoLocationTable::map_port(const SwitchId& sw, std::uint16_t port,
                                const std::string& zone_id) {
    if (!zones_.contains(zone_id)) return false;
    zone_map_[{sw, port}] = zone_id;
    return true;
}

std::optional<LocationZone> GeoLocationTable::zone_at(const SwitchId& sw,
                                                      std::uint16_t port) const {
    auto it = zone_map_.find({sw, port});
    if (it == zone_map_.end()) return std::nullopt;
    return zones_.at(it->second);
}

std::optional<LocationZone> GeoLocationTable::zone_of(Ipv4 host) const {
    auto at = attachment(host);
    if (!at) return std::nullopt;
    return zone_at(at->switch_id, at->port_id);
}

std::optional<Attachment> GeoLocationTable::attachment(Ipv4 host) const {
    auto it = attachments_.find(host);
    if (it == attachments_.end()) return std::nullopt;
    return it->second;
}

TrackResult GeoLocationTable::track(Ipv4 host, const SwitchId& sw,
                                    std::uint16_t port, Tick now) {
    auto zone = zone_at(sw, port);
    if (!zone) return {false, "UnmappedPort", {}, false};

    bool moved = false;
    if (auto prev = attachment(host)) {
        auto prev_zone = zone_at(prev->switch_id, prev->port_id);
        moved = prev_zone && prev_zone->zone_id != zone->zone_id;
    }
    attachments_[host] = Attachment{sw, port, now};
    return {true, {}, *zone, moved};
}

}  // namespace peps
