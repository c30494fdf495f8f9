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

#include <map>
#include <optional>
#include <string>

#include "peps/net.hpp"

namespace peps {

enum class SecurityClass : std::uint8_t { Secure, NonSecure };

struct LocationZone {
    std::string zone_id;
    std::string label;
    SecurityClass security = SecurityClass::NonSecure;

    auto operator<=>(const LocationZone&) const = default;
};

/// Where a host was last seen attaching to the network.
struct Attachment {
    SwitchId switch_id;
    std::uint16_t port_id = 0;
    Tick last_seen = 0;
};

struct TrackError {
    std::string message;  // currently only UnmappedPort
};

struct TrackResult {
    bool ok = false;
    std::string error;
    LocationZone zone;
    bool moved = false;
};

/// Dynamic host -> attachment-point map built from packet_in events, plus the
/// static (switch, port) -> zone configuration.
class GeoLocationTable {
 public:
    void define_zone(LocationZone zone);
    /// Binds an attachment point to a zone; the zone must be defined.
    bool map_port(const SwitchId& sw, std::uint16_t port,
                  const std::string& zone_id);

    std::optional<LocationZone> zone_at(const SwitchId& sw,
                                        std::uint16_t port) const;
    std::optional<LocationZone> zone_of(Ipv4 host) const;
    std::optional<Attachment> attachment(Ipv4 host) const;

    bool port_mapped(const SwitchId& sw, std::uint16_t port) const {
        return zone_at(sw, port).has_value();
    }

    /// Upserts the host's attachment from a packet_in; `moved` reports a
    /// zone change relative to the previous attachment.
    TrackResult track(Ipv4 host, const SwitchId& sw, std::uint16_t port, Tick now);

    void forget(Ipv4 host) { attachments_.erase(host); }

    const std::map<Ipv4, Attachment>& attachments() const { return attachments_; }
    const std::map<std::string, LocationZone>& zones() const { return zones_; }

 private:
    std::map<std::string, LocationZone> zones_;
    std::map<std::pair<SwitchId, std::uint16_t>, std::string> zone_map_;
    std::map<Ipv4, Attachment> attachments_;
};

}  // namespace peps
