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

#include <span>
#include <string>
#include <vector>

#include "peps/match.hpp"
#include "peps/universe.hpp"

namespace peps {

/// Application-level policy decision. The PDP is total: a packet no policy
/// matches is denied.
struct Decision {
    enum class Kind : std::uint8_t { Allow, Deny, RateLimit };

    Kind kind = Kind::Deny;
    std::uint32_t max_new_flows = 0;  // RateLimit
    std::uint32_t window_ticks = 1;   // RateLimit

    auto operator<=>(const Decision&) const = default;

    static Decision allow() { return {Kind::Allow}; }
    static Decision deny() { return {Kind::Deny}; }
    static Decision rate_limit(std::uint32_t max_new_flows,
                               std::uint32_t window_ticks) {
        return {Kind::RateLimit, max_new_flows, window_ticks == 0 ? 1 : window_ticks};
    }

    bool is_allow() const { return kind == Kind::Allow; }
    bool is_deny() const { return kind == Kind::Deny; }

    std::string to_string() const;
};

struct Policy {
    MatchFields match;
    Decision decision;
    std::int32_t priority = 0;
    std::string comment;

    auto operator<=>(const Policy&) const = default;

    /// `PRIO <n> <ALLOW|DENY|RATELIMIT k w> src=<ip|*> dst=<ip|cidr|*>
    ///  sport=<n|*> dport=<n|*> proto=<tcp|udp|icmp|*>`
    std::string to_line() const;
    static std::optional<Policy> parse_line(std::string_view line);
};

/// Highest-priority matching policy's decision; ties go to the earliest
/// policy in the list; no match means deny.
Decision decide(std::span<const Policy> policies, const PacketHeader& pkt);

/// Same, but also reports which policy decided (nullptr for the default).
const Policy* deciding_policy(std::span<const Policy> policies,
                              const PacketHeader& pkt);

/// True iff the two policies disagree on at least one universe packet they
/// both match.
bool conflicts(const Policy& a, const Policy& b, const HeaderUniverse& universe);

std::vector<Policy> parse_policy_lines(std::span<const std::string> lines);

}  // namespace peps
