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

#include <optional>

#include "peps/net.hpp"

namespace peps {

/// One optional predicate per header field; unset means wildcard.
/// dst_ip may be a prefix, every other field is an exact value.
struct MatchFields {
    std::optional<Ipv4> src_ip;
    std::optional<Cidr> dst_ip;
    std::optional<std::uint16_t> src_port;
    std::optional<std::uint16_t> dst_port;
    std::optional<Protocol> protocol;
    std::optional<std::uint16_t> in_port;
    std::optional<std::uint64_t> eth_src;

    auto operator<=>(const MatchFields&) const = default;

    bool matches(const PacketHeader& pkt) const;
    bool is_wildcard() const;

    /// True iff some packet could satisfy both predicates (symbolic, exact
    /// for this field vocabulary).
    bool intersects(const MatchFields& other) const;

    static MatchFields any() { return {}; }
    /// Exact 5-tuple match for a reactive per-flow rule.
    static MatchFields exact_flow(const PacketHeader& pkt);
};

}  // namespace peps
