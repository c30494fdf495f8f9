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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace peps {

using Tick = std::uint64_t;
using SwitchId = std::string;
using DomainId = std::string;

/// IPv4 address as a host-order 32-bit value.
struct Ipv4 {
    std::uint32_t value = 0;

    constexpr Ipv4() = default;
    constexpr explicit Ipv4(std::uint32_t v) : value(v) {}
    constexpr Ipv4(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d)
        : value((std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) |
                (std::uint32_t{c} << 8) | std::uint32_t{d}) {}

    auto operator<=>(const Ipv4&) const = default;

    std::string to_string() const;
    /// Parses dotted-quad notation; nullopt on malformed input.
    static std::optional<Ipv4> parse(std::string_view text);
};

/// IPv4 prefix; a bare address is the /32 prefix.
struct Cidr {
    Ipv4 addr;
    std::uint8_t prefix_len = 32;

    auto operator<=>(const Cidr&) const = default;

    bool contains(Ipv4 ip) const;
    bool is_single() const { return prefix_len == 32; }
    /// True iff the two prefixes share at least one address.
    bool overlaps(const Cidr& other) const;
    /// True iff every address of this prefix lies in `outer`.
    bool subset_of(const Cidr& outer) const;

    std::string to_string() const;
    /// Accepts "a.b.c.d" (as /32) or "a.b.c.d/len".
    static std::optional<Cidr> parse(std::string_view text);
};

enum class Protocol : std::uint8_t { Tcp, Udp, Icmp };

std::string to_string(Protocol p);
std::optional<Protocol> parse_protocol(std::string_view text);

/// The packet header fields the data plane matches on.
struct PacketHeader {
    Ipv4 src_ip;
    Ipv4 dst_ip;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    Protocol protocol = Protocol::Tcp;
    std::uint16_t in_port = 0;
    std::uint64_t eth_src = 0;  // 48-bit identifier

    auto operator<=>(const PacketHeader&) const = default;

    /// "src,dst,sport,dport,proto" form used in witness reports.
    std::string witness_string() const;
};

/// 5-tuple identity of a flow; in_port and eth_src do not contribute.
struct FlowKey {
    Ipv4 src_ip;
    Ipv4 dst_ip;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    Protocol protocol = Protocol::Tcp;

    FlowKey() = default;
    explicit FlowKey(const PacketHeader& h)
        : src_ip(h.src_ip), dst_ip(h.dst_ip), src_port(h.src_port),
          dst_port(h.dst_port), protocol(h.protocol) {}

    auto operator<=>(const FlowKey&) const = default;
};

struct FlowKeyHash {
    std::size_t operator()(const FlowKey& k) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        auto mix = [&h](std::uint64_t v) {
            h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        };
        mix(k.src_ip.value);
        mix(k.dst_ip.value);
        mix((std::uint64_t{k.src_port} << 16) | k.dst_port);
        mix(static_cast<std::uint64_t>(k.protocol));
        return static_cast<std::size_t>(h);
    }
};

}  // namespace peps
