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

#include "peps/net.hpp"

#include <charconv>
#include <sstream>

namespace peps {

std::string Ipv4::to_string() const {
    std::ostringstream os;
    os << ((value >> 24) & 0xff) << '.' << ((value >> 16) & 0xff) << '.'
       << ((value >> 8) & 0xff) << '.' << (value & 0xff);
    return os.str();
}

std::optional<Ipv4> Ipv4::parse(std::string_view text) {
    std::uint32_t acc = 0;
    int octets = 0;
    const char* p = text.data();
    const char* end = text.data() + text.size();
    while (p < end) {
        unsigned v = 0;
        auto [next, ec] = std::from_chars(p, end, v);
        if (ec != std::errc{} || v > 255 || next == p) return std::nullopt;
        acc = (acc << 8) | v;
        ++octets;
        p = next;
        if (octets < 4) {
            if (p >= end || *p != '.') return std::nullopt;
            ++p;
        }
    }
    if (octets != 4 || p != end) return std::nullopt;
    return Ipv4{acc};
}

namespace {

std::uint32_t prefix_mask(std::uint8_t len) {
    return len == 0 ? 0u : ~std::uint32_t{0} << (32 - len);
}

}  // namespace

bool Cidr::contains(Ipv4 ip) const {
    const auto m = prefix_mask(prefix_len);
    return (ip.value & m) == (addr.value & m);
}

bool Cidr::overlaps(const Cidr& other) const {
    const auto m = prefix_mask(std::min(prefix_len, other.prefix_len));
    return (addr.value & m) == (other.addr.value & m);
}

bool Cidr::subset_of(const Cidr& outer) const {
    return prefix_len >= outer.prefix_len && outer.contains(addr);
}

std::string Cidr::to_string() const {
    if (is_single()) return addr.to_string();
    return addr.to_string() + "/" + std::to_string(prefix_len);
}

std::optional<Cidr> Cidr::parse(std::string_view text) {
    auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        auto ip = Ipv4::parse(text);
        if (!ip) return std::nullopt;
        return Cidr{*ip, 32};
    }
    auto ip = Ipv4::parse(text.substr(0, slash));
    if (!ip) return std::nullopt;
    auto len_text = text.substr(slash + 1);
    unsigned len = 0;
    auto [next, ec] =
        std::from_chars(len_text.data(), len_text.data() + len_text.size(), len);
    if (ec != std::errc{} || len > 32 || next != len_text.data() + len_text.size())
        return std::nullopt;
    return Cidr{*ip, static_cast<std::uint8_t>(len)};
}

std::string to_string(Protocol p) {
    switch (p) {
        case Protocol::Tcp: return "tcp";
        case Protocol::Udp: return "udp";
        case Protocol::Icmp: return "icmp";
    }
    return "?";
}

std::optional<Protocol> parse_protocol(std::string_view text) {
    if (text == "tcp") return Protocol::Tcp;
    if (text == "udp") return Protocol::Udp;
    if (text == "icmp") return Protocol::Icmp;
    return std::nullopt;
}

std::string PacketHeader::witness_string() const {
    std::ostringstream os;
    os << src_ip.to_string() << ',' << dst_ip.to_string() << ',' << src_port << ','
       << dst_port << ',' << to_string(protocol);
    return os.str();
}

}  // namespace peps
