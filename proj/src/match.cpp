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

#include "peps/match.hpp"

namespace peps {

bool MatchFields::matches(const PacketHeader& pkt) const {
    if (src_ip && *src_ip != pkt.src_ip) return false;
    if (dst_ip && !dst_ip->contains(pkt.dst_ip)) return false;
    if (src_port && *src_port != pkt.src_port) return false;
    if (dst_port && *dst_port != pkt.dst_port) return false;
    if (protocol && *protocol != pkt.protocol) return false;
    if (in_port && *in_port != pkt.in_port) return false;
    if (eth_src && *eth_src != pkt.eth_src) return false;
    return true;
}

bool MatchFields::is_wildcard() const {
    return !src_ip && !dst_ip && !src_port && !dst_port && !protocol && !in_port &&
           !eth_src;
}

namespace {

template <typename T>
bool exact_compatible(const std::optional<T>& a, const std::optional<T>& b) {
    return !a || !b || *a == *b;
}

}  // namespace

bool MatchFields::intersects(const MatchFields& other) const {
    if (dst_ip && other.dst_ip && !dst_ip->overlaps(*other.dst_ip)) return false;
    return exact_compatible(src_ip, other.src_ip) &&
           exact_compatible(src_port, other.src_port) &&
           exact_compatible(dst_port, other.dst_port) &&
           exact_compatible(protocol, other.protocol) &&
           exact_compatible(in_port, other.in_port) &&
           exact_compatible(eth_src, other.eth_src);
}

MatchFields MatchFields::exact_flow(const PacketHeader& pkt) {
    MatchFields m;
    m.src_ip = pkt.src_ip;
    m.dst_ip = Cidr{pkt.dst_ip, 32};
    m.src_port = pkt.src_port;
    m.dst_port = pkt.dst_port;
    m.protocol = pkt.protocol;
    return m;
}

}  // namespace peps
