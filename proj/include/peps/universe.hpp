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

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "peps/net.hpp"

namespace peps {

/// Finite header space the non-violation oracle enumerates: src/dst drawn
/// from `hosts`, src/dst ports from `ports`, protocol from `protocols`.
/// in_port and eth_src are fixed to zero (policies are 5-tuple predicates).
class HeaderUniverse {
 public:
    static constexpr std::size_t kDefaultCap = 1'000'000;

    HeaderUniverse() = default;
    HeaderUniverse(std::vector<Ipv4> hosts, std::vector<std::uint16_t> ports,
                   std::vector<Protocol> protocols, std::size_t cap = kDefaultCap);

    const std::vector<Ipv4>& hosts() const { return hosts_; }
    const std::vector<std::uint16_t>& ports() const { return ports_; }
    const std::vector<Protocol>& protocols() const { return protocols_; }

    std::size_t size() const {
        return hosts_.size() * hosts_.size() * ports_.size() * ports_.size() *
               protocols_.size();
    }
    bool empty() const { return size() == 0; }

    /// Visits every packet; the visitor returns false to stop early.
    template <typename Fn>
    void scan(Fn&& fn) const {
        PacketHeader pkt;
        for (auto src : hosts_)
            for (auto dst : hosts_)
                for (auto sport : ports_)
                    for (auto dport : ports_)
                        for (auto proto : protocols_) {
                            pkt.src_ip = src;
                            pkt.dst_ip = dst;
                            pkt.src_port = sport;
                            pkt.dst_port = dport;
                            pkt.protocol = proto;
                            if (!fn(pkt)) return;
                        }
    }

 private:
    std::vector<Ipv4> hosts_;
    std::vector<std::uint16_t> ports_;
    std::vector<Protocol> protocols_;
};

}  // namespace peps
