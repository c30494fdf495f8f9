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
#include <string>
#include <vector>

#include "peps/crypto.hpp"
#include "peps/policy.hpp"

namespace peps {

/// Service endpoint a subscriber protects: one IPv4 plus a port set.
/// An empty port set means every port.
struct ServiceAddress {
    Ipv4 ip;
    std::vector<std::uint16_t> ports;

    auto operator<=>(const ServiceAddress&) const = default;

    bool covers_port(std::uint16_t port) const;
    /// True for packets destined to this service endpoint.
    bool covers(const PacketHeader& pkt) const {
        return pkt.dst_ip == ip && covers_port(pkt.dst_port);
    }

    /// "<ip>:<p1,p2,...>" or "<ip>:*".
    std::string to_string() const;
    static std::optional<ServiceAddress> parse(std::string_view text);
};

/// Signed policy document from a local subscriber to its own domain's
/// enforcement application.
struct PolicyTransfer {
    std::string subscriber_id;
    std::vector<Policy> policies;
    std::uint64_t sequence_number = 0;
    std::string signature_hex;

    /// Envelope minus the SIG line; this is the signed byte string.
    std::string signing_payload() const;
    std::string serialize() const;
    static std::optional<PolicyTransfer> parse(std::string_view text);

    void sign_with(SignatureScheme& scheme, const KeyPair& keys);
};

/// Signed policy document from a subscriber in another domain, scoped to
/// traffic destined to that subscriber.
struct RemotePolicyTransfer {
    std::string origin_domain_id;
    std::string subscriber_id;
    ServiceAddress subscriber_service_address;
    std::vector<Policy> policies;
    std::uint64_t sequence_number = 0;
    std::string signature_hex;

    std::string signing_payload() const;
    std::string serialize() const;
    static std::optional<RemotePolicyTransfer> parse(std::string_view text);

    void sign_with(SignatureScheme& scheme, const KeyPair& keys);
};

}  // namespace peps
