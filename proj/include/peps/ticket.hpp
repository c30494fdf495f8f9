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

#include "peps/crypto.hpp"
#include "peps/geo.hpp"

namespace peps {

/// Host-signed claim of (ip, public key, time); first half of the
/// proof-of-presence exchange.
struct LocationTicketRequest {
    Ipv4 requestor_ip;
    std::string requestor_public_key;
    Tick timestamp = 0;
    std::string signature_hex;

    /// "LTR ip=<ip> key=<hex> t=<tick>"; the signed bytes are exactly this.
    std::string signing_payload() const;
    std::string serialize() const;  // adds " sig=<hex>"
    static std::optional<LocationTicketRequest> parse(std::string_view line);

    static LocationTicketRequest make_signed(SignatureScheme& scheme,
                                             const KeyPair& requestor_keys,
                                             Ipv4 ip, Tick now);
};

/// Controller-signed attestation binding (ip, key, time, zone).
struct LocationTicket {
    Ipv4 requestor_ip;
    std::string requestor_public_key;
    Tick timestamp = 0;
    std::string zone_id;
    std::string issuer_domain_id;
    std::string signature_hex;

    std::string signing_payload() const;
    std::string serialize() const;
    static std::optional<LocationTicket> parse(std::string_view line);
};

enum class TicketError : std::uint8_t {
    BadSignature,
    IpMismatch,
    StaleRequest,
    UnknownHost,
    Expired,
    KeyMismatch,
};

std::string to_string(TicketError e);

struct IssueResult {
    bool ok = false;
    TicketError error = TicketError::BadSignature;
    LocationTicket ticket;
};

/// Verifies the request signature, compares the claimed IP against the one
/// observed in the packet header, checks freshness, resolves the requestor's
/// zone from the geo table, and returns a ticket signed by the issuer.
IssueResult issue_location_ticket(SignatureScheme& scheme, const KeyPair& issuer_keys,
                                  const std::string& issuer_domain_id,
                                  const GeoLocationTable& geo,
                                  const LocationTicketRequest& ltr,
                                  Ipv4 observed_src_ip, Tick now,
                                  Tick freshness_window);

struct TicketVerifyResult {
    bool ok = false;
    TicketError reason = TicketError::BadSignature;
};

/// Data-provider side check: issuer signature, age, and the (ip, key)
/// binding against the presenting client.
TicketVerifyResult verify_location_ticket(SignatureScheme& scheme,
                                          const std::string& issuer_public_key,
                                          const LocationTicket& ticket, Tick now,
                                          Tick max_age, Ipv4 expected_ip,
                                          const std::string& expected_key);

}  // namespace peps
