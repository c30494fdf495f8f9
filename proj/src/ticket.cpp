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

#include "peps/ticket.hpp"

#include <charconv>
#include <sstream>
#include <vector>

namespace peps {

namespace {

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ') ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::optional<std::string_view> keyed(std::string_view tok, std::string_view key) {
    if (tok.size() <= key.size() + 1) return std::nullopt;
    if (tok.substr(0, key.size()) != key || tok[key.size()] != '=')
        return std::nullopt;
    return tok.substr(key.size() + 1);
}

std::optional<Tick> parse_tick(std::string_view s) {
    Tick v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace

std::string to_string(TicketError e) {
    switch (e) {
        case TicketError::BadSignature: return "BadSignature";
        case TicketError::IpMismatch: return "IpMismatch";
        case TicketError::StaleRequest: return "StaleRequest";
        case TicketError::UnknownHost: return "UnknownHost";
        case TicketError::Expired: return "Expired";
        case TicketError::KeyMismatch: return "KeyMismatch";
    }
    return "?";
}

std::string LocationTicketRequest::signing_payload() const {
    std::ostringstream os;
    os << "LTR ip=" << requestor_ip.to_string() << " key=" << requestor_public_key
       << " t=" << timestamp;
    return os.str();
}

std::string LocationTicketRequest::serialize() const {
    return signing_payload() + " sig=" + signature_hex;
}

std::optional<LocationTicketRequest> LocationTicketRequest::parse(
    std::string_view line) {
    auto toks = split_ws(line);
    if (toks.size() != 5 || toks[0] != "LTR") return std::nullopt;
    auto ip = keyed(toks[1], "ip");
    auto key = keyed(toks[2], "key");
    auto t = keyed(toks[3], "t");
    auto sig = keyed(toks[4], "sig");
    if (!ip || !key || !t || !sig) return std::nullopt;
    auto ip_v = Ipv4::parse(*ip);
    auto t_v = parse_tick(*t);
    if (!ip_v || !t_v) return std::nullopt;
    LocationTicketRequest ltr;
    ltr.requestor_ip = *ip_v;
    ltr.requestor_public_key = std::string(*key);
    ltr.timestamp = *t_v;
    ltr.signature_hex = std::string(*sig);
    return ltr;
}

LocationTicketRequest LocationTicketRequest::make_signed(SignatureScheme& scheme,
                                                         const KeyPair& requestor_keys,
                                                         Ipv4 ip, Tick now) {
    LocationTicketRequest ltr;
    ltr.requestor_ip = ip;
    ltr.requestor_public_key = requestor_keys.public_key;
    ltr.timestamp = now;
    ltr.signature_hex = scheme.sign(requestor_keys.private_key, ltr.signing_payload());
    return ltr;
}

std::string LocationTicket::signing_payload() const {
    std::ostringstream os;
    os << "LT ip=" << requestor_ip.to_string() << " key=" << requestor_public_key
       << " t=" << timestamp << " zone=" << zone_id << " dom=" << issuer_domain_id;
    return os.str();
}

std::string LocationTicket::serialize() const {
    return signing_payload() + " sig=" + signature_hex;
}

std::optional<LocationTicket> LocationTicket::parse(std::string_view line) {
    auto toks = split_ws(line);
    if (toks.size() != 7 || toks[0] != "LT") return std::nullopt;
    auto ip = keyed(toks[1], "ip");
    auto key = keyed(toks[2], "key");
    auto t = keyed(toks[3], "t");
    auto zone = keyed(toks[4], "zone");
    auto dom = keyed(toks[5], "dom");
    auto sig = keyed(toks[6], "sig");
    if (!ip || !key || !t || !zone || !dom || !sig) return std::nullopt;
    auto ip_v = Ipv4::parse(*ip);
    auto t_v = parse_tick(*t);
    if (!ip_v || !t_v) return std::nullopt;
    LocationTicket lt;
    lt.requestor_ip = *ip_v;
    lt.requestor_public_key = std::string(*key);
    lt.timestamp = *t_v;
    lt.zone_id = std::string(*zone);
    lt.issuer_domain_id = std::string(*dom);
    lt.signature_hex = std::string(*sig);
    return lt;
}

IssueResult issue_location_ticket(SignatureScheme& scheme, const KeyPair& issuer_keys,
                                  const std::string& issuer_domain_id,
                                  const GeoLocationTable& geo,
                                  const LocationTicketRequest& ltr,
                                  Ipv4 observed_src_ip, Tick now,
                                  Tick freshness_window) {
    if (!scheme.verify(ltr.requestor_public_key, ltr.signing_payload(),
                       ltr.signature_hex))
        return {false, TicketError::BadSignature, {}};
    if (ltr.requestor_ip != observed_src_ip)
        return {false, TicketError::IpMismatch, {}};
    const Tick age = now >= ltr.timestamp ? now - ltr.timestamp : ltr.timestamp - now;
    if (age > freshness_window) return {false, TicketError::StaleRequest, {}};
    auto zone = geo.zone_of(ltr.requestor_ip);
    if (!zone) return {false, TicketError::UnknownHost, {}};

    LocationTicket lt;
    lt.requestor_ip = ltr.requestor_ip;
    lt.requestor_public_key = ltr.requestor_public_key;
    lt.timestamp = now;
    lt.zone_id = zone->zone_id;
    lt.issuer_domain_id = issuer_domain_id;
    lt.signature_hex = scheme.sign(issuer_keys.private_key, lt.signing_payload());
    return {true, TicketError::BadSignature, lt};
}

TicketVerifyResult verify_location_ticket(SignatureScheme& scheme,
                                          const std::string& issuer_public_key,
                                          const LocationTicket& ticket, Tick now,
                                          Tick max_age, Ipv4 expected_ip,
                                          const std::string& expected_key) {
    if (!scheme.verify(issuer_public_key, ticket.signing_payload(),
                       ticket.signature_hex))
        return {false, TicketError::BadSignature};
    if (now > ticket.timestamp && now - ticket.timestamp > max_age)
        return {false, TicketError::Expired};
    if (ticket.requestor_ip != expected_ip) return {false, TicketError::IpMismatch};
    if (ticket.requestor_public_key != expected_key)
        return {false, TicketError::KeyMismatch};
    return {true, TicketError::BadSignature};
}

}  // namespace peps
