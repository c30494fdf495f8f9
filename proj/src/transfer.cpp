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

#include "peps/transfer.hpp"

#include <charconv>
#include <sstream>

namespace peps {

namespace {

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < text.size()) lines.emplace_back(text.substr(start));
            break;
        }
        lines.emplace_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
    std::uint64_t v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

// "KEYWORD rest" -> rest, or nullopt when the line does not start with it.
std::optional<std::string_view> after_keyword(std::string_view line,
                                              std::string_view keyword) {
    if (line.size() <= keyword.size() + 1) return std::nullopt;
    if (line.substr(0, keyword.size()) != keyword || line[keyword.size()] != ' ')
        return std::nullopt;
    return line.substr(keyword.size() + 1);
}

}  // namespace

bool ServiceAddress::covers_port(std::uint16_t port) const {
    if (ports.empty()) return true;
    for (auto p : ports)
        if (p == port) return true;
    return false;
}

std::string ServiceAddress::to_string() const {
    std::ostringstream os;
    os << ip.to_string() << ':';
    if (ports.empty()) {
        os << '*';
    } else {
        for (std::size_t i = 0; i < ports.size(); ++i) {
            if (i) os << ',';
            os << ports[i];
        }
    }
    return os.str();
}

std::optional<ServiceAddress> ServiceAddress::parse(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    auto ip = Ipv4::parse(text.substr(0, colon));
    if (!ip) return std::nullopt;
    ServiceAddress addr{*ip, {}};
    auto ports = text.substr(colon + 1);
    if (ports == "*") return addr;
    std::size_t start = 0;
    while (start <= ports.size()) {
        auto comma = ports.find(',', start);
        auto tok = ports.substr(start, comma == std::string_view::npos
                                           ? std::string_view::npos
                                           : comma - start);
        std::uint16_t v{};
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || p != tok.data() + tok.size()) return std::nullopt;
        addr.ports.push_back(v);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (addr.ports.empty()) return std::nullopt;
    return addr;
}

std::string PolicyTransfer::signing_payload() const {
    std::ostringstream os;
    os << "SUBSCRIBER " << subscriber_id << '\n';
    os << "SEQ " << sequence_number << '\n';
    for (const auto& p : policies) os << p.to_line() << '\n';
    return os.str();
}

std::string PolicyTransfer::serialize() const {
    return signing_payload() + "SIG " + signature_hex + "\n";
}

std::optional<PolicyTransfer> PolicyTransfer::parse(std::string_view text) {
    auto lines = split_lines(text);
    if (lines.size() < 3) return std::nullopt;
    PolicyTransfer pt;
    std::size_t i = 0;
    auto sub = after_keyword(lines[i], "SUBSCRIBER");
    if (!sub) return std::nullopt;
    pt.subscriber_id = std::string(*sub);
    ++i;
    auto seq = after_keyword(lines[i], "SEQ");
    if (!seq) return std::nullopt;
    auto seq_v = parse_u64(*seq);
    if (!seq_v) return std::nullopt;
    pt.sequence_number = *seq_v;
    ++i;
    for (; i + 1 < lines.size(); ++i) {
        auto p = Policy::parse_line(lines[i]);
        if (!p) return std::nullopt;
        pt.policies.push_back(std::move(*p));
    }
    auto sig = after_keyword(lines[i], "SIG");
    if (!sig) return std::nullopt;
    pt.signature_hex = std::string(*sig);
    return pt;
}

void PolicyTransfer::sign_with(SignatureScheme& scheme, const KeyPair& keys) {
    signature_hex = scheme.sign(keys.private_key, signing_payload());
}

std::string RemotePolicyTransfer::signing_payload() const {
    std::ostringstream os;
    os << "SUBSCRIBER " << subscriber_id << '\n';
    os << "DOMAIN " << origin_domain_id << '\n';
    os << "SCOPE " << subscriber_service_address.to_string() << '\n';
    os << "SEQ " << sequence_number << '\n';
    for (const auto& p : policies) os << p.to_line() << '\n';
    return os.str();
}

std::string RemotePolicyTransfer::serialize() const {
    return signing_payload() + "SIG " + signature_hex + "\n";
}

std::optional<RemotePolicyTransfer> RemotePolicyTransfer::parse(
    std::string_view text) {
    auto lines = split_lines(text);
    if (lines.size() < 5) return std::nullopt;
    RemotePolicyTransfer rpt;
    std::size_t i = 0;
    auto sub = after_keyword(lines[i], "SUBSCRIBER");
    if (!sub) return std::nullopt;
    rpt.subscriber_id = std::string(*sub);
    ++i;
    auto dom = after_keyword(lines[i], "DOMAIN");
    if (!dom) return std::nullopt;
    rpt.origin_domain_id = std::string(*dom);
    ++i;
    auto scope = after_keyword(lines[i], "SCOPE");
    if (!scope) return std::nullopt;
    auto addr = ServiceAddress::parse(*scope);
    if (!addr) return std::nullopt;
    rpt.subscriber_service_address = *addr;
    ++i;
    auto seq = after_keyword(lines[i], "SEQ");
    if (!seq) return std::nullopt;
    auto seq_v = parse_u64(*seq);
    if (!seq_v) return std::nullopt;
    rpt.sequence_number = *seq_v;
    ++i;
    for (; i + 1 < lines.size(); ++i) {
        auto p = Policy::parse_line(lines[i]);
        if (!p) return std::nullopt;
        rpt.policies.push_back(std::move(*p));
    }
    auto sig = after_keyword(lines[i], "SIG");
    if (!sig) return std::nullopt;
    rpt.signature_hex = std::string(*sig);
    return rpt;
}

void RemotePolicyTransfer::sign_with(SignatureScheme& scheme, const KeyPair& keys) {
    signature_hex = scheme.sign(keys.private_key, signing_payload());
}

}  // namespace peps
