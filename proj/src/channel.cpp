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

#include "peps/channel.hpp"

#include <charconv>
#include <sstream>

namespace peps {

namespace {

std::string type_name(EwEnvelope::Type t) {
    switch (t) {
        case EwEnvelope::Type::Rpt: return "RPT";
        case EwEnvelope::Type::Session: return "SESSION";
        case EwEnvelope::Type::Binding: return "BINDING";
    }
    return "?";
}

std::optional<EwEnvelope::Type> parse_type(std::string_view s) {
    if (s == "RPT") return EwEnvelope::Type::Rpt;
    if (s == "SESSION") return EwEnvelope::Type::Session;
    if (s == "BINDING") return EwEnvelope::Type::Binding;
    return std::nullopt;
}

}  // namespace

std::string escape_payload(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case ' ': out += "\\s"; break;
            default: out += c;
        }
    }
    return out;
}

std::optional<std::string> unescape_payload(std::string_view escaped) {
    std::string out;
    out.reserve(escaped.size());
    for (std::size_t i = 0; i < escaped.size(); ++i) {
        if (escaped[i] != '\\') {
            out += escaped[i];
            continue;
        }
        if (++i >= escaped.size()) return std::nullopt;
        switch (escaped[i]) {
            case '\\': out += '\\'; break;
            case 'n': out += '\n'; break;
            case 's': out += ' '; break;
            default: return std::nullopt;
        }
    }
    return out;
}

std::string EwEnvelope::signing_payload() const {
    std::ostringstream os;
    os << "EW " << from_domain << ' ' << to_domain << " SEQ " << seq << " TYPE "
       << type_name(type) << ' ' << escape_payload(payload);
    return os.str();
}

std::string EwEnvelope::line() const {
    return signing_payload() + " SIG " + signature_hex;
}

std::optional<EwEnvelope> EwEnvelope::parse(std::string_view line) {
    std::vector<std::string_view> toks;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ') ++j;
        if (j > i) toks.push_back(line.substr(i, j - i));
        i = j;
    }
    if (toks.size() != 10 || toks[0] != "EW" || toks[3] != "SEQ" ||
        toks[5] != "TYPE" || toks[8] != "SIG")
        return std::nullopt;
    EwEnvelope env;
    env.from_domain = std::string(toks[1]);
    env.to_domain = std::string(toks[2]);
    std::uint64_t seq{};
    auto [p, ec] = std::from_chars(toks[4].data(), toks[4].data() + toks[4].size(),
                                   seq);
    if (ec != std::errc{} || p != toks[4].data() + toks[4].size())
        return std::nullopt;
    env.seq = seq;
    auto type = parse_type(toks[6]);
    if (!type) return std::nullopt;
    env.type = *type;
    auto payload = unescape_payload(toks[7]);
    if (!payload) return std::nullopt;
    env.payload = std::move(*payload);
    env.signature_hex = std::string(toks[9]);
    return env;
}

EastWestChannel::SendReceipt EastWestChannel::send(const DomainId& from,
                                                   EwEnvelope::Type type,
                                                   std::string payload,
                                                   SignatureScheme& scheme,
                                                   const KeyPair& sender_keys,
                                                   Tick now) {
    if (!active_) return {false, "ChannelDown", 0};
    if (from != domain_a_ && from != domain_b_) return {false, "NotEndpoint", 0};

    const bool from_a = (from == domain_a_);
    EwEnvelope env;
    env.from_domain = from;
    env.to_domain = from_a ? domain_b_ : domain_a_;
    env.seq = from_a ? ++seq_to_b_ : ++seq_to_a_;
    env.type = type;
    env.payload = std::move(payload);
    env.signature_hex = scheme.sign(sender_keys.private_key, env.signing_payload());

    bool& tamper = from_a ? tamper_from_a_ : tamper_from_b_;
    if (tamper) {
        env.payload += "\n";  // corrupt after signing
        tamper = false;
    }

    auto& queue = from_a ? to_b_ : to_a_;
    queue.push_back({now + latency_, env});
    return {true, {}, env.seq};
}

std::vector<EwEnvelope> EastWestChannel::collect_due(Tick now) {
    std::vector<EwEnvelope> out;
    for (auto* queue : {&to_b_, &to_a_}) {
        while (!queue->empty() && queue->front().deliver_at <= now) {
            out.push_back(std::move(queue->front().env));
            queue->pop_front();
        }
    }
    return out;
}

void EastWestChannel::teardown() {
    active_ = false;
    to_a_.clear();
    to_b_.clear();
}

void EastWestChannel::tamper_next(const DomainId& from) {
    if (from == domain_a_) tamper_from_a_ = true;
    if (from == domain_b_) tamper_from_b_ = true;
}

}  // namespace peps
