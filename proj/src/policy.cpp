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

#include "peps/policy.hpp"

#include <charconv>
#include <sstream>

namespace peps {

std::string Decision::to_string() const {
    switch (kind) {
        case Kind::Allow: return "ALLOW";
        case Kind::Deny: return "DENY";
        case Kind::RateLimit:
            return "RATELIMIT " + std::to_string(max_new_flows) + " " +
                   std::to_string(window_ticks);
    }
    return "?";
}

std::string Policy::to_line() const {
    std::ostringstream os;
    os << "PRIO " << priority << ' ' << decision.to_string();
    os << " src=" << (match.src_ip ? match.src_ip->to_string() : "*");
    os << " dst=" << (match.dst_ip ? match.dst_ip->to_string() : "*");
    os << " sport=" << (match.src_port ? std::to_string(*match.src_port) : "*");
    os << " dport=" << (match.dst_port ? std::to_string(*match.dst_port) : "*");
    os << " proto=" << (match.protocol ? peps::to_string(*match.protocol) : "*");
    return os.str();
}

namespace {

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename T>
std::optional<T> parse_uint(std::string_view s) {
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<std::int32_t> parse_int(std::string_view s) {
    std::int32_t v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

// "key=value" -> value if the key matches, else nullopt.
std::optional<std::string_view> keyed(std::string_view tok, std::string_view key) {
    if (tok.size() <= key.size() + 1) return std::nullopt;
    if (tok.substr(0, key.size()) != key || tok[key.size()] != '=')
        return std::nullopt;
    return tok.substr(key.size() + 1);
}

}  // namespace

std::optional<Policy> Policy::parse_line(std::string_view line) {
    auto toks = split_ws(line);
    std::size_t i = 0;
    auto next = [&]() -> std::optional<std::string_view> {
        if (i >= toks.size()) return std::nullopt;
        return toks[i++];
    };

    if (next() != std::optional<std::string_view>{"PRIO"}) return std::nullopt;
    auto prio_tok = next();
    if (!prio_tok) return std::nullopt;
    auto prio = parse_int(*prio_tok);
    if (!prio) return std::nullopt;

    Policy p;
    p.priority = *prio;

    auto verb = next();
    if (!verb) return std::nullopt;
    if (*verb == "ALLOW") {
        p.decision = Decision::allow();
    } else if (*verb == "DENY") {
        p.decision = Decision::deny();
    } else if (*verb == "RATELIMIT") {
        auto k = next(), w = next();
        if (!k || !w) return std::nullopt;
        auto kn = parse_uint<std::uint32_t>(*k);
        auto wn = parse_uint<std::uint32_t>(*w);
        if (!kn || !wn || *wn == 0) return std::nullopt;
        p.decision = Decision::rate_limit(*kn, *wn);
    } else {
        return std::nullopt;
    }

    auto src = next(), dst = next(), sport = next(), dport = next(), proto = next();
    if (!src || !dst || !sport || !dport || !proto || i != toks.size())
        return std::nullopt;

    auto src_v = keyed(*src, "src");
    auto dst_v = keyed(*dst, "dst");
    auto sport_v = keyed(*sport, "sport");
    auto dport_v = keyed(*dport, "dport");
    auto proto_v = keyed(*proto, "proto");
    if (!src_v || !dst_v || !sport_v || !dport_v || !proto_v) return std::nullopt;

    if (*src_v != "*") {
        auto ip = Ipv4::parse(*src_v);
        if (!ip) return std::nullopt;
        p.match.src_ip = *ip;
    }
    if (*dst_v != "*") {
        auto cidr = Cidr::parse(*dst_v);
        if (!cidr) return std::nullopt;
        p.match.dst_ip = *cidr;
    }
    if (*sport_v != "*") {
        auto v = parse_uint<std::uint16_t>(*sport_v);
        if (!v) return std::nullopt;
        p.match.src_port = *v;
    }
    if (*dport_v != "*") {
        auto v = parse_uint<std::uint16_t>(*dport_v);
        if (!v) return std::nullopt;
        p.match.dst_port = *v;
    }
    if (*proto_v != "*") {
        auto v = parse_protocol(*proto_v);
        if (!v) return std::nullopt;
        p.match.protocol = *v;
    }
    return p;
}

Decision decide(std::span<const Policy> policies, const PacketHeader& pkt) {
    const Policy* p = deciding_policy(policies, pkt);
    return p ? p->decision : Decision::deny();
}

const Policy* deciding_policy(std::span<const Policy> policies,
                              const PacketHeader& pkt) {
    const Policy* best = nullptr;
    for (const auto& p : policies) {
        if (!p.match.matches(pkt)) continue;
        if (!best || p.priority > best->priority) best = &p;
    }
    return best;
}

bool conflicts(const Policy& a, const Policy& b, const HeaderUniverse& universe) {
    if (a.decision == b.decision) return false;
    bool found = false;
    universe.scan([&](const PacketHeader& pkt) {
        if (a.match.matches(pkt) && b.match.matches(pkt)) {
            found = true;
            return false;
        }
        return true;
    });
    return found;
}

std::vector<Policy> parse_policy_lines(std::span<const std::string> lines) {
    std::vector<Policy> out;
    for (const auto& line : lines) {
        auto p = Policy::parse_line(line);
        if (!p) throw std::invalid_argument("bad policy line: " + line);
        out.push_back(std::move(*p));
    }
    return out;
}

}  // namespace peps
