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

#include "peps/scenario.hpp"

#include <charconv>
#include <sstream>

namespace peps {

namespace {

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename T>
std::optional<T> to_uint(std::string_view s) {
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<std::string_view> keyed(std::string_view tok, std::string_view key) {
    if (tok.size() <= key.size() + 1) return std::nullopt;
    if (tok.substr(0, key.size()) != key || tok[key.size()] != '=')
        return std::nullopt;
    return tok.substr(key.size() + 1);
}

std::optional<PortRef> parse_port_ref(std::string_view s) {
    auto c1 = s.find(':');
    if (c1 == std::string_view::npos) return std::nullopt;
    auto c2 = s.find(':', c1 + 1);
    if (c2 == std::string_view::npos) return std::nullopt;
    auto port = to_uint<std::uint16_t>(s.substr(c2 + 1));
    if (!port || c1 == 0 || c2 == c1 + 1) return std::nullopt;
    return PortRef{std::string(s.substr(0, c1)),
                   std::string(s.substr(c1 + 1, c2 - c1 - 1)), *port};
}

std::vector<std::string> split_commas(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto comma = s.find(',', start);
        if (comma == std::string_view::npos) {
            if (start < s.size()) out.emplace_back(s.substr(start));
            break;
        }
        out.emplace_back(s.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

struct Section {
    std::string name;
    std::vector<std::string> args;
    std::size_t line = 0;
};

}  // namespace

std::string PortRef::to_string() const {
    return domain + ":" + sw + ":" + std::to_string(port);
}

Scenario parse_scenario(std::string_view text) {
    Scenario sc;
    Section section;

    std::vector<Ipv4> uni_hosts;
    std::vector<std::uint16_t> uni_ports;
    std::vector<Protocol> uni_protocols;
    std::size_t universe_line = 0;

    auto fail = [](std::size_t line, const std::string& msg) -> void {
        throw ScenarioParseError(line, msg);
    };

    auto parse_policy_into = [&](std::vector<Policy>& dst, const std::string& line,
                                 std::size_t lineno) {
        auto p = Policy::parse_line(line);
        if (!p) fail(lineno, "bad policy line");
        dst.push_back(std::move(*p));
    };

    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        ++lineno;
        auto nl = text.find('\n', start);
        std::string_view raw =
            nl == std::string_view::npos
                ? text.substr(start)
                : text.substr(start, nl - start);
        start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

        std::string line(raw);
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' ||
                                 line.back() == '\r'))
            line.pop_back();
        std::size_t indent = 0;
        while (indent < line.size() && (line[indent] == ' ' || line[indent] == '\t'))
            ++indent;
        line.erase(0, indent);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(lineno, "unterminated section header");
            auto inner = split_ws(std::string_view(line).substr(1, line.size() - 2));
            if (inner.empty()) fail(lineno, "empty section header");
            section = Section{inner.front(),
                              {inner.begin() + 1, inner.end()},
                              lineno};

            // Header-only sections take their arguments right here.
            if (section.name == "pt") {
                if (section.args.size() < 2) fail(lineno, "pt needs <domain> <sub>");
                PtSpec pt;
                pt.domain = section.args[0];
                pt.subscriber_id = section.args[1];
                for (std::size_t i = 2; i < section.args.size(); ++i) {
                    if (auto v = keyed(section.args[i], "seq"))
                        pt.seq = to_uint<std::uint64_t>(*v).value_or(0);
                    else if (auto t = keyed(section.args[i], "at"))
                        pt.at = to_uint<Tick>(*t).value_or(0);
                    else
                        fail(lineno, "unknown pt argument");
                }
                sc.pts.push_back(std::move(pt));
            } else if (section.name == "rpt") {
                if (section.args.size() < 3)
                    fail(lineno, "rpt needs <from> <to> <sub>");
                RptSpec rpt;
                rpt.from = section.args[0];
                rpt.to = section.args[1];
                rpt.subscriber_id = section.args[2];
                for (std::size_t i = 3; i < section.args.size(); ++i) {
                    if (auto v = keyed(section.args[i], "seq"))
                        rpt.seq = to_uint<std::uint64_t>(*v).value_or(0);
                    else if (auto t = keyed(section.args[i], "at"))
                        rpt.at = to_uint<Tick>(*t).value_or(0);
                    else if (auto s = keyed(section.args[i], "scope")) {
                        auto addr = ServiceAddress::parse(*s);
                        if (!addr) fail(lineno, "bad scope address");
                        rpt.scope_override = *addr;
                    } else {
                        fail(lineno, "unknown rpt argument");
                    }
                }
                sc.rpts.push_back(std::move(rpt));
            } else if (section.name == "session") {
                if (section.args.size() < 3)
                    fail(lineno, "session needs <provider> <requestor> <sub>");
                SessionSpec s;
                s.provider = section.args[0];
                s.requestor = section.args[1];
                s.subscriber_id = section.args[2];
                for (std::size_t i = 3; i < section.args.size(); ++i) {
                    if (auto z = keyed(section.args[i], "zones")) {
                        for (auto& zone : split_commas(*z)) s.zones.insert(zone);
                    } else if (auto t = keyed(section.args[i], "at")) {
                        s.at = to_uint<Tick>(*t).value_or(0);
                    } else {
                        fail(lineno, "unknown session argument");
                    }
                }
                sc.sessions.push_back(std::move(s));
            } else if (section.name == "policy-change") {
                if (section.args.empty()) fail(lineno, "policy-change needs <domain>");
                PolicyChangeSpec pc;
                pc.domain = section.args[0];
                for (std::size_t i = 1; i < section.args.size(); ++i) {
                    if (auto t = keyed(section.args[i], "at"))
                        pc.at = to_uint<Tick>(*t).value_or(0);
                    else
                        fail(lineno, "unknown policy-change argument");
                }
                sc.policy_changes.push_back(std::move(pc));
            } else if (section.name == "provider") {
                if (section.args.size() != 2)
                    fail(lineno, "provider needs <host> <ports>");
                ProviderSpec prov;
                prov.host_id = section.args[0];
                if (section.args[1] != "*") {
                    for (auto& p : split_commas(section.args[1])) {
                        auto v = to_uint<std::uint16_t>(p);
                        if (!v) fail(lineno, "bad provider port");
                        prov.ports.push_back(*v);
                    }
                }
                sc.providers.push_back(std::move(prov));
            } else if (section.name == "policies") {
                if (section.args.size() != 1) fail(lineno, "policies needs <domain>");
            } else if (section.name == "universe") {
                universe_line = lineno;
            }
            continue;
        }

        const auto toks = split_ws(line);

        if (section.name == "topology") {
            if (toks[0] == "domain" && toks.size() == 2) {
                sc.domains.push_back(toks[1]);
            } else if (toks[0] == "switch" &&
                       (toks.size() == 2 || toks.size() == 3)) {
                auto colon = toks[1].find(':');
                if (colon == std::string::npos) fail(lineno, "switch needs dom:sw");
                SwitchSpec sw;
                sw.domain = toks[1].substr(0, colon);
                sw.id = toks[1].substr(colon + 1);
                if (toks.size() == 3) {
                    if (toks[2] != "edge") fail(lineno, "unknown switch flag");
                    sw.edge = true;
                }
                sc.switches.push_back(std::move(sw));
            } else if (toks[0] == "host" && toks.size() == 4) {
                auto ip = Ipv4::parse(toks[2]);
                auto at = parse_port_ref(toks[3]);
                if (!ip || !at) fail(lineno, "bad host line");
                sc.hosts.push_back(HostSpec{toks[1], *ip, *at});
            } else if (toks[0] == "link" && toks.size() == 3) {
                auto a = parse_port_ref(toks[1]);
                auto b = parse_port_ref(toks[2]);
                if (!a || !b) fail(lineno, "bad link endpoints");
                sc.links.push_back(LinkSpec{*a, *b});
            } else {
                fail(lineno, "unknown topology line");
            }
        } else if (section.name == "zones") {
            if (toks[0] == "zone" && toks.size() >= 3) {
                LocationZone z;
                z.zone_id = toks[1];
                if (toks[2] == "secure")
                    z.security = SecurityClass::Secure;
                else if (toks[2] == "nonsecure")
                    z.security = SecurityClass::NonSecure;
                else
                    fail(lineno, "zone class must be secure|nonsecure");
                for (std::size_t i = 3; i < toks.size(); ++i) {
                    if (!z.label.empty()) z.label += ' ';
                    z.label += toks[i];
                }
                sc.zones.push_back(std::move(z));
            } else if (toks[0] == "map" && toks.size() == 3) {
                auto ref = parse_port_ref(toks[1]);
                if (!ref) fail(lineno, "bad zone map port");
                sc.zone_maps.push_back(ZoneMapSpec{*ref, toks[2]});
            } else {
                fail(lineno, "unknown zones line");
            }
        } else if (section.name == "universe") {
            if (toks[0] == "hosts") {
                for (std::size_t i = 1; i < toks.size(); ++i) {
                    auto ip = Ipv4::parse(toks[i]);
                    if (!ip) fail(lineno, "bad universe host");
                    uni_hosts.push_back(*ip);
                }
            } else if (toks[0] == "ports") {
                for (std::size_t i = 1; i < toks.size(); ++i) {
                    auto p = to_uint<std::uint16_t>(toks[i]);
                    if (!p) fail(lineno, "bad universe port");
                    uni_ports.push_back(*p);
                }
            } else if (toks[0] == "protocols") {
                for (std::size_t i = 1; i < toks.size(); ++i) {
                    auto p = parse_protocol(toks[i]);
                    if (!p) fail(lineno, "bad universe protocol");
                    uni_protocols.push_back(*p);
                }
            } else {
                fail(lineno, "unknown universe line");
            }
        } else if (section.name == "policies") {
            parse_policy_into(sc.local_policies[section.args[0]], line, lineno);
        } else if (section.name == "provider") {
            parse_policy_into(sc.providers.back().inner_pep, line, lineno);
        } else if (section.name == "pt") {
            parse_policy_into(sc.pts.back().policies, line, lineno);
        } else if (section.name == "rpt") {
            parse_policy_into(sc.rpts.back().policies, line, lineno);
        } else if (section.name == "subscribers") {
            if (toks[0] != "subscriber" || toks.size() < 5)
                fail(lineno, "bad subscriber line");
            SubscriberSpec sub;
            sub.domain = toks[1];
            sub.id = toks[2];
            auto addr = ServiceAddress::parse(toks[3]);
            if (!addr) fail(lineno, "bad service address");
            sub.address = *addr;
            if (toks[4] == "local") {
                if (toks.size() != 5) fail(lineno, "bad subscriber line");
            } else if (toks[4] == "remote") {
                if (toks.size() != 6) fail(lineno, "remote subscriber needs origin");
                sub.remote = true;
                sub.origin_domain = toks[5];
            } else {
                fail(lineno, "subscriber kind must be local|remote");
            }
            sc.subscribers.push_back(std::move(sub));
        } else if (section.name == "channels") {
            if (toks[0] != "channel" || toks.size() != 3)
                fail(lineno, "bad channel line");
            sc.channels.push_back(ChannelSpec{toks[1], toks[2]});
        } else if (section.name == "policy-change") {
            parse_policy_into(sc.policy_changes.back().policies, line, lineno);
        } else if (section.name == "inject") {
            if (toks.size() < 4 || toks[0] != "at")
                fail(lineno, "inject: at <tick> from <host> ...");
            InjectSpec inj;
            auto t = to_uint<Tick>(toks[1]);
            if (!t || toks[2] != "from") fail(lineno, "inject: at <tick> from <host>");
            inj.at = *t;
            inj.from_host = toks[3];
            bool have_dst = false;
            for (std::size_t i = 4; i < toks.size(); ++i) {
                if (auto v = keyed(toks[i], "dst")) {
                    auto ip = Ipv4::parse(*v);
                    if (!ip) fail(lineno, "bad inject dst");
                    inj.dst = *ip;
                    have_dst = true;
                } else if (auto v2 = keyed(toks[i], "src")) {
                    auto ip = Ipv4::parse(*v2);
                    if (!ip) fail(lineno, "bad inject src");
                    inj.src_override = *ip;
                } else if (auto v3 = keyed(toks[i], "via")) {
                    auto ref = parse_port_ref(*v3);
                    if (!ref) fail(lineno, "bad inject via");
                    inj.via = *ref;
                } else if (auto v4 = keyed(toks[i], "sport")) {
                    auto p = to_uint<std::uint16_t>(*v4);
                    if (!p) fail(lineno, "bad sport");
                    inj.sport = *p;
                } else if (auto v5 = keyed(toks[i], "dport")) {
                    auto p = to_uint<std::uint16_t>(*v5);
                    if (!p) fail(lineno, "bad dport");
                    inj.dport = *p;
                } else if (auto v6 = keyed(toks[i], "proto")) {
                    auto p = parse_protocol(*v6);
                    if (!p) fail(lineno, "bad proto");
                    inj.proto = *p;
                } else if (auto v7 = keyed(toks[i], "count")) {
                    auto c = to_uint<std::uint32_t>(*v7);
                    if (!c || *c == 0) fail(lineno, "bad count");
                    inj.count = *c;
                } else if (auto v8 = keyed(toks[i], "step")) {
                    auto s = to_uint<Tick>(*v8);
                    if (!s) fail(lineno, "bad step");
                    inj.step = *s;
                } else {
                    fail(lineno, "unknown inject key");
                }
            }
            if (!have_dst || inj.dport == 0) fail(lineno, "inject needs dst and dport");
            sc.injects.push_back(std::move(inj));
        } else if (section.name == "actions") {
            if (toks.size() < 3 || toks[0] != "at") fail(lineno, "bad action line");
            auto t = to_uint<Tick>(toks[1]);
            if (!t) fail(lineno, "bad action tick");
            ActionSpec act;
            act.at = *t;
            if (toks[2] == "pin" && toks.size() == 4) {
                act.kind = ActionSpec::Kind::Pin;
                act.host_id = toks[3];
            } else if (toks[2] == "teardown" && toks.size() == 6) {
                act.kind = ActionSpec::Kind::Teardown;
                act.a = toks[3];
                act.b = toks[4];
                act.subscriber_id = toks[5];
            } else if (toks[2] == "tamper" && toks.size() == 5) {
                act.kind = ActionSpec::Kind::Tamper;
                act.a = toks[3];
                act.b = toks[4];
            } else {
                fail(lineno, "unknown action");
            }
            sc.actions.push_back(std::move(act));
        } else if (section.name == "hooks") {
            if (toks[0] == "disable_outer" && toks.size() == 2) {
                sc.disable_outer.insert(toks[1]);
            } else {
                fail(lineno, "unknown hook");
            }
        } else {
            fail(lineno, "line outside any known section");
        }
    }

    if (!uni_hosts.empty() || !uni_ports.empty() || !uni_protocols.empty()) {
        if (uni_hosts.empty() || uni_ports.empty() || uni_protocols.empty())
            fail(universe_line, "universe needs hosts, ports and protocols");
        try {
            sc.universe = HeaderUniverse{uni_hosts, uni_ports, uni_protocols};
        } catch (const std::invalid_argument& e) {
            fail(universe_line, e.what());
        }
    }
    return sc;
}

}  // namespace peps
