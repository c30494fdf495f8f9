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

#include <set>
#include <stdexcept>

#include "peps/geo.hpp"
#include "peps/policy.hpp"
#include "peps/transfer.hpp"

namespace peps {

class ScenarioParseError : public std::runtime_error {
 public:
    ScenarioParseError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message),
          line_(line) {}
    std::size_t line() const { return line_; }

 private:
    std::size_t line_;
};

/// A network endpoint "domain:switch:port".
struct PortRef {
    DomainId domain;
    SwitchId sw;
    std::uint16_t port = 0;

    auto operator<=>(const PortRef&) const = default;
    std::string to_string() const;
};

struct SwitchSpec {
    DomainId domain;
    SwitchId id;
    bool edge = false;  // explicit tag; host/inter-domain ports also imply it
};

struct HostSpec {
    std::string id;
    Ipv4 ip;
    PortRef attach;
};

struct LinkSpec {
    PortRef a;
    PortRef b;
};

struct ZoneMapSpec {
    PortRef port;
    std::string zone_id;
};

struct SubscriberSpec {
    DomainId domain;  // registering controller
    std::string id;
    ServiceAddress address;
    bool remote = false;
    DomainId origin_domain;  // remote only
};

struct ProviderSpec {
    std::string host_id;
    std::vector<std::uint16_t> ports;
    std::vector<Policy> inner_pep;
};

struct ChannelSpec {
    DomainId a;
    DomainId b;
};

struct PtSpec {
    Tick at = 0;
    DomainId domain;
    std::string subscriber_id;
    std::uint64_t seq = 1;
    std::vector<Policy> policies;
};

struct RptSpec {
    Tick at = 0;
    DomainId from;
    DomainId to;
    std::string subscriber_id;
    std::uint64_t seq = 1;
    std::optional<ServiceAddress> scope_override;  // mis-scoping test entries
    std::vector<Policy> policies;
};

struct SessionSpec {
    Tick at = 0;
    DomainId provider;
    DomainId requestor;
    std::string subscriber_id;
    std::set<std::string> zones;
};

struct PolicyChangeSpec {
    Tick at = 0;
    DomainId domain;
    std::vector<Policy> policies;
};

struct InjectSpec {
    Tick at = 0;
    std::string from_host;
    std::optional<Ipv4> src_override;      // spoofed source address
    std::optional<PortRef> via;            // spoofed entry point
    Ipv4 dst;
    std::uint16_t sport = 40000;
    std::uint16_t dport = 0;
    Protocol proto = Protocol::Tcp;
    std::uint32_t count = 1;
    Tick step = 1;  // spacing between repeated packets
};

struct ActionSpec {
    enum class Kind : std::uint8_t { Pin, Teardown, Tamper };
    Tick at = 0;
    Kind kind = Kind::Pin;
    std::string host_id;                    // Pin
    DomainId a, b;                          // Teardown (provider, requestor), Tamper (from, to)
    std::string subscriber_id;              // Teardown
};

struct Scenario {
    std::vector<DomainId> domains;
    std::vector<SwitchSpec> switches;
    std::vector<HostSpec> hosts;
    std::vector<LinkSpec> links;

    std::vector<LocationZone> zones;
    std::vector<ZoneMapSpec> zone_maps;

    std::map<DomainId, std::vector<Policy>> local_policies;
    std::vector<SubscriberSpec> subscribers;
    std::vector<ProviderSpec> providers;
    std::vector<ChannelSpec> channels;

    std::optional<HeaderUniverse> universe;

    std::vector<PtSpec> pts;
    std::vector<RptSpec> rpts;
    std::vector<SessionSpec> sessions;
    std::vector<PolicyChangeSpec> policy_changes;
    std::vector<InjectSpec> injects;
    std::vector<ActionSpec> actions;

    std::set<DomainId> disable_outer;  // failed-outer-layer hook
};

/// Parses the line-oriented scenario grammar (see docs/scenario-format.md).
/// Throws ScenarioParseError with the offending line number.
Scenario parse_scenario(std::string_view text);

}  // namespace peps
