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

#include <cstdint>
#include <string>
#include <unordered_set>

#include "peps/match.hpp"
#include "peps/net.hpp"

namespace peps {

// Priority bands inside the last flow table. Remote rules always sit below
// local subscriber rules, which realizes "local overrides remote" as a
// static property instead of a per-pair comparison.
inline constexpr std::uint16_t kRemoteRptBandLow = 0;
inline constexpr std::uint16_t kRemoteRptBandHigh = 9999;
inline constexpr std::uint16_t kLocalPtBandLow = 10000;
inline constexpr std::uint16_t kLocalPtBandHigh = 19999;

enum class ActionKind : std::uint8_t {
    Drop,
    Forward,
    GotoTable,
    RateLimit,
    SendToController,
    Accept,  // pass-through: adopt the pending local verdict, restrict nothing
};

struct RuleAction {
    ActionKind kind = ActionKind::Drop;
    std::uint16_t port = 0;            // Forward
    std::uint32_t table = 0;           // GotoTable
    std::uint32_t max_new_flows = 0;   // RateLimit
    std::uint32_t window_ticks = 1;    // RateLimit

    auto operator<=>(const RuleAction&) const = default;

    static RuleAction drop() { return {ActionKind::Drop}; }
    static RuleAction forward(std::uint16_t port) {
        RuleAction a{ActionKind::Forward};
        a.port = port;
        return a;
    }
    static RuleAction goto_table(std::uint32_t table) {
        RuleAction a{ActionKind::GotoTable};
        a.table = table;
        return a;
    }
    static RuleAction rate_limit(std::uint32_t max_new_flows,
                                 std::uint32_t window_ticks) {
        RuleAction a{ActionKind::RateLimit};
        a.max_new_flows = max_new_flows;
        a.window_ticks = window_ticks == 0 ? 1 : window_ticks;
        return a;
    }
    static RuleAction send_to_controller() { return {ActionKind::SendToController}; }
    static RuleAction accept() { return {ActionKind::Accept}; }
};

enum class OriginKind : std::uint8_t { LocalCore, LocalPT, RemoteRPT };

struct RuleOrigin {
    OriginKind kind = OriginKind::LocalCore;
    std::string subscriber_id;  // LocalPT, RemoteRPT
    std::string domain_id;      // RemoteRPT

    auto operator<=>(const RuleOrigin&) const = default;

    static RuleOrigin local_core() { return {}; }
    static RuleOrigin local_pt(std::string subscriber) {
        return {OriginKind::LocalPT, std::move(subscriber), {}};
    }
    static RuleOrigin remote_rpt(std::string domain, std::string subscriber) {
        return {OriginKind::RemoteRPT, std::move(subscriber), std::move(domain)};
    }

    std::string to_string() const;
};

/// Wildcardable predicate over rule origins, used for bulk removal.
struct OriginFilter {
    std::optional<OriginKind> kind;
    std::optional<std::string> subscriber_id;
    std::optional<std::string> domain_id;

    bool matches(const RuleOrigin& o) const {
        if (kind && *kind != o.kind) return false;
        if (subscriber_id && *subscriber_id != o.subscriber_id) return false;
        if (domain_id && *domain_id != o.domain_id) return false;
        return true;
    }

    static OriginFilter any_local_pt() { return {OriginKind::LocalPT, {}, {}}; }
    static OriginFilter local_pt(std::string subscriber) {
        return {OriginKind::LocalPT, std::move(subscriber), {}};
    }
    static OriginFilter any_remote_rpt() { return {OriginKind::RemoteRPT, {}, {}}; }
    static OriginFilter remote_rpt(std::string domain, std::string subscriber) {
        return {OriginKind::RemoteRPT, std::move(subscriber), std::move(domain)};
    }
    static OriginFilter remote_domain(std::string domain) {
        return {OriginKind::RemoteRPT, {}, std::move(domain)};
    }
};

struct FlowRule {
    MatchFields match;
    RuleAction action;
    std::uint16_t priority = 0;
    std::uint32_t table_index = 0;
    RuleOrigin origin;
    std::uint64_t rule_id = 0;  // assigned by the pipeline on install

    /// RateLimit bookkeeping: distinct flows admitted in the current window.
    struct RateState {
        std::uint64_t period = ~std::uint64_t{0};
        std::unordered_set<FlowKey, FlowKeyHash> admitted;
    };
    RateState rate;
};

}  // namespace peps
