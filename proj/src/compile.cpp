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

#include "peps/compile.hpp"

#include <algorithm>
#include <numeric>

namespace peps {

namespace {

std::pair<std::uint16_t, std::uint16_t> band_for(const RuleOrigin& origin) {
    if (origin.kind == OriginKind::RemoteRPT)
        return {kRemoteRptBandLow, kRemoteRptBandHigh};
    return {kLocalPtBandLow, kLocalPtBandHigh};
}

}  // namespace

CompileResult compile_transfer(std::span<const Policy> policies,
                               const RuleOrigin& origin,
                               std::uint32_t last_table_index) {
    const auto [band_low, band_high] = band_for(origin);
    const std::size_t band_width = band_high - band_low + 1;
    if (policies.size() > band_width) return {false, true, {}};

    // Precedence order = decide() order: priority desc, then list position.
    std::vector<std::size_t> order(policies.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return policies[a].priority > policies[b].priority;
    });

    CompileResult result;
    result.ok = true;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const Policy& p = policies[order[rank]];

        RuleAction action;
        switch (p.decision.kind) {
            case Decision::Kind::Deny:
                action = RuleAction::drop();
                break;
            case Decision::Kind::RateLimit:
                action = RuleAction::rate_limit(p.decision.max_new_flows,
                                                p.decision.window_ticks);
                break;
            case Decision::Kind::Allow: {
                // Emit a pass-through only when this Allow shadows a
                // lower-precedence restriction of the same transfer.
                bool shadows = false;
                for (std::size_t later = rank + 1; later < order.size(); ++later) {
                    const Policy& q = policies[order[later]];
                    if (!q.decision.is_allow() && p.match.intersects(q.match)) {
                        shadows = true;
                        break;
                    }
                }
                if (!shadows) continue;
                action = RuleAction::accept();
                break;
            }
        }

        FlowRule rule;
        rule.match = p.match;
        rule.action = action;
        rule.priority = static_cast<std::uint16_t>(band_high - rank);
        rule.table_index = last_table_index;
        rule.origin = origin;
        result.rules.push_back(std::move(rule));
    }
    return result;
}

CompileResult compile_to_rules(const ComposedPolicySet& accepted,
                               std::uint32_t last_table_index) {
    CompileResult all;
    all.ok = true;
    for (const auto& [subscriber, policies] : accepted.accepted_pt) {
        auto one = compile_transfer(policies, RuleOrigin::local_pt(subscriber),
                                    last_table_index);
        if (!one.ok) return one;
        all.rules.insert(all.rules.end(), one.rules.begin(), one.rules.end());
    }
    for (const auto& [key, policies] : accepted.accepted_rpt) {
        auto one = compile_transfer(
            policies, RuleOrigin::remote_rpt(key.first, key.second),
            last_table_index);
        if (!one.ok) return one;
        all.rules.insert(all.rules.end(), one.rules.begin(), one.rules.end());
    }
    return all;
}

}  // namespace peps
