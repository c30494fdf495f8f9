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

#include "peps/pipeline.hpp"

#include <algorithm>
#include <sstream>

namespace peps {

std::string RuleOrigin::to_string() const {
    switch (kind) {
        case OriginKind::LocalCore: return "LocalCore";
        case OriginKind::LocalPT: return "LocalPT(" + subscriber_id + ")";
        case OriginKind::RemoteRPT:
            return "RemoteRPT(" + domain_id + "," + subscriber_id + ")";
    }
    return "?";
}

std::string PipelineVerdict::to_string() const {
    switch (kind) {
        case Kind::Forward: return "Forward(" + std::to_string(port) + ")";
        case Kind::Drop: return "Drop";
        case Kind::SendToController: return "SendToController";
        case Kind::RateLimited: return "RateLimited";
    }
    return "?";
}

std::string to_string(InstallError e) {
    switch (e) {
        case InstallError::TablePlacementViolation: return "TablePlacementViolation";
        case InstallError::PriorityBandViolation: return "PriorityBandViolation";
        case InstallError::InvalidGotoTarget: return "InvalidGotoTarget";
    }
    return "?";
}

const FlowRule* FlowTable::match(const PacketHeader& pkt) const {
    const FlowRule* best = nullptr;
    for (const auto& r : rules) {
        if (!r.match.matches(pkt)) continue;
        if (!best || r.priority > best->priority ||
            (r.priority == best->priority && r.rule_id < best->rule_id)) {
            best = &r;
        }
    }
    return best;
}

FlowRule* FlowTable::match(const PacketHeader& pkt) {
    return const_cast<FlowRule*>(static_cast<const FlowTable*>(this)->match(pkt));
}

FlowTablePipeline::FlowTablePipeline(std::size_t table_count) {
    if (table_count < 2)
        throw MalformedPipeline("pipeline needs at least two tables");
    tables_.resize(table_count);
}

InstallResult FlowTablePipeline::install(FlowRule rule) {
    const auto last = last_table_index();
    if (rule.table_index >= tables_.size())
        return {false, InstallError::TablePlacementViolation, 0};

    const bool is_policy_rule = rule.origin.kind != OriginKind::LocalCore;
    if (is_policy_rule != (rule.table_index == last))
        return {false, InstallError::TablePlacementViolation, 0};

    if (rule.origin.kind == OriginKind::RemoteRPT &&
        rule.priority > kRemoteRptBandHigh)
        return {false, InstallError::PriorityBandViolation, 0};
    if (rule.origin.kind == OriginKind::LocalPT &&
        (rule.priority < kLocalPtBandLow || rule.priority > kLocalPtBandHigh))
        return {false, InstallError::PriorityBandViolation, 0};

    if (rule.action.kind == ActionKind::GotoTable) {
        // The last table is entered implicitly, never by an explicit jump.
        if (rule.action.table <= rule.table_index || rule.action.table >= last)
            return {false, InstallError::InvalidGotoTarget, 0};
    }

    rule.rule_id = next_rule_id_++;
    rule.rate = {};
    const auto id = rule.rule_id;
    tables_[rule.table_index].rules.push_back(std::move(rule));
    return {true, InstallError::TablePlacementViolation, id};
}

std::size_t FlowTablePipeline::remove_by_origin(const OriginFilter& filter) {
    std::size_t removed = 0;
    for (auto& t : tables_) {
        auto it = std::remove_if(t.rules.begin(), t.rules.end(),
                                 [&](const FlowRule& r) {
                                     return filter.matches(r.origin);
                                 });
        removed += static_cast<std::size_t>(t.rules.end() - it);
        t.rules.erase(it, t.rules.end());
    }
    return removed;
}

bool FlowTablePipeline::remove_rule(std::uint64_t rule_id) {
    for (auto& t : tables_) {
        for (auto it = t.rules.begin(); it != t.rules.end(); ++it) {
            if (it->rule_id == rule_id) {
                t.rules.erase(it);
                return true;
            }
        }
    }
    return false;
}

bool FlowTablePipeline::charge_rate_limit(FlowRule& rule, const PacketHeader& pkt,
                                          Tick now) {
    const auto window = std::max<std::uint32_t>(rule.action.window_ticks, 1);
    const auto period = now / window;
    if (rule.rate.period != period) {
        rule.rate.period = period;
        rule.rate.admitted.clear();
    }
    const FlowKey key{pkt};
    if (rule.rate.admitted.contains(key)) return true;
    if (rule.rate.admitted.size() < rule.action.max_new_flows) {
        rule.rate.admitted.insert(key);
        return true;
    }
    return false;
}

PipelineVerdict FlowTablePipeline::process(const PacketHeader& pkt, Tick now,
                                           bool skip_last_table) {
    const auto last = last_table_index();
    std::size_t cur = 0;
    std::optional<std::uint16_t> pending;

    auto decided = [](PipelineVerdict v, const FlowRule& r) {
        v.decided_by = r.origin;
        v.decided_rule_id = r.rule_id;
        return v;
    };

    for (std::size_t steps = 0; steps <= tables_.size(); ++steps) {
        if (cur == last && skip_last_table) {
            return pending ? PipelineVerdict::forward(*pending)
                           : PipelineVerdict::send_to_controller();
        }

        FlowRule* rule = tables_[cur].match(pkt);
        if (!rule) {
            if (cur == last && pending) return PipelineVerdict::forward(*pending);
            // Local-table miss with no verdict: punt to the controller.
            return PipelineVerdict::send_to_controller();
        }

        switch (rule->action.kind) {
            case ActionKind::Drop:
                return decided(PipelineVerdict::drop(), *rule);
            case ActionKind::SendToController:
                return decided(PipelineVerdict::send_to_controller(), *rule);
            case ActionKind::Forward:
                if (cur == last)  // refinement of the egress decision
                    return decided(PipelineVerdict::forward(rule->action.port), *rule);
                pending = rule->action.port;
                cur = last;
                break;
            case ActionKind::GotoTable:
                if (rule->action.table <= cur || rule->action.table >= last)
                    throw MalformedPipeline("GotoTable escapes the local tables");
                cur = rule->action.table;
                break;
            case ActionKind::Accept:
                if (cur == last) {
                    auto v = pending ? PipelineVerdict::forward(*pending)
                                     : PipelineVerdict::send_to_controller();
                    return decided(v, *rule);
                }
                ++cur;
                break;
            case ActionKind::RateLimit:
                if (!charge_rate_limit(*rule, pkt, now))
                    return decided(PipelineVerdict::rate_limited(), *rule);
                if (cur == last) {
                    auto v = pending ? PipelineVerdict::forward(*pending)
                                     : PipelineVerdict::send_to_controller();
                    return decided(v, *rule);
                }
                ++cur;
                break;
        }
    }
    throw MalformedPipeline("pipeline walk did not terminate");
}

std::size_t FlowTablePipeline::rule_count() const {
    std::size_t n = 0;
    for (const auto& t : tables_) n += t.rules.size();
    return n;
}

std::optional<std::string> FlowTablePipeline::check_invariants() const {
    const auto last = last_table_index();
    std::unordered_set<std::uint64_t> seen_ids;
    for (std::size_t ti = 0; ti < tables_.size(); ++ti) {
        for (const auto& r : tables_[ti].rules) {
            std::ostringstream where;
            where << "table " << ti << " rule " << r.rule_id << ": ";
            if (r.table_index != ti)
                return where.str() + "stored under the wrong table index";
            if (!seen_ids.insert(r.rule_id).second)
                return where.str() + "duplicate rule_id";
            const bool is_policy = r.origin.kind != OriginKind::LocalCore;
            if (is_policy && ti != last)
                return where.str() + "policy-origin rule outside the last table";
            if (!is_policy && ti == last)
                return where.str() + "core rule inside the last table";
            if (r.origin.kind == OriginKind::RemoteRPT &&
                r.priority > kRemoteRptBandHigh)
                return where.str() + "remote rule above its priority band";
            if (r.origin.kind == OriginKind::LocalPT &&
                (r.priority < kLocalPtBandLow || r.priority > kLocalPtBandHigh))
                return where.str() + "local PT rule outside its priority band";
            if (r.action.kind == ActionKind::GotoTable &&
                (r.action.table <= ti || r.action.table >= last))
                return where.str() + "GotoTable target breaks the forward-only DAG";
        }
    }
    return std::nullopt;
}

}  // namespace peps
