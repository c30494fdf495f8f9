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
#include <stdexcept>
#include <vector>

#include "peps/rule.hpp"

namespace peps {

/// Signals a broken pipeline structure (a construction bug, not bad input).
class MalformedPipeline : public std::logic_error {
 public:
    using std::logic_error::logic_error;
};

struct PipelineVerdict {
    enum class Kind : std::uint8_t { Forward, Drop, SendToController, RateLimited };

    Kind kind = Kind::SendToController;
    std::uint16_t port = 0;
    /// Rule that decided the verdict; empty on a table miss.
    std::optional<RuleOrigin> decided_by;
    std::optional<std::uint64_t> decided_rule_id;

    bool operator==(const PipelineVerdict& o) const {
        return kind == o.kind && (kind != Kind::Forward || port == o.port);
    }

    bool is_forward() const { return kind == Kind::Forward; }
    bool is_drop() const {
        return kind == Kind::Drop || kind == Kind::RateLimited;
    }

    static PipelineVerdict forward(std::uint16_t port) {
        return {Kind::Forward, port, {}, {}};
    }
    static PipelineVerdict drop() { return {Kind::Drop, 0, {}, {}}; }
    static PipelineVerdict send_to_controller() {
        return {Kind::SendToController, 0, {}, {}};
    }
    static PipelineVerdict rate_limited() { return {Kind::RateLimited, 0, {}, {}}; }

    std::string to_string() const;
};

enum class InstallError : std::uint8_t {
    TablePlacementViolation,  // PT/RPT outside the last table, or core inside it
    PriorityBandViolation,    // priority outside the origin's band
    InvalidGotoTarget,        // target not a strictly later local table
};

std::string to_string(InstallError e);

struct InstallResult {
    bool ok = false;
    InstallError error = InstallError::TablePlacementViolation;
    std::uint64_t rule_id = 0;
};

/// One flow table: priority-ordered rules, highest priority wins, ties
/// resolved toward the lowest rule_id.
struct FlowTable {
    std::vector<FlowRule> rules;

    const FlowRule* match(const PacketHeader& pkt) const;
    FlowRule* match(const PacketHeader& pkt);
};

/// Multi-table pipeline with the last table reserved for subscriber policy
/// (PT/RPT) rules. Local tables 0..n-2 run first; only a packet they forward
/// is matched against the last table, which may further restrict it but
/// never un-drop it.
class FlowTablePipeline {
 public:
    explicit FlowTablePipeline(std::size_t table_count);

    std::size_t table_count() const { return tables_.size(); }
    std::size_t last_table_index() const { return tables_.size() - 1; }

    const FlowTable& table(std::size_t i) const { return tables_.at(i); }

    InstallResult install(FlowRule rule);
    std::size_t remove_by_origin(const OriginFilter& filter);
    bool remove_rule(std::uint64_t rule_id);

    /// Runs the packet through the pipeline at `now` (rate-limit windows are
    /// tick-based). `skip_last_table` is the failed-outer-layer test hook.
    PipelineVerdict process(const PacketHeader& pkt, Tick now,
                            bool skip_last_table = false);

    std::size_t rule_count() const;

    /// Full structural scan; returns a description of the first violation,
    /// or nullopt when all invariants hold.
    std::optional<std::string> check_invariants() const;

 private:
    bool charge_rate_limit(FlowRule& rule, const PacketHeader& pkt, Tick now);

    std::vector<FlowTable> tables_;
    std::uint64_t next_rule_id_ = 1;
};

}  // namespace peps
