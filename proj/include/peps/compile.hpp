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

#include <span>
#include <vector>

#include "peps/pipeline.hpp"
#include "peps/policy.hpp"

namespace peps {

struct CompileResult {
    bool ok = false;
    bool band_overflow = false;
    std::vector<FlowRule> rules;
};

/// Converts one accepted transfer into last-table flow rules.
///
/// Policies are taken in decide() precedence order (priority descending,
/// then list order) and laid out as strictly descending rule priorities
/// inside the origin's band. Deny becomes Drop, RateLimit keeps its
/// parameters, and Allow emits a pass-through rule only when it shadows a
/// lower-precedence restriction of the same transfer; an Allow that shadows
/// nothing relies on the last table's allow-by-default miss behaviour.
CompileResult compile_transfer(std::span<const Policy> policies,
                               const RuleOrigin& origin,
                               std::uint32_t last_table_index);

/// Everything a controller has accepted, compiled together.
struct ComposedPolicySet {
    std::vector<Policy> local;
    std::vector<std::pair<std::string, std::vector<Policy>>> accepted_pt;
    // (origin domain, subscriber) -> policies
    std::vector<std::pair<std::pair<std::string, std::string>, std::vector<Policy>>>
        accepted_rpt;
};

CompileResult compile_to_rules(const ComposedPolicySet& accepted,
                               std::uint32_t last_table_index);

}  // namespace peps
