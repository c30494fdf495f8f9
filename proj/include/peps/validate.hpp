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
#include <span>
#include <string>

#include "peps/transfer.hpp"
#include "peps/universe.hpp"

namespace peps {

enum class ValidationCode : std::uint8_t {
    Accept,
    Violation,       // composition would flip a protected decision; witness set
    ScopeViolation,  // RPT policy reaches beyond the subscriber's own address
    StaleSequence,
    BadSignature,
};

std::string to_string(ValidationCode code);

struct ValidationResult {
    ValidationCode code = ValidationCode::Accept;
    std::optional<PacketHeader> witness;      // Violation
    std::optional<std::size_t> policy_index;  // ScopeViolation

    bool ok() const { return code == ValidationCode::Accept; }

    static ValidationResult accept() { return {}; }
    static ValidationResult violation(PacketHeader w) {
        return {ValidationCode::Violation, w, {}};
    }
    static ValidationResult scope_violation(std::size_t index) {
        return {ValidationCode::ScopeViolation, {}, index};
    }
    static ValidationResult stale() { return {ValidationCode::StaleSequence, {}, {}}; }
    static ValidationResult bad_signature() {
        return {ValidationCode::BadSignature, {}, {}};
    }
};

/// A transfer may only further restrict traffic destined to its own
/// subscriber. Enumerates the universe and returns the first packet whose
/// composed decision (local policies first, transfer appended) breaks that:
///   - a locally denied packet (explicitly or by default) no longer denied, or
///   - any packet not destined to `subscriber` whose decision changed at all.
/// `oracle_runs`, when given, counts enumerations (cheap rejections such as a
/// bad signature must never show up in it).
std::optional<PacketHeader> find_composition_violation(
    std::span<const Policy> local, std::span<const Policy> transfer_policies,
    const ServiceAddress& subscriber, const HeaderUniverse& universe,
    std::uint64_t* oracle_runs = nullptr);

/// Full PT admission check, in order: signature, sequence freshness,
/// non-violation oracle. `scheme` may be null to skip the signature check
/// (standalone file validation).
ValidationResult validate_pt(std::span<const Policy> local, const PolicyTransfer& pt,
                             const ServiceAddress& subscriber_address,
                             const std::string& subscriber_public_key,
                             std::uint64_t last_accepted_seq,
                             SignatureScheme* scheme, const HeaderUniverse& universe,
                             std::uint64_t* oracle_runs = nullptr);

/// Full RPT admission check: signature (origin domain key), sequence,
/// scope (claimed address must equal `registered_address` when given, and
/// every policy's dst must stay inside it), then the same oracle.
ValidationResult validate_rpt(std::span<const Policy> local,
                              const RemotePolicyTransfer& rpt,
                              const std::optional<ServiceAddress>& registered_address,
                              const std::string& origin_domain_public_key,
                              std::uint64_t last_accepted_seq,
                              SignatureScheme* scheme, const HeaderUniverse& universe,
                              std::uint64_t* oracle_runs = nullptr);

/// True iff the policy's destination predicate cannot reach beyond `addr`.
bool policy_within_scope(const Policy& policy, const ServiceAddress& addr);

}  // namespace peps
