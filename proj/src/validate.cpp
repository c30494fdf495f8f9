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

#include "peps/validate.hpp"

#include <vector>

namespace peps {

std::string to_string(ValidationCode code) {
    switch (code) {
        case ValidationCode::Accept: return "Accept";
        case ValidationCode::Violation: return "Violation";
        case ValidationCode::ScopeViolation: return "ScopeViolation";
        case ValidationCode::StaleSequence: return "StaleSequence";
        case ValidationCode::BadSignature: return "BadSignature";
    }
    return "?";
}

std::optional<PacketHeader> find_composition_violation(
    std::span<const Policy> local, std::span<const Policy> transfer_policies,
    const ServiceAddress& subscriber, const HeaderUniverse& universe,
    std::uint64_t* oracle_runs) {
    if (oracle_runs) ++*oracle_runs;
    // Composition is the local list with the transfer appended, so priority
    // ties keep resolving toward the local set.
    std::vector<Policy> composed(local.begin(), local.end());
    composed.insert(composed.end(), transfer_policies.begin(),
                    transfer_policies.end());

    std::optional<PacketHeader> witness;
    universe.scan([&](const PacketHeader& pkt) {
        const Decision before = decide(local, pkt);
        const Decision after = decide(composed, pkt);
        const bool flipped_deny = before.is_deny() && !after.is_deny();
        const bool touched_foreign = !subscriber.covers(pkt) && after != before;
        if (flipped_deny || touched_foreign) {
            witness = pkt;
            return false;
        }
        return true;
    });
    return witness;
}

ValidationResult validate_pt(std::span<const Policy> local, const PolicyTransfer& pt,
                             const ServiceAddress& subscriber_address,
                             const std::string& subscriber_public_key,
                             std::uint64_t last_accepted_seq,
                             SignatureScheme* scheme, const HeaderUniverse& universe,
                             std::uint64_t* oracle_runs) {
    if (scheme && !scheme->verify(subscriber_public_key, pt.signing_payload(),
                                  pt.signature_hex))
        return ValidationResult::bad_signature();
    if (pt.sequence_number <= last_accepted_seq) return ValidationResult::stale();
    if (auto w = find_composition_violation(local, pt.policies, subscriber_address,
                                            universe, oracle_runs))
        return ValidationResult::violation(*w);
    return ValidationResult::accept();
}

bool policy_within_scope(const Policy& policy, const ServiceAddress& addr) {
    return policy.match.dst_ip &&
           policy.match.dst_ip->subset_of(Cidr{addr.ip, 32});
}

ValidationResult validate_rpt(std::span<const Policy> local,
                              const RemotePolicyTransfer& rpt,
                              const std::optional<ServiceAddress>& registered_address,
                              const std::string& origin_domain_public_key,
                              std::uint64_t last_accepted_seq,
                              SignatureScheme* scheme, const HeaderUniverse& universe,
                              std::uint64_t* oracle_runs) {
    if (scheme && !scheme->verify(origin_domain_public_key, rpt.signing_payload(),
                                  rpt.signature_hex))
        return ValidationResult::bad_signature();
    if (rpt.sequence_number <= last_accepted_seq) return ValidationResult::stale();

    // The claimed scope must be the address this controller has on file for
    // the subscriber; otherwise a peer could restrict a third party's traffic.
    if (registered_address && rpt.subscriber_service_address != *registered_address)
        return ValidationResult::scope_violation(0);

    for (std::size_t i = 0; i < rpt.policies.size(); ++i) {
        if (!policy_within_scope(rpt.policies[i], rpt.subscriber_service_address))
            return ValidationResult::scope_violation(i);
    }

    if (auto w = find_composition_violation(local, rpt.policies,
                                            rpt.subscriber_service_address, universe,
                                            oracle_runs))
        return ValidationResult::violation(*w);
    return ValidationResult::accept();
}

}  // namespace peps
