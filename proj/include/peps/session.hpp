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

#include <map>
#include <memory>
#include <set>

#include "peps/channel.hpp"
#include "peps/controller.hpp"

namespace peps {

enum class SessionState : std::uint8_t { Proposed, Active, TornDown };

std::string to_string(SessionState s);

/// Location-bound access-control session: while Active, the requestor domain
/// enforces an RPT that denies everything toward the subscriber except the
/// hosts currently located in the permitted zones.
struct LbacSession {
    std::string session_id;
    DomainId provider_domain;
    DomainId requestor_domain;
    std::string subscriber_id;
    std::set<std::string> allowed_zones;
    std::map<Ipv4, std::string> bindings;  // located host -> zone (allowed only)
    SessionState state = SessionState::Proposed;

    std::uint64_t rpt_seq = 0;                   // provider-side mint counter
    std::map<Ipv4, std::string> last_reported;   // requestor's last zone report
    std::string last_error;
};

/// The pair of location apps plus the east-west links between controllers:
/// owns channels and sessions, transports RPTs, relays binding reports, and
/// keeps session state in step with transfer accept/reject reports.
///
/// Delivery is two-phase so a simulator can charge receptions against a
/// controller's message budget: collect_due() drains the wires,
/// dispatch() applies one envelope to its receiver.
class InterdomainFabric {
 public:
    explicit InterdomainFabric(std::shared_ptr<SignatureScheme> scheme)
        : scheme_(std::move(scheme)) {}

    void register_controller(Controller* ctrl);
    Controller* controller(const DomainId& id);

    struct ConnectResult {
        bool ok = false;
        std::string error;  // MissingPeerKey, UnknownDomain
        EastWestChannel* channel = nullptr;
    };
    /// Cross-registers the two controllers' public keys and establishes the
    /// channel. Reconnecting an existing pair returns the same channel.
    ConnectResult connect(const DomainId& a, const DomainId& b, Tick latency = 1);

    EastWestChannel* channel_between(const DomainId& a, const DomainId& b);

    struct SendReceipt {
        bool ok = false;
        std::string error;  // MissingChannel, ChannelDown
        std::uint64_t seq = 0;
    };
    SendReceipt send_rpt(const DomainId& from, const DomainId& to,
                         const RemotePolicyTransfer& rpt, Tick now);

    // --- location-bound sessions ------------------------------------------
    struct OpenResult {
        bool ok = false;
        std::string error;
        std::string session_id;
    };
    /// Requestor-side initiation: reports current (host, zone) bindings to
    /// the provider, which answers with the session RPT. The session turns
    /// Active once that RPT is accepted at the requestor.
    OpenResult open_session(const DomainId& provider, const DomainId& requestor,
                            const std::string& subscriber_id,
                            const std::set<std::string>& allowed_zones, Tick now);

    /// Revokes the session's rules at the requestor; idempotent.
    void teardown_session(const std::string& session_id, Tick now);

    const LbacSession* session(const std::string& id) const;
    const std::map<std::string, LbacSession>& sessions() const { return sessions_; }

    /// Wire this into Controller::set_on_host_located for every requestor.
    void on_host_located(const DomainId& domain, Ipv4 host, Tick now);

    // --- delivery ----------------------------------------------------------
    std::vector<EwEnvelope> collect_due(Tick now);

    struct DispatchResult {
        bool signature_ok = false;
        std::optional<TransferReport> report;  // RPT envelopes
    };
    DispatchResult dispatch(const EwEnvelope& env, Tick now);

    /// Unit-test convenience: collect and dispatch everything due.
    std::size_t pump(Tick now);

    bool idle() const;

    struct FabricStats {
        std::uint64_t envelopes_sent = 0;
        std::uint64_t envelopes_delivered = 0;
        std::uint64_t envelopes_bad_signature = 0;
    };
    const FabricStats& stats() const { return stats_; }

 private:
    std::string binding_report_payload(const LbacSession& s,
                                       const std::map<Ipv4, std::string>& located);
    void send_binding_report(LbacSession& s, Tick now);
    void mint_and_send_session_rpt(LbacSession& s,
                                   const std::map<Ipv4, std::string>& reported,
                                   Tick now);
    std::map<Ipv4, std::string> located_hosts(Controller& ctrl) const;

    std::shared_ptr<SignatureScheme> scheme_;
    std::map<DomainId, Controller*> controllers_;
    std::map<std::pair<DomainId, DomainId>, std::unique_ptr<EastWestChannel>>
        channels_;
    std::map<std::string, LbacSession> sessions_;
    std::uint64_t next_session_ = 1;
    FabricStats stats_;
};

}  // namespace peps
