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

#include <functional>
#include <map>
#include <memory>

#include "peps/compile.hpp"
#include "peps/geo.hpp"
#include "peps/pipeline.hpp"
#include "peps/ticket.hpp"
#include "peps/token_bucket.hpp"
#include "peps/validate.hpp"

namespace peps {

struct Subscriber {
    enum class Kind : std::uint8_t { LocalApp, RemoteDomainApp };

    std::string id;
    ServiceAddress service_address;
    std::string public_key;       // LocalApp: used to verify its PTs
    Kind kind = Kind::LocalApp;
    DomainId origin_domain;       // RemoteDomainApp only
};

enum class Placement : std::uint8_t { AllSwitches, EdgeOnly };

struct ControllerConfig {
    // Admission table, reactive forwarding table, policy (last) table.
    std::size_t tables_per_switch = 3;
    std::uint32_t bucket_capacity = 10;
    std::uint32_t bucket_refill_rate = 1;
    Placement pt_placement = Placement::AllSwitches;
    Placement rpt_placement = Placement::EdgeOnly;
    Tick ltr_freshness_window = 10;
};

struct SwitchState {
    SwitchId id;
    bool edge = false;
    bool peps_disabled = false;  // failed-outer-layer test hook
    FlowTablePipeline pipeline;

    SwitchState(SwitchId sid, bool is_edge, std::size_t tables)
        : id(std::move(sid)), edge(is_edge), pipeline(tables) {}
};

/// One accept/reject line per processed transfer.
struct TransferReport {
    bool accepted = false;
    std::string reason;  // "ok" or the rejection cause
    std::optional<PacketHeader> witness;
    std::size_t rules_installed = 0;
    std::string subscriber_id;
    DomainId origin_domain;  // RPTs only

    /// `ACCEPT|REJECT <reason> [witness=<5-tuple>]`
    std::string line() const;
};

struct PacketInResult {
    bool ok = false;
    std::string error;  // UnknownSwitch
    PipelineVerdict verdict;
    bool geo_updated = false;
    bool moved = false;
    std::optional<LocationZone> zone;
};

struct RegisterResult {
    bool ok = false;
    std::string error;  // DuplicateAddress, DuplicateId
    std::string subscriber_id;
};

struct RevokeResult {
    bool found = false;
    std::size_t rules_removed = 0;
};

struct EvictionReport {
    struct Item {
        std::string origin;  // e.g. "LocalPT(dbms)"
        PacketHeader witness;
    };
    std::vector<Item> evicted;
    std::size_t rules_removed = 0;
    std::size_t reactive_rules_flushed = 0;
};

struct PinResult {
    bool ok = false;
    std::string error;  // NotAttached, UnknownSwitch
};

struct ControllerStats {
    std::uint64_t packet_in_count = 0;
    std::uint64_t oracle_validations = 0;
    std::uint64_t transfers_accepted = 0;
    std::uint64_t transfers_rejected = 0;
    std::uint64_t transfers_rate_limited = 0;
};

/// Per-domain control plane: policy repository + decision point, reactive
/// flow installation, subscriber registry, geo tracking, and the policy
/// enforcement application that owns every switch's last flow table.
///
/// One controller is one logical actor; callers serialize access.
class Controller {
 public:
    Controller(DomainId domain, std::shared_ptr<SignatureScheme> scheme,
               KeyPair keys, ControllerConfig config = {});

    const DomainId& domain_id() const { return domain_id_; }
    const KeyPair& keys() const { return keys_; }
    const ControllerConfig& config() const { return config_; }
    Tick now() const { return now_; }

    void advance_to(Tick now);

    // --- topology wiring -------------------------------------------------
    SwitchState& add_switch(const SwitchId& id, bool edge = false);
    SwitchState* switch_state(const SwitchId& id);
    const std::map<SwitchId, SwitchState>& switches() const { return switches_; }
    std::map<SwitchId, SwitchState>& switches_mut() { return switches_; }

    /// Next-hop resolver: (switch, destination ip) -> egress port.
    using RouteFn =
        std::function<std::optional<std::uint16_t>(const SwitchId&, Ipv4)>;
    void set_route_fn(RouteFn fn) { route_fn_ = std::move(fn); }

    void set_universe(HeaderUniverse u) { universe_ = std::move(u); }
    const HeaderUniverse& universe() const { return universe_; }

    // --- policy state ----------------------------------------------------
    void set_local_policies(std::vector<Policy> policies);
    const std::vector<Policy>& local_policies() const { return local_policies_; }

    RegisterResult register_subscriber(Subscriber sub);
    const Subscriber* find_subscriber(const std::string& id) const;

    void add_peer_key(const DomainId& domain, std::string public_key);
    bool has_peer_key(const DomainId& domain) const {
        return peer_keys_.contains(domain);
    }
    const std::string* peer_key(const DomainId& domain) const;

    // --- control-plane operations -----------------------------------------
    PacketInResult handle_packet_in(const SwitchId& sw, std::uint16_t port,
                                    const PacketHeader& pkt);

    TransferReport receive_pt(const PolicyTransfer& pt);
    TransferReport receive_rpt(const RemotePolicyTransfer& rpt);
    TransferReport receive_pt_text(std::string_view envelope);
    TransferReport receive_rpt_text(std::string_view envelope);

    RevokeResult revoke_pt(const std::string& subscriber_id);
    RevokeResult revoke_rpt(const DomainId& origin_domain,
                            const std::string& subscriber_id);

    EvictionReport on_local_policy_change(std::vector<Policy> new_local);

    PinResult pin_port(Ipv4 host, const SwitchId& sw, std::uint16_t port);

    IssueResult issue_ticket(const LocationTicketRequest& ltr, Ipv4 observed_src_ip);

    // --- accepted-state views ----------------------------------------------
    struct AcceptedTransfer {
        std::vector<Policy> policies;
        std::uint64_t sequence_number = 0;
        ServiceAddress scope;
    };
    const std::map<std::string, AcceptedTransfer>& accepted_pts() const {
        return accepted_pts_;
    }
    const std::map<std::pair<DomainId, std::string>, AcceptedTransfer>&
    accepted_rpts() const {
        return accepted_rpts_;
    }

    GeoLocationTable& geo() { return geo_; }
    const GeoLocationTable& geo() const { return geo_; }

    const ControllerStats& stats() const { return stats_; }
    const std::vector<std::string>& report_log() const { return report_log_; }

    /// Fires after a packet_in attached or moved a host; the inter-domain
    /// layer uses it to refresh location-bound sessions.
    using HostLocatedFn = std::function<void(Ipv4, const LocationZone&, bool moved)>;
    void set_on_host_located(HostLocatedFn fn) { on_host_located_ = std::move(fn); }

    std::size_t forwarding_table_index() const {
        return config_.tables_per_switch - 2;
    }
    std::size_t last_table_index() const { return config_.tables_per_switch - 1; }

 private:
    std::vector<SwitchId> placement_for(Placement placement) const;
    std::size_t install_on(const std::vector<SwitchId>& targets,
                           const std::vector<FlowRule>& rules);
    std::size_t remove_everywhere(const OriginFilter& filter);
    TransferReport log_report(TransferReport report);

    DomainId domain_id_;
    std::shared_ptr<SignatureScheme> scheme_;
    KeyPair keys_;
    ControllerConfig config_;
    Tick now_ = 0;

    std::map<SwitchId, SwitchState> switches_;
    RouteFn route_fn_;
    HeaderUniverse universe_;

    std::vector<Policy> local_policies_;
    std::map<std::string, Subscriber> registry_;
    std::map<DomainId, std::string> peer_keys_;

    std::map<std::string, AcceptedTransfer> accepted_pts_;
    std::map<std::pair<DomainId, std::string>, AcceptedTransfer> accepted_rpts_;
    std::map<std::string, std::uint64_t> last_pt_seq_;
    std::map<std::pair<DomainId, std::string>, std::uint64_t> last_rpt_seq_;

    GeoLocationTable geo_;
    TokenBucket update_limiter_;

    struct PinState {
        SwitchId sw;
        std::uint16_t port = 0;
        std::vector<std::uint64_t> rule_ids;
    };
    std::map<Ipv4, PinState> pinned_;
    std::vector<std::pair<SwitchId, std::uint64_t>> reactive_rules_;

    ControllerStats stats_;
    std::vector<std::string> report_log_;
    HostLocatedFn on_host_located_;
};

}  // namespace peps
