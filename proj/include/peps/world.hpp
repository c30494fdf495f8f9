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

#include <deque>
#include <queue>

#include "peps/metrics.hpp"
#include "peps/scenario.hpp"
#include "peps/session.hpp"

namespace peps {

class InvariantError : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

struct WorldConfig {
    std::uint64_t seed = 1;
    std::uint32_t controller_budget_per_tick = 100;
    Tick ew_latency = 1;
    bool disable_outer_everywhere = false;  // CLI --disable-outer
};

/// Application-level access log of a data-provider stub.
struct DpRequest {
    Tick tick = 0;
    PacketHeader pkt;
    bool granted = false;
};

/// Deterministic tick-driven multi-domain simulator. One instance runs one
/// scenario once; identical scenario + config give byte-identical reports.
class World {
 public:
    World(const Scenario& scenario, WorldConfig config = {});

    /// Processes events in (tick, insertion) order until the event queue,
    /// controller inboxes and channels are all drained and `until_tick` has
    /// been reached.
    MetricsReport run(Tick until_tick);

    /// Schedules an extra packet injection (programmatic scenarios).
    void inject(const InjectSpec& inject);

    Controller& controller(const DomainId& id);
    InterdomainFabric& fabric() { return fabric_; }

    /// Requests granted/denied by a provider's inner enforcement point.
    const std::vector<DpRequest>& dp_log(const std::string& host_id) const;

    const std::map<std::string, HostSpec>& hosts() const { return hosts_; }
    std::shared_ptr<SignatureScheme> scheme() { return scheme_; }

    Tick now() const { return now_; }

 private:
    struct PacketCtx {
        PacketHeader pkt;
        DomainId src_domain;
        DomainId dst_domain;  // empty when the destination is unknown
        std::uint64_t injection_id = 0;
    };

    struct Event {
        enum class Kind : std::uint8_t { AtSwitch, AtHost, Script };
        Tick tick = 0;
        std::uint64_t seq = 0;
        Kind kind = Kind::Script;
        // AtSwitch
        DomainId domain;
        SwitchId sw;
        std::uint16_t in_port = 0;
        PacketCtx ctx;
        // AtHost
        std::string host_id;
        // Script
        std::size_t script_index = 0;
    };

    struct EventOrder {
        bool operator()(const Event& a, const Event& b) const {
            if (a.tick != b.tick) return a.tick > b.tick;
            return a.seq > b.seq;
        }
    };

    struct Script {
        enum class Kind : std::uint8_t {
            Inject,
            Pt,
            Rpt,
            Session,
            PolicyChange,
            Action
        };
        Kind kind;
        std::size_t index;  // into the scenario vectors
    };

    struct CtrlMsg {
        enum class Kind : std::uint8_t { PacketIn, Pt, Envelope };
        Kind kind = Kind::PacketIn;
        // PacketIn
        SwitchId sw;
        std::uint16_t in_port = 0;
        PacketCtx ctx;
        // Pt
        PolicyTransfer pt;
        // Envelope
        EwEnvelope envelope;
    };

    struct Endpoint {  // what hangs off a switch port
        enum class Kind : std::uint8_t { Switch, Host } kind;
        DomainId domain;
        SwitchId sw;
        std::uint16_t port = 0;
        std::string host_id;
        std::size_t link_index = 0;
    };

    void build(const Scenario& scenario);
    void build_routing();
    void schedule(Event ev);
    void run_script(const Script& script, Tick tick);
    void process_at_switch(const Event& ev);
    void deliver_to_host(const Event& ev);
    void apply_verdict(const DomainId& domain, const SwitchId& sw,
                       const PacketCtx& ctx, const PipelineVerdict& verdict,
                       Tick tick);
    void count_drop(const DomainId& where, const PacketCtx& ctx);
    void count_link(std::size_t link_index);
    bool work_pending() const;

    Scenario scenario_;
    WorldConfig config_;
    std::shared_ptr<SignatureScheme> scheme_;

    std::map<DomainId, std::unique_ptr<Controller>> controllers_;
    InterdomainFabric fabric_;

    std::map<std::string, HostSpec> hosts_;
    std::map<Ipv4, std::string> host_by_ip_;
    struct Provider {
        std::vector<std::uint16_t> ports;
        std::vector<Policy> inner_pep;
        std::vector<DpRequest> log;
    };
    std::map<std::string, Provider> providers_;

    // (domain, switch, port) -> what is attached there.
    std::map<std::tuple<DomainId, SwitchId, std::uint16_t>, Endpoint> wires_;
    // next hop toward a destination ip, per switch
    std::map<std::pair<DomainId, SwitchId>, std::map<Ipv4, std::uint16_t>> routes_;

    std::vector<std::string> link_ids_;

    std::priority_queue<Event, std::vector<Event>, EventOrder> events_;
    std::uint64_t next_seq_ = 0;
    std::vector<Script> scripts_;
    std::map<DomainId, std::deque<CtrlMsg>> inboxes_;
    std::map<std::string, std::string> session_ids_;  // "prov|req|sub" -> id

    MetricsReport report_;
    MetricsRow* row_ = nullptr;  // row under construction
    Tick now_ = 0;
    std::uint64_t injections_ = 0;
};

/// Fig. 6 analogue: k domains chained D1 - D2 - ... - Dk with the protected
/// provider in Dk; ladder[i] is the restriction set domain i receives as an
/// RPT from its inner neighbour. Returns the generated scenario text.
std::string make_progressive_firewall_scenario_text(
    std::size_t domain_count, const std::vector<std::vector<Policy>>& ladder);

/// Builds, runs, and reports the chained-firewall scenario.
MetricsReport run_progressive_firewall(std::size_t domain_count,
                                       const std::vector<std::vector<Policy>>& ladder,
                                       Tick until_tick = 200,
                                       WorldConfig config = {});

/// The canned three-domain ladder used by the chain scenario: attacker
/// sources x1..x3 in D1, x1 filtered at D1, the full class at D2.
std::vector<std::vector<Policy>> canned_firewall_ladder();

}  // namespace peps
