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

#include "peps/controller.hpp"

#include <sstream>

namespace peps {

namespace {

// Admission-table priorities. Pins sit above everything, reactive rate
// limiters above the fall-through default.
constexpr std::uint16_t kDefaultGotoPriority = 0;
constexpr std::uint16_t kReactiveLimiterPriority = 100;
constexpr std::uint16_t kPinKeepPriority = 60000;
constexpr std::uint16_t kPinDropSrcPriority = 59999;
constexpr std::uint16_t kPinDropPortPriority = 59998;
constexpr std::uint16_t kReactiveForwardPriority = 10;

}  // namespace

std::string TransferReport::line() const {
    std::ostringstream os;
    os << (accepted ? "ACCEPT" : "REJECT") << ' ' << reason;
    if (accepted) os << " rules=" << rules_installed;
    if (witness) os << " witness=" << witness->witness_string();
    return os.str();
}

Controller::Controller(DomainId domain, std::shared_ptr<SignatureScheme> scheme,
                       KeyPair keys, ControllerConfig config)
    : domain_id_(std::move(domain)),
      scheme_(std::move(scheme)),
      keys_(std::move(keys)),
      config_(config),
      update_limiter_(config.bucket_capacity, config.bucket_refill_rate) {
    // The reactive layer needs an admission table in front of the
    // forwarding table; anything smaller cannot host port pins.
    if (config_.tables_per_switch < 3) config_.tables_per_switch = 3;
}

void Controller::advance_to(Tick now) {
    now_ = now;
    update_limiter_.advance_to(now);
}

SwitchState& Controller::add_switch(const SwitchId& id, bool edge) {
    auto [it, inserted] = switches_.try_emplace(
        id, SwitchState{id, edge, config_.tables_per_switch});
    if (!inserted) {
        it->second.edge = it->second.edge || edge;
        return it->second;
    }
    // Fall-through chain across the admission tables.
    for (std::uint32_t ti = 0; ti + 2 < config_.tables_per_switch; ++ti) {
        FlowRule fall;
        fall.match = MatchFields::any();
        fall.action = RuleAction::goto_table(ti + 1);
        fall.priority = kDefaultGotoPriority;
        fall.table_index = ti;
        fall.origin = RuleOrigin::local_core();
        it->second.pipeline.install(fall);
    }
    return it->second;
}

SwitchState* Controller::switch_state(const SwitchId& id) {
    auto it = switches_.find(id);
    return it == switches_.end() ? nullptr : &it->second;
}

void Controller::set_local_policies(std::vector<Policy> policies) {
    local_policies_ = std::move(policies);
}

RegisterResult Controller::register_subscriber(Subscriber sub) {
    if (registry_.contains(sub.id)) return {false, "DuplicateId", sub.id};
    for (const auto& [id, existing] : registry_) {
        const auto& a = existing.service_address;
        const auto& b = sub.service_address;
        if (a.ip != b.ip) continue;
        bool overlap = a.ports.empty() || b.ports.empty();
        for (auto pa : a.ports)
            for (auto pb : b.ports) overlap = overlap || pa == pb;
        if (overlap) return {false, "DuplicateAddress", sub.id};
    }
    auto id = sub.id;
    registry_.emplace(id, std::move(sub));
    return {true, {}, id};
}

const Subscriber* Controller::find_subscriber(const std::string& id) const {
    auto it = registry_.find(id);
    return it == registry_.end() ? nullptr : &it->second;
}

void Controller::add_peer_key(const DomainId& domain, std::string public_key) {
    peer_keys_[domain] = std::move(public_key);
}

const std::string* Controller::peer_key(const DomainId& domain) const {
    auto it = peer_keys_.find(domain);
    return it == peer_keys_.end() ? nullptr : &it->second;
}

PacketInResult Controller::handle_packet_in(const SwitchId& sw, std::uint16_t port,
                                            const PacketHeader& pkt_in) {
    auto* st = switch_state(sw);
    if (!st) return {false, "UnknownSwitch", {}, false, false, {}};

    ++stats_.packet_in_count;
    PacketHeader pkt = pkt_in;
    pkt.in_port = port;

    PacketInResult result;
    result.ok = true;

    // Host-facing attachment points feed the geo-location table.
    if (geo_.port_mapped(sw, port)) {
        auto tracked = geo_.track(pkt.src_ip, sw, port, now_);
        if (tracked.ok) {
            result.geo_updated = true;
            result.moved = tracked.moved;
            result.zone = tracked.zone;
            if (on_host_located_) on_host_located_(pkt.src_ip, tracked.zone,
                                                   tracked.moved);
        }
    }

    const Decision decision = decide(local_policies_, pkt);
    const auto fwd = static_cast<std::uint32_t>(forwarding_table_index());

    FlowRule flow_rule;
    flow_rule.match = MatchFields::exact_flow(pkt);
    flow_rule.table_index = fwd;
    flow_rule.priority = kReactiveForwardPriority;
    flow_rule.origin = RuleOrigin::local_core();
    if (decision.is_deny()) {
        flow_rule.action = RuleAction::drop();
    } else {
        auto out = route_fn_ ? route_fn_(sw, pkt.dst_ip) : std::nullopt;
        flow_rule.action = out ? RuleAction::forward(*out) : RuleAction::drop();
    }
    auto installed = st->pipeline.install(flow_rule);
    if (installed.ok) reactive_rules_.emplace_back(sw, installed.rule_id);

    if (decision.kind == Decision::Kind::RateLimit) {
        FlowRule limiter;
        limiter.match = MatchFields::exact_flow(pkt);
        limiter.action =
            RuleAction::rate_limit(decision.max_new_flows, decision.window_ticks);
        limiter.priority = kReactiveLimiterPriority;
        limiter.table_index = 0;
        limiter.origin = RuleOrigin::local_core();
        auto lim = st->pipeline.install(limiter);
        if (lim.ok) reactive_rules_.emplace_back(sw, lim.rule_id);
    }

    result.verdict = st->pipeline.process(pkt, now_, st->peps_disabled);
    return result;
}

std::vector<SwitchId> Controller::placement_for(Placement placement) const {
    std::vector<SwitchId> out;
    for (const auto& [id, st] : switches_) {
        if (placement == Placement::AllSwitches || st.edge) out.push_back(id);
    }
    if (out.empty()) {
        // A domain without marked edges still has to enforce somewhere.
        for (const auto& [id, st] : switches_) out.push_back(id);
    }
    return out;
}

std::size_t Controller::install_on(const std::vector<SwitchId>& targets,
                                   const std::vector<FlowRule>& rules) {
    std::size_t installed = 0;
    for (const auto& sw : targets) {
        auto* st = switch_state(sw);
        if (!st) continue;
        for (const auto& rule : rules) {
            if (st->pipeline.install(rule).ok) ++installed;
        }
    }
    return installed;
}

std::size_t Controller::remove_everywhere(const OriginFilter& filter) {
    std::size_t removed = 0;
    for (auto& [id, st] : switches_) removed += st.pipeline.remove_by_origin(filter);
    return removed;
}

TransferReport Controller::log_report(TransferReport report) {
    report_log_.push_back(report.line());
    if (report.accepted)
        ++stats_.transfers_accepted;
    else if (report.reason == "RateLimited")
        ++stats_.transfers_rate_limited;
    else
        ++stats_.transfers_rejected;
    return report;
}

TransferReport Controller::receive_pt(const PolicyTransfer& pt) {
    TransferReport report;
    report.subscriber_id = pt.subscriber_id;

    if (!update_limiter_.try_take()) {
        report.reason = "RateLimited";
        return log_report(report);
    }
    const Subscriber* sub = find_subscriber(pt.subscriber_id);
    if (!sub || sub->kind != Subscriber::Kind::LocalApp) {
        report.reason = "UnknownSubscriber";
        return log_report(report);
    }

    std::uint64_t last_seq = 0;
    if (auto it = last_pt_seq_.find(pt.subscriber_id); it != last_pt_seq_.end())
        last_seq = it->second;

    auto res = validate_pt(local_policies_, pt, sub->service_address,
                           sub->public_key, last_seq, scheme_.get(), universe_,
                           &stats_.oracle_validations);
    if (!res.ok()) {
        report.reason = to_string(res.code);
        report.witness = res.witness;
        return log_report(report);
    }

    auto compiled = compile_transfer(
        pt.policies, RuleOrigin::local_pt(pt.subscriber_id),
        static_cast<std::uint32_t>(last_table_index()));
    if (!compiled.ok) {
        report.reason = "BandOverflow";
        return log_report(report);
    }

    // A fresh accepted transfer replaces the subscriber's previous one.
    remove_everywhere(OriginFilter::local_pt(pt.subscriber_id));
    report.rules_installed =
        install_on(placement_for(config_.pt_placement), compiled.rules);
    accepted_pts_[pt.subscriber_id] =
        AcceptedTransfer{pt.policies, pt.sequence_number, sub->service_address};
    last_pt_seq_[pt.subscriber_id] = pt.sequence_number;

    report.accepted = true;
    report.reason = "ok";
    return log_report(report);
}

TransferReport Controller::receive_rpt(const RemotePolicyTransfer& rpt) {
    TransferReport report;
    report.subscriber_id = rpt.subscriber_id;
    report.origin_domain = rpt.origin_domain_id;

    if (!update_limiter_.try_take()) {
        report.reason = "RateLimited";
        return log_report(report);
    }
    const std::string* origin_key = peer_key(rpt.origin_domain_id);
    if (!origin_key) {
        report.reason = "UnknownPeer";
        return log_report(report);
    }
    const Subscriber* sub = find_subscriber(rpt.subscriber_id);
    if (!sub || sub->kind != Subscriber::Kind::RemoteDomainApp ||
        sub->origin_domain != rpt.origin_domain_id) {
        report.reason = "UnknownSubscriber";
        return log_report(report);
    }

    const std::pair<DomainId, std::string> sender{rpt.origin_domain_id,
                                                  rpt.subscriber_id};
    std::uint64_t last_seq = 0;
    if (auto it = last_rpt_seq_.find(sender); it != last_rpt_seq_.end())
        last_seq = it->second;

    auto res = validate_rpt(local_policies_, rpt, sub->service_address, *origin_key,
                            last_seq, scheme_.get(), universe_,
                            &stats_.oracle_validations);
    if (!res.ok()) {
        report.reason = to_string(res.code);
        report.witness = res.witness;
        if (res.policy_index)
            report.reason += " index=" + std::to_string(*res.policy_index);
        return log_report(report);
    }

    auto compiled = compile_transfer(
        rpt.policies,
        RuleOrigin::remote_rpt(rpt.origin_domain_id, rpt.subscriber_id),
        static_cast<std::uint32_t>(last_table_index()));
    if (!compiled.ok) {
        report.reason = "BandOverflow";
        return log_report(report);
    }

    remove_everywhere(
        OriginFilter::remote_rpt(rpt.origin_domain_id, rpt.subscriber_id));
    report.rules_installed =
        install_on(placement_for(config_.rpt_placement), compiled.rules);
    accepted_rpts_[sender] = AcceptedTransfer{rpt.policies, rpt.sequence_number,
                                              rpt.subscriber_service_address};
    last_rpt_seq_[sender] = rpt.sequence_number;

    report.accepted = true;
    report.reason = "ok";
    return log_report(report);
}

TransferReport Controller::receive_pt_text(std::string_view envelope) {
    auto pt = PolicyTransfer::parse(envelope);
    if (!pt) {
        TransferReport report;
        report.reason = "ParseError";
        return log_report(report);
    }
    return receive_pt(*pt);
}

TransferReport Controller::receive_rpt_text(std::string_view envelope) {
    auto rpt = RemotePolicyTransfer::parse(envelope);
    if (!rpt) {
        TransferReport report;
        report.reason = "ParseError";
        return log_report(report);
    }
    return receive_rpt(*rpt);
}

RevokeResult Controller::revoke_pt(const std::string& subscriber_id) {
    if (!accepted_pts_.contains(subscriber_id)) return {false, 0};
    auto removed = remove_everywhere(OriginFilter::local_pt(subscriber_id));
    accepted_pts_.erase(subscriber_id);
    return {true, removed};
}

RevokeResult Controller::revoke_rpt(const DomainId& origin_domain,
                                    const std::string& subscriber_id) {
    const std::pair<DomainId, std::string> sender{origin_domain, subscriber_id};
    if (!accepted_rpts_.contains(sender)) return {false, 0};
    auto removed =
        remove_everywhere(OriginFilter::remote_rpt(origin_domain, subscriber_id));
    accepted_rpts_.erase(sender);
    return {true, removed};
}

EvictionReport Controller::on_local_policy_change(std::vector<Policy> new_local) {
    local_policies_ = std::move(new_local);
    EvictionReport report;

    // Reactive verdicts were cached against the old local set.
    for (const auto& [sw, rule_id] : reactive_rules_) {
        auto* st = switch_state(sw);
        if (st && st->pipeline.remove_rule(rule_id)) ++report.reactive_rules_flushed;
    }
    reactive_rules_.clear();

    std::vector<std::string> evict_pt;
    for (const auto& [id, transfer] : accepted_pts_) {
        auto w = find_composition_violation(local_policies_, transfer.policies,
                                            transfer.scope, universe_,
                                            &stats_.oracle_validations);
        if (w) {
            evict_pt.push_back(id);
            report.evicted.push_back({RuleOrigin::local_pt(id).to_string(), *w});
        }
    }
    for (const auto& id : evict_pt) {
        report.rules_removed += remove_everywhere(OriginFilter::local_pt(id));
        accepted_pts_.erase(id);
    }

    std::vector<std::pair<DomainId, std::string>> evict_rpt;
    for (const auto& [sender, transfer] : accepted_rpts_) {
        auto w = find_composition_violation(local_policies_, transfer.policies,
                                            transfer.scope, universe_,
                                            &stats_.oracle_validations);
        if (w) {
            evict_rpt.push_back(sender);
            report.evicted.push_back(
                {RuleOrigin::remote_rpt(sender.first, sender.second).to_string(),
                 *w});
        }
    }
    for (const auto& sender : evict_rpt) {
        report.rules_removed += remove_everywhere(
            OriginFilter::remote_rpt(sender.first, sender.second));
        accepted_rpts_.erase(sender);
    }
    return report;
}

PinResult Controller::pin_port(Ipv4 host, const SwitchId& sw, std::uint16_t port) {
    auto* st = switch_state(sw);
    if (!st) return {false, "UnknownSwitch"};
    auto at = geo_.attachment(host);
    if (!at || at->switch_id != sw || at->port_id != port)
        return {false, "NotAttached"};

    if (auto it = pinned_.find(host); it != pinned_.end()) {
        if (auto* prev = switch_state(it->second.sw)) {
            for (auto id : it->second.rule_ids) prev->pipeline.remove_rule(id);
        }
        pinned_.erase(it);
    }

    PinState pin{sw, port, {}};
    const auto fwd = static_cast<std::uint32_t>(forwarding_table_index());

    FlowRule keep;
    keep.match.src_ip = host;
    keep.match.in_port = port;
    keep.action = RuleAction::goto_table(fwd);
    keep.priority = kPinKeepPriority;
    keep.table_index = 0;
    keep.origin = RuleOrigin::local_core();

    FlowRule drop_wrong_port;  // the pinned address appearing anywhere else
    drop_wrong_port.match.src_ip = host;
    drop_wrong_port.action = RuleAction::drop();
    drop_wrong_port.priority = kPinDropSrcPriority;
    drop_wrong_port.table_index = 0;
    drop_wrong_port.origin = RuleOrigin::local_core();

    FlowRule drop_other_src;  // anything else sourced from the pinned port
    drop_other_src.match.in_port = port;
    drop_other_src.action = RuleAction::drop();
    drop_other_src.priority = kPinDropPortPriority;
    drop_other_src.table_index = 0;
    drop_other_src.origin = RuleOrigin::local_core();

    for (auto* rule : {&keep, &drop_wrong_port, &drop_other_src}) {
        auto res = st->pipeline.install(*rule);
        if (res.ok) pin.rule_ids.push_back(res.rule_id);
    }
    pinned_[host] = std::move(pin);
    return {true, {}};
}

IssueResult Controller::issue_ticket(const LocationTicketRequest& ltr,
                                     Ipv4 observed_src_ip) {
    return issue_location_ticket(*scheme_, keys_, domain_id_, geo_, ltr,
                                 observed_src_ip, now_,
                                 config_.ltr_freshness_window);
}

}  // namespace peps
