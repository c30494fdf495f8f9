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

#include "peps/world.hpp"

#include <algorithm>
#include <sstream>

namespace peps {

World::World(const Scenario& scenario, WorldConfig config)
    : scenario_(scenario),
      config_(config),
      scheme_(make_default_scheme()),
      fabric_(scheme_) {
    build(scenario_);
}

Controller& World::controller(const DomainId& id) {
    auto it = controllers_.find(id);
    if (it == controllers_.end()) throw InvariantError("unknown domain: " + id);
    return *it->second;
}

const std::vector<DpRequest>& World::dp_log(const std::string& host_id) const {
    static const std::vector<DpRequest> empty;
    auto it = providers_.find(host_id);
    return it == providers_.end() ? empty : it->second.log;
}

void World::build(const Scenario& sc) {
    // Domains and switches.
    std::set<DomainId> domains(sc.domains.begin(), sc.domains.end());
    if (domains.size() != sc.domains.size())
        throw InvariantError("duplicate domain id");
    for (const auto& d : sc.domains) {
        auto keys = scheme_->derive_keypair(stable_hash64("ctrl-" + d));
        auto ctrl = std::make_unique<Controller>(d, scheme_, keys);
        fabric_.register_controller(ctrl.get());
        controllers_.emplace(d, std::move(ctrl));
        inboxes_[d];
    }
    std::set<std::pair<DomainId, SwitchId>> switch_ids;
    for (const auto& sw : sc.switches) {
        if (!domains.contains(sw.domain))
            throw InvariantError("switch in unknown domain: " + sw.id);
        if (!switch_ids.insert({sw.domain, sw.id}).second)
            throw InvariantError("duplicate switch id: " + sw.id);
        controller(sw.domain).add_switch(sw.id, sw.edge);
    }

    // Wiring: explicit links plus one access link per host.
    auto wire = [&](const PortRef& a, const Endpoint& ep) {
        auto key = std::make_tuple(a.domain, a.sw, a.port);
        if (wires_.contains(key))
            throw InvariantError("port wired twice: " + a.to_string());
        if (!switch_ids.contains({a.domain, a.sw}))
            throw InvariantError("link endpoint on unknown switch: " + a.to_string());
        wires_.emplace(key, ep);
    };

    for (std::size_t i = 0; i < sc.links.size(); ++i) {
        const auto& l = sc.links[i];
        wire(l.a, Endpoint{Endpoint::Kind::Switch, l.b.domain, l.b.sw, l.b.port,
                           {}, i});
        wire(l.b, Endpoint{Endpoint::Kind::Switch, l.a.domain, l.a.sw, l.a.port,
                           {}, i});
        link_ids_.push_back(l.a.to_string() + "-" + l.b.to_string());
        if (l.a.domain != l.b.domain) {
            controller(l.a.domain).switch_state(l.a.sw)->edge = true;
            controller(l.b.domain).switch_state(l.b.sw)->edge = true;
        }
    }
    for (std::size_t i = 0; i < sc.hosts.size(); ++i) {
        const auto& h = sc.hosts[i];
        if (hosts_.contains(h.id)) throw InvariantError("duplicate host id: " + h.id);
        if (host_by_ip_.contains(h.ip))
            throw InvariantError("duplicate host ip: " + h.ip.to_string());
        wire(h.attach, Endpoint{Endpoint::Kind::Host, h.attach.domain, h.attach.sw,
                                h.attach.port, h.id, sc.links.size() + i});
        link_ids_.push_back(h.id + "-" + h.attach.to_string());
        controller(h.attach.domain).switch_state(h.attach.sw)->edge = true;
        hosts_.emplace(h.id, h);
        host_by_ip_.emplace(h.ip, h.id);
    }

    // Intra-domain connectivity.
    for (const auto& d : sc.domains) {
        std::vector<SwitchId> members;
        for (const auto& [dom, sw] : switch_ids)
            if (dom == d) members.push_back(sw);
        if (members.size() < 2) continue;
        std::set<SwitchId> seen{members.front()};
        std::deque<SwitchId> frontier{members.front()};
        while (!frontier.empty()) {
            auto cur = frontier.front();
            frontier.pop_front();
            for (const auto& [key, ep] : wires_) {
                const auto& [dom, sw, port] = key;
                if (dom != d || sw != cur) continue;
                if (ep.kind != Endpoint::Kind::Switch || ep.domain != d) continue;
                if (seen.insert(ep.sw).second) frontier.push_back(ep.sw);
            }
        }
        if (seen.size() != members.size())
            throw InvariantError("domain " + d + " is not connected");
    }

    // Zones and geo maps.
    for (auto& [d, ctrl] : controllers_)
        for (const auto& z : sc.zones) ctrl->geo().define_zone(z);
    for (const auto& zm : sc.zone_maps) {
        if (!controller(zm.port.domain)
                 .geo()
                 .map_port(zm.port.sw, zm.port.port, zm.zone_id))
            throw InvariantError("zone map references unknown zone: " + zm.zone_id);
    }

    // Universe: explicit or derived from the topology.
    HeaderUniverse universe;
    if (sc.universe) {
        universe = *sc.universe;
    } else {
        std::vector<Ipv4> ips;
        for (const auto& [ip, id] : host_by_ip_) ips.push_back(ip);
        std::vector<std::uint16_t> ports{40000};
        for (const auto& sub : sc.subscribers)
            for (auto p : sub.address.ports) ports.push_back(p);
        std::sort(ports.begin(), ports.end());
        ports.erase(std::unique(ports.begin(), ports.end()), ports.end());
        universe = HeaderUniverse{ips, ports, {Protocol::Tcp, Protocol::Udp}};
    }

    for (auto& [d, ctrl] : controllers_) {
        ctrl->set_universe(universe);
        if (auto it = sc.local_policies.find(d); it != sc.local_policies.end())
            ctrl->set_local_policies(it->second);
    }

    // Subscribers; local application keys are derived from the id.
    for (const auto& sub : sc.subscribers) {
        Subscriber s;
        s.id = sub.id;
        s.service_address = sub.address;
        if (sub.remote) {
            s.kind = Subscriber::Kind::RemoteDomainApp;
            s.origin_domain = sub.origin_domain;
        } else {
            s.kind = Subscriber::Kind::LocalApp;
            s.public_key =
                scheme_->derive_keypair(stable_hash64("app-" + sub.id)).public_key;
        }
        auto res = controller(sub.domain).register_subscriber(std::move(s));
        if (!res.ok)
            throw InvariantError("subscriber registration failed: " + res.error);
    }

    for (const auto& prov : sc.providers) {
        if (!hosts_.contains(prov.host_id))
            throw InvariantError("provider on unknown host: " + prov.host_id);
        providers_[prov.host_id] = Provider{prov.ports, prov.inner_pep, {}};
    }

    for (const auto& ch : sc.channels) {
        auto res = fabric_.connect(ch.a, ch.b, config_.ew_latency);
        if (!res.ok) throw InvariantError("channel setup failed: " + res.error);
    }

    build_routing();
    for (auto& [d, ctrl] : controllers_) {
        const DomainId domain = d;
        ctrl->set_route_fn([this, domain](const SwitchId& sw, Ipv4 dst)
                               -> std::optional<std::uint16_t> {
            auto it = routes_.find({domain, sw});
            if (it == routes_.end()) return std::nullopt;
            auto jt = it->second.find(dst);
            if (jt == it->second.end()) return std::nullopt;
            return jt->second;
        });
        ctrl->set_on_host_located([this, domain](Ipv4 host, const LocationZone&,
                                                 bool) {
            fabric_.on_host_located(domain, host, now_);
        });
    }

    for (const auto& d : sc.disable_outer) {
        for (auto& [id, st] : controller(d).switches_mut()) st.peps_disabled = true;
    }
    if (config_.disable_outer_everywhere) {
        for (auto& [d, ctrl] : controllers_)
            for (auto& [id, st] : ctrl->switches_mut()) st.peps_disabled = true;
    }

    for (const auto& inj : sc.injects) {
        if (!hosts_.contains(inj.from_host))
            throw InvariantError("inject from unknown host: " + inj.from_host);
        if (inj.via && !switch_ids.contains({inj.via->domain, inj.via->sw}))
            throw InvariantError("inject via unknown switch: " +
                                 inj.via->to_string());
    }

    // Scripted timeline. Control-plane scripts run before injections within
    // the same tick, each group in declaration order.
    auto schedule_script = [&](Script::Kind kind, std::size_t index, Tick at) {
        scripts_.push_back({kind, index});
        Event ev;
        ev.tick = at;
        ev.seq = next_seq_++;
        ev.kind = Event::Kind::Script;
        ev.script_index = scripts_.size() - 1;
        events_.push(ev);
    };
    for (std::size_t i = 0; i < sc.policy_changes.size(); ++i)
        schedule_script(Script::Kind::PolicyChange, i, sc.policy_changes[i].at);
    for (std::size_t i = 0; i < sc.pts.size(); ++i)
        schedule_script(Script::Kind::Pt, i, sc.pts[i].at);
    for (std::size_t i = 0; i < sc.rpts.size(); ++i)
        schedule_script(Script::Kind::Rpt, i, sc.rpts[i].at);
    for (std::size_t i = 0; i < sc.sessions.size(); ++i)
        schedule_script(Script::Kind::Session, i, sc.sessions[i].at);
    for (std::size_t i = 0; i < sc.actions.size(); ++i)
        schedule_script(Script::Kind::Action, i, sc.actions[i].at);
    for (std::size_t i = 0; i < sc.injects.size(); ++i) {
        const auto& inj = sc.injects[i];
        for (std::uint32_t r = 0; r < inj.count; ++r)
            schedule_script(Script::Kind::Inject, i, inj.at + r * inj.step);
    }

    report_.link_ids = link_ids_;
}

void World::build_routing() {
    // Adjacency over switch-switch wires, sorted for determinism.
    std::map<std::pair<DomainId, SwitchId>,
             std::vector<std::tuple<std::uint16_t, DomainId, SwitchId,
                                    std::uint16_t>>>
        adj;
    for (const auto& [key, ep] : wires_) {
        if (ep.kind != Endpoint::Kind::Switch) continue;
        const auto& [dom, sw, port] = key;
        adj[{dom, sw}].emplace_back(port, ep.domain, ep.sw, ep.port);
    }

    for (const auto& [id, h] : hosts_) {
        const std::pair<DomainId, SwitchId> origin{h.attach.domain, h.attach.sw};
        routes_[origin][h.ip] = h.attach.port;
        std::set<std::pair<DomainId, SwitchId>> seen{origin};
        std::deque<std::pair<DomainId, SwitchId>> frontier{origin};
        while (!frontier.empty()) {
            auto cur = frontier.front();
            frontier.pop_front();
            auto it = adj.find(cur);
            if (it == adj.end()) continue;
            for (const auto& [port, ndom, nsw, nport] : it->second) {
                const std::pair<DomainId, SwitchId> next{ndom, nsw};
                if (!seen.insert(next).second) continue;
                routes_[next][h.ip] = nport;  // egress back toward `cur`
                frontier.push_back(next);
            }
        }
    }
}

void World::schedule(Event ev) {
    ev.seq = next_seq_++;
    events_.push(std::move(ev));
}

void World::inject(const InjectSpec& inj) {
    if (!hosts_.contains(inj.from_host))
        throw InvariantError("inject from unknown host: " + inj.from_host);
    scenario_.injects.push_back(inj);
    const std::size_t index = scenario_.injects.size() - 1;
    for (std::uint32_t r = 0; r < inj.count; ++r) {
        scripts_.push_back({Script::Kind::Inject, index});
        Event ev;
        ev.tick = inj.at + r * inj.step;
        ev.kind = Event::Kind::Script;
        ev.script_index = scripts_.size() - 1;
        schedule(std::move(ev));
    }
}

void World::count_link(std::size_t link_index) {
    if (link_index < row_->link_bytes.size()) ++row_->link_bytes[link_index];
}

void World::count_drop(const DomainId& where, const PacketCtx& ctx) {
    if (where == ctx.src_domain)
        ++row_->dropped_at_source_edge;
    else if (!ctx.dst_domain.empty() && where == ctx.dst_domain)
        ++row_->dropped_at_dp_network;
    else
        ++row_->dropped_in_transit;
}

void World::run_script(const Script& script, Tick tick) {
    switch (script.kind) {
        case Script::Kind::Inject: {
            const auto& inj = scenario_.injects[script.index];
            auto host_it = hosts_.find(inj.from_host);
            if (host_it == hosts_.end()) return;
            const HostSpec& host = host_it->second;

            PacketCtx ctx;
            ctx.pkt.src_ip = inj.src_override.value_or(host.ip);
            ctx.pkt.dst_ip = inj.dst;
            ctx.pkt.src_port = inj.sport;
            ctx.pkt.dst_port = inj.dport;
            ctx.pkt.protocol = inj.proto;
            ctx.pkt.eth_src = stable_hash64(inj.from_host) & 0xffffffffffffULL;
            ctx.injection_id = ++injections_;

            const PortRef entry = inj.via.value_or(host.attach);
            ctx.src_domain = entry.domain;
            if (auto dst_host = host_by_ip_.find(inj.dst);
                dst_host != host_by_ip_.end())
                ctx.dst_domain = hosts_.at(dst_host->second).attach.domain;

            auto wire = wires_.find({entry.domain, entry.sw, entry.port});
            if (wire != wires_.end()) count_link(wire->second.link_index);

            Event ev;
            ev.tick = tick + 1;  // access-link hop
            ev.kind = Event::Kind::AtSwitch;
            ev.domain = entry.domain;
            ev.sw = entry.sw;
            ev.in_port = entry.port;
            ev.ctx = std::move(ctx);
            schedule(std::move(ev));
            break;
        }
        case Script::Kind::Pt: {
            const auto& spec = scenario_.pts[script.index];
            if (!controllers_.contains(spec.domain)) return;
            PolicyTransfer pt;
            pt.subscriber_id = spec.subscriber_id;
            pt.policies = spec.policies;
            pt.sequence_number = spec.seq;
            pt.sign_with(*scheme_, scheme_->derive_keypair(stable_hash64(
                                       "app-" + spec.subscriber_id)));
            CtrlMsg msg;
            msg.kind = CtrlMsg::Kind::Pt;
            msg.pt = std::move(pt);
            inboxes_[spec.domain].push_back(std::move(msg));
            break;
        }
        case Script::Kind::Rpt: {
            const auto& spec = scenario_.rpts[script.index];
            if (!controllers_.contains(spec.from) || !controllers_.contains(spec.to))
                return;
            RemotePolicyTransfer rpt;
            rpt.origin_domain_id = spec.from;
            rpt.subscriber_id = spec.subscriber_id;
            if (spec.scope_override) {
                rpt.subscriber_service_address = *spec.scope_override;
            } else if (const Subscriber* sub =
                           controller(spec.to).find_subscriber(spec.subscriber_id)) {
                rpt.subscriber_service_address = sub->service_address;
            }
            rpt.policies = spec.policies;
            rpt.sequence_number = spec.seq;
            rpt.sign_with(*scheme_, controller(spec.from).keys());
            fabric_.send_rpt(spec.from, spec.to, rpt, tick);
            break;
        }
        case Script::Kind::Session: {
            const auto& spec = scenario_.sessions[script.index];
            auto res = fabric_.open_session(spec.provider, spec.requestor,
                                            spec.subscriber_id, spec.zones, tick);
            if (res.ok)
                session_ids_[spec.provider + "|" + spec.requestor + "|" +
                             spec.subscriber_id] = res.session_id;
            break;
        }
        case Script::Kind::PolicyChange: {
            const auto& spec = scenario_.policy_changes[script.index];
            if (controllers_.contains(spec.domain))
                controller(spec.domain).on_local_policy_change(spec.policies);
            break;
        }
        case Script::Kind::Action: {
            const auto& act = scenario_.actions[script.index];
            switch (act.kind) {
                case ActionSpec::Kind::Pin: {
                    auto it = hosts_.find(act.host_id);
                    if (it == hosts_.end()) return;
                    const auto& h = it->second;
                    controller(h.attach.domain)
                        .pin_port(h.ip, h.attach.sw, h.attach.port);
                    break;
                }
                case ActionSpec::Kind::Teardown: {
                    auto key = act.a + "|" + act.b + "|" + act.subscriber_id;
                    if (auto it = session_ids_.find(key); it != session_ids_.end())
                        fabric_.teardown_session(it->second, tick);
                    break;
                }
                case ActionSpec::Kind::Tamper: {
                    if (auto* ch = fabric_.channel_between(act.a, act.b))
                        ch->tamper_next(act.a);
                    break;
                }
            }
            break;
        }
    }
}

void World::process_at_switch(const Event& ev) {
    Controller& ctrl = controller(ev.domain);
    auto* st = ctrl.switch_state(ev.sw);
    if (!st) {
        count_drop(ev.domain, ev.ctx);
        return;
    }
    PacketHeader pkt = ev.ctx.pkt;
    pkt.in_port = ev.in_port;
    auto verdict = st->pipeline.process(pkt, now_, st->peps_disabled);
    if (verdict.kind == PipelineVerdict::Kind::SendToController) {
        CtrlMsg msg;
        msg.kind = CtrlMsg::Kind::PacketIn;
        msg.sw = ev.sw;
        msg.in_port = ev.in_port;
        msg.ctx = ev.ctx;
        inboxes_[ev.domain].push_back(std::move(msg));
        return;
    }
    apply_verdict(ev.domain, ev.sw, ev.ctx, verdict, now_);
}

void World::apply_verdict(const DomainId& domain, const SwitchId& sw,
                          const PacketCtx& ctx, const PipelineVerdict& verdict,
                          Tick tick) {
    if (verdict.kind != PipelineVerdict::Kind::Forward) {
        // Drop and RateLimited end the packet here; a controller verdict of
        // SendToController cannot recur and counts as a drop for conservation.
        count_drop(domain, ctx);
        return;
    }
    auto wire = wires_.find({domain, sw, verdict.port});
    if (wire == wires_.end()) {
        count_drop(domain, ctx);  // forwarded into an unwired port
        return;
    }
    count_link(wire->second.link_index);
    const Endpoint& ep = wire->second;
    Event next;
    next.tick = tick + 1;
    next.ctx = ctx;
    if (ep.kind == Endpoint::Kind::Switch) {
        next.kind = Event::Kind::AtSwitch;
        next.domain = ep.domain;
        next.sw = ep.sw;
        next.in_port = ep.port;
    } else {
        next.kind = Event::Kind::AtHost;
        next.host_id = ep.host_id;
    }
    schedule(std::move(next));
}

void World::deliver_to_host(const Event& ev) {
    const HostSpec& host = hosts_.at(ev.host_id);
    if (ev.ctx.pkt.dst_ip != host.ip) {
        count_drop(host.attach.domain, ev.ctx);
        return;
    }
    auto prov = providers_.find(ev.host_id);
    if (prov != providers_.end()) {
        auto& p = prov->second;
        const bool service_port =
            p.ports.empty() ||
            std::find(p.ports.begin(), p.ports.end(), ev.ctx.pkt.dst_port) !=
                p.ports.end();
        if (service_port) {
            // Inner application-level enforcement point: always consulted,
            // regardless of what the network layers did.
            const bool granted = decide(p.inner_pep, ev.ctx.pkt).is_allow();
            p.log.push_back({now_, ev.ctx.pkt, granted});
            if (granted)
                ++row_->delivered;
            else
                ++row_->dropped_at_dp_app;
            return;
        }
    }
    ++row_->delivered;
}

bool World::work_pending() const {
    if (!events_.empty()) return true;
    for (const auto& [d, inbox] : inboxes_)
        if (!inbox.empty()) return true;
    return !fabric_.idle();
}

MetricsReport World::run(Tick until_tick) {
    const Tick hard_cap = until_tick + 100000;
    now_ = 0;
    while (now_ <= until_tick || work_pending()) {
        if (now_ > hard_cap)
            throw InvariantError("simulation did not quiesce");

        report_.rows.emplace_back();
        row_ = &report_.rows.back();
        row_->link_bytes.assign(link_ids_.size(), 0);

        for (auto& [d, ctrl] : controllers_) ctrl->advance_to(now_);

        while (!events_.empty() && events_.top().tick <= now_) {
            Event ev = events_.top();
            events_.pop();
            switch (ev.kind) {
                case Event::Kind::Script: run_script(scripts_[ev.script_index], now_);
                    break;
                case Event::Kind::AtSwitch: process_at_switch(ev); break;
                case Event::Kind::AtHost: deliver_to_host(ev); break;
            }
        }

        for (auto& env : fabric_.collect_due(now_)) {
            CtrlMsg msg;
            msg.kind = CtrlMsg::Kind::Envelope;
            msg.envelope = std::move(env);
            inboxes_[msg.envelope.to_domain].push_back(std::move(msg));
        }

        for (auto& [d, ctrl] : controllers_) {
            auto& inbox = inboxes_[d];
            std::uint32_t budget = config_.controller_budget_per_tick;
            while (budget > 0 && !inbox.empty()) {
                CtrlMsg msg = std::move(inbox.front());
                inbox.pop_front();
                --budget;
                ++row_->controller_msgs_processed;
                switch (msg.kind) {
                    case CtrlMsg::Kind::PacketIn: {
                        ++row_->packet_in_count;
                        auto res = ctrl->handle_packet_in(msg.sw, msg.in_port,
                                                          msg.ctx.pkt);
                        if (res.ok)
                            apply_verdict(d, msg.sw, msg.ctx, res.verdict, now_);
                        else
                            count_drop(d, msg.ctx);
                        break;
                    }
                    case CtrlMsg::Kind::Pt:
                        ctrl->receive_pt(msg.pt);
                        break;
                    case CtrlMsg::Kind::Envelope:
                        fabric_.dispatch(msg.envelope, now_);
                        break;
                }
            }
        }

        ++now_;
    }

    report_.injected = injections_;
    return report_;
}

// ---------------------------------------------------------------------------
// Canned chained-firewall scenario (k domains in a line, provider in the last)
// ---------------------------------------------------------------------------

std::vector<std::vector<Policy>> canned_firewall_ladder() {
    auto deny_src = [](const char* ip) {
        Policy p;
        p.priority = 10;
        p.decision = Decision::deny();
        p.match.src_ip = *Ipv4::parse(ip);
        p.match.dst_ip = Cidr{Ipv4{10, 90, 0, 10}, 32};
        p.match.dst_port = 3306;
        return p;
    };
    return {
        {deny_src("10.1.0.1")},
        {deny_src("10.1.0.1"), deny_src("10.1.0.2"), deny_src("10.1.0.3")},
    };
}

std::string make_progressive_firewall_scenario_text(
    std::size_t domain_count, const std::vector<std::vector<Policy>>& ladder) {
    if (domain_count < 2)
        throw std::invalid_argument("chain needs at least two domains");
    std::ostringstream os;
    auto dom = [](std::size_t i) { return "D" + std::to_string(i + 1); };

    os << "[topology]\n";
    for (std::size_t i = 0; i < domain_count; ++i) os << "domain " << dom(i) << "\n";
    for (std::size_t i = 0; i < domain_count; ++i)
        os << "switch " << dom(i) << ":s1\n";
    os << "host x1 10.1.0.1 D1:s1:1\n";
    os << "host x2 10.1.0.2 D1:s1:2\n";
    os << "host x3 10.1.0.3 D1:s1:3\n";
    os << "host good 10.1.0.9 D1:s1:4\n";
    os << "host dp1 10.90.0.10 " << dom(domain_count - 1) << ":s1:1\n";
    for (std::size_t i = 0; i + 1 < domain_count; ++i)
        os << "link " << dom(i) << ":s1:11 " << dom(i + 1) << ":s1:10\n";

    os << "\n[universe]\n";
    os << "hosts 10.1.0.1 10.1.0.2 10.1.0.3 10.1.0.9 10.90.0.10\n";
    os << "ports 3306 40000\n";
    os << "protocols tcp\n";

    for (std::size_t i = 0; i < domain_count; ++i) {
        os << "\n[policies " << dom(i) << "]\n";
        os << "PRIO 1 ALLOW src=* dst=* sport=* dport=* proto=*\n";
    }

    os << "\n[subscribers]\n";
    os << "subscriber " << dom(domain_count - 1) << " dp 10.90.0.10:3306 local\n";
    for (std::size_t i = 0; i + 1 < domain_count; ++i)
        os << "subscriber " << dom(i) << " dp 10.90.0.10:3306 remote " << dom(i + 1)
           << "\n";

    os << "\n[provider dp1 3306]\n";
    os << "PRIO 10 ALLOW src=10.1.0.9 dst=10.90.0.10 sport=* dport=3306 proto=*\n";

    os << "\n[channels]\n";
    for (std::size_t i = 0; i + 1 < domain_count; ++i)
        os << "channel " << dom(i) << " " << dom(i + 1) << "\n";

    // Each domain's ladder entry arrives as an RPT from its inner neighbour.
    for (std::size_t i = 0; i + 1 < domain_count && i < ladder.size(); ++i) {
        os << "\n[rpt " << dom(i + 1) << " " << dom(i) << " dp seq=1 at=1]\n";
        for (const auto& p : ladder[i]) os << p.to_line() << "\n";
    }

    os << "\n[inject]\n";
    os << "at 6 from x1 dst=10.90.0.10 dport=3306 sport=41001 count=30\n";
    os << "at 6 from x2 dst=10.90.0.10 dport=3306 sport=41002 count=30\n";
    os << "at 6 from x3 dst=10.90.0.10 dport=3306 sport=41003 count=30\n";
    os << "at 6 from good dst=10.90.0.10 dport=3306 sport=41009 count=30\n";
    return os.str();
}

MetricsReport run_progressive_firewall(std::size_t domain_count,
                                       const std::vector<std::vector<Policy>>& ladder,
                                       Tick until_tick, WorldConfig config) {
    auto scenario =
        parse_scenario(make_progressive_firewall_scenario_text(domain_count, ladder));
    World world(scenario, config);
    return world.run(until_tick);
}

}  // namespace peps
