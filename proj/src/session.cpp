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

#include "peps/session.hpp"

#include <sstream>

namespace peps {

namespace {

constexpr std::int32_t kExceptionPriority = 100;
constexpr std::int32_t kCatchAllPriority = 1;

/// "Deny everything toward the subscriber except the bound hosts", port by
/// port when the service address is port-scoped.
std::vector<Policy> make_session_policies(
    const ServiceAddress& addr, const std::map<Ipv4, std::string>& bindings) {
    std::vector<Policy> out;
    auto each_port = [&](auto&& fn) {
        if (addr.ports.empty()) {
            fn(std::optional<std::uint16_t>{});
        } else {
            for (auto p : addr.ports) fn(std::optional<std::uint16_t>{p});
        }
    };
    for (const auto& [host, zone] : bindings) {
        each_port([&](std::optional<std::uint16_t> port) {
            Policy allow;
            allow.priority = kExceptionPriority;
            allow.decision = Decision::allow();
            allow.match.src_ip = host;
            allow.match.dst_ip = Cidr{addr.ip, 32};
            allow.match.dst_port = port;
            allow.comment = "session host in " + zone;
            out.push_back(std::move(allow));
        });
    }
    each_port([&](std::optional<std::uint16_t> port) {
        Policy deny;
        deny.priority = kCatchAllPriority;
        deny.decision = Decision::deny();
        deny.match.dst_ip = Cidr{addr.ip, 32};
        deny.match.dst_port = port;
        deny.comment = "session catch-all";
        out.push_back(std::move(deny));
    });
    return out;
}

}  // namespace

std::string to_string(SessionState s) {
    switch (s) {
        case SessionState::Proposed: return "Proposed";
        case SessionState::Active: return "Active";
        case SessionState::TornDown: return "TornDown";
    }
    return "?";
}

void InterdomainFabric::register_controller(Controller* ctrl) {
    controllers_[ctrl->domain_id()] = ctrl;
}

Controller* InterdomainFabric::controller(const DomainId& id) {
    auto it = controllers_.find(id);
    return it == controllers_.end() ? nullptr : it->second;
}

InterdomainFabric::ConnectResult InterdomainFabric::connect(const DomainId& a,
                                                            const DomainId& b,
                                                            Tick latency) {
    Controller* ca = controller(a);
    Controller* cb = controller(b);
    if (!ca || !cb || a == b) return {false, "UnknownDomain", nullptr};
    if (ca->keys().public_key.empty() || cb->keys().public_key.empty())
        return {false, "MissingPeerKey", nullptr};

    ca->add_peer_key(b, cb->keys().public_key);
    cb->add_peer_key(a, ca->keys().public_key);

    const auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    auto it = channels_.find(key);
    if (it == channels_.end()) {
        it = channels_
                 .emplace(key, std::make_unique<EastWestChannel>(key.first,
                                                                 key.second, latency))
                 .first;
    }
    return {true, {}, it->second.get()};
}

EastWestChannel* InterdomainFabric::channel_between(const DomainId& a,
                                                    const DomainId& b) {
    const auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    auto it = channels_.find(key);
    return it == channels_.end() ? nullptr : it->second.get();
}

InterdomainFabric::SendReceipt InterdomainFabric::send_rpt(
    const DomainId& from, const DomainId& to, const RemotePolicyTransfer& rpt,
    Tick now) {
    auto* ch = channel_between(from, to);
    if (!ch) return {false, "MissingChannel", 0};
    Controller* sender = controller(from);
    if (!sender) return {false, "UnknownDomain", 0};
    auto receipt = ch->send(from, EwEnvelope::Type::Rpt, rpt.serialize(), *scheme_,
                            sender->keys(), now);
    if (receipt.ok) ++stats_.envelopes_sent;
    return {receipt.ok, receipt.error, receipt.seq};
}

std::map<Ipv4, std::string> InterdomainFabric::located_hosts(
    Controller& ctrl) const {
    std::map<Ipv4, std::string> out;
    for (const auto& [host, at] : ctrl.geo().attachments()) {
        auto zone = ctrl.geo().zone_at(at.switch_id, at.port_id);
        if (zone) out[host] = zone->zone_id;
    }
    return out;
}

std::string InterdomainFabric::binding_report_payload(
    const LbacSession& s, const std::map<Ipv4, std::string>& located) {
    std::ostringstream os;
    os << "SESSION " << s.session_id << " BINDINGS ";
    if (located.empty()) {
        os << '-';
    } else {
        bool first = true;
        for (const auto& [ip, zone] : located) {
            if (!first) os << ',';
            os << ip.to_string() << ':' << zone;
            first = false;
        }
    }
    return os.str();
}

void InterdomainFabric::send_binding_report(LbacSession& s, Tick now) {
    auto* ch = channel_between(s.provider_domain, s.requestor_domain);
    Controller* req = controller(s.requestor_domain);
    if (!ch || !req) return;
    const auto located = located_hosts(*req);
    s.last_reported = located;
    auto receipt = ch->send(s.requestor_domain, EwEnvelope::Type::Binding,
                            binding_report_payload(s, located), *scheme_,
                            req->keys(), now);
    if (receipt.ok) ++stats_.envelopes_sent;
}

void InterdomainFabric::mint_and_send_session_rpt(
    LbacSession& s, const std::map<Ipv4, std::string>& reported, Tick now) {
    Controller* prov = controller(s.provider_domain);
    auto* ch = channel_between(s.provider_domain, s.requestor_domain);
    if (!prov || !ch) return;
    const Subscriber* sub = prov->find_subscriber(s.subscriber_id);
    if (!sub) return;

    std::map<Ipv4, std::string> allowed;
    for (const auto& [ip, zone] : reported)
        if (s.allowed_zones.contains(zone)) allowed[ip] = zone;
    s.bindings = allowed;

    RemotePolicyTransfer rpt;
    rpt.origin_domain_id = s.provider_domain;
    rpt.subscriber_id = s.subscriber_id;
    rpt.subscriber_service_address = sub->service_address;
    rpt.policies = make_session_policies(sub->service_address, allowed);
    rpt.sequence_number = ++s.rpt_seq;
    rpt.sign_with(*scheme_, prov->keys());

    auto receipt = ch->send(s.provider_domain, EwEnvelope::Type::Rpt,
                            rpt.serialize(), *scheme_, prov->keys(), now);
    if (receipt.ok) ++stats_.envelopes_sent;
}

InterdomainFabric::OpenResult InterdomainFabric::open_session(
    const DomainId& provider, const DomainId& requestor,
    const std::string& subscriber_id, const std::set<std::string>& allowed_zones,
    Tick now) {
    Controller* prov = controller(provider);
    Controller* req = controller(requestor);
    if (!prov || !req) return {false, "UnknownDomain", {}};
    auto* ch = channel_between(provider, requestor);
    if (!ch) return {false, "MissingChannel", {}};
    if (!ch->active()) return {false, "ChannelDown", {}};

    const Subscriber* psub = prov->find_subscriber(subscriber_id);
    if (!psub || psub->kind != Subscriber::Kind::LocalApp)
        return {false, "UnknownSubscriber", {}};
    const Subscriber* rsub = req->find_subscriber(subscriber_id);
    if (!rsub || rsub->kind != Subscriber::Kind::RemoteDomainApp ||
        rsub->origin_domain != provider)
        return {false, "UnknownSubscriber", {}};

    LbacSession s;
    s.session_id = "lbac-" + std::to_string(next_session_++);
    s.provider_domain = provider;
    s.requestor_domain = requestor;
    s.subscriber_id = subscriber_id;
    s.allowed_zones = allowed_zones;
    s.state = SessionState::Proposed;
    auto [it, _] = sessions_.emplace(s.session_id, std::move(s));

    send_binding_report(it->second, now);
    return {true, {}, it->first};
}

void InterdomainFabric::teardown_session(const std::string& session_id, Tick now) {
    auto it = sessions_.find(session_id);
    if (it == sessions_.end() || it->second.state == SessionState::TornDown) return;
    LbacSession& s = it->second;

    if (Controller* req = controller(s.requestor_domain))
        req->revoke_rpt(s.provider_domain, s.subscriber_id);
    s.state = SessionState::TornDown;

    // Courtesy notification; state is already final on both sides.
    if (auto* ch = channel_between(s.provider_domain, s.requestor_domain)) {
        if (Controller* prov = controller(s.provider_domain)) {
            ch->send(s.provider_domain, EwEnvelope::Type::Session,
                     "TEARDOWN " + s.session_id, *scheme_, prov->keys(), now);
        }
    }
}

const LbacSession* InterdomainFabric::session(const std::string& id) const {
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : &it->second;
}

void InterdomainFabric::on_host_located(const DomainId& domain, Ipv4 /*host*/,
                                        Tick now) {
    for (auto& [id, s] : sessions_) {
        if (s.requestor_domain != domain || s.state == SessionState::TornDown)
            continue;
        Controller* req = controller(domain);
        if (!req) continue;
        const auto located = located_hosts(*req);
        if (located != s.last_reported) send_binding_report(s, now);
    }
}

std::vector<EwEnvelope> InterdomainFabric::collect_due(Tick now) {
    std::vector<EwEnvelope> out;
    for (auto& [key, ch] : channels_) {
        auto due = ch->collect_due(now);
        out.insert(out.end(), std::make_move_iterator(due.begin()),
                   std::make_move_iterator(due.end()));
    }
    return out;
}

InterdomainFabric::DispatchResult InterdomainFabric::dispatch(const EwEnvelope& env,
                                                              Tick now) {
    Controller* recv = controller(env.to_domain);
    if (!recv) return {false, {}};
    const std::string* sender_key = recv->peer_key(env.from_domain);
    if (!sender_key || !scheme_->verify(*sender_key, env.signing_payload(),
                                        env.signature_hex)) {
        ++stats_.envelopes_bad_signature;
        return {false, {}};
    }
    ++stats_.envelopes_delivered;

    switch (env.type) {
        case EwEnvelope::Type::Rpt: {
            auto report = recv->receive_rpt_text(env.payload);
            for (auto& [id, s] : sessions_) {
                if (s.provider_domain != env.from_domain ||
                    s.requestor_domain != env.to_domain ||
                    s.subscriber_id != report.subscriber_id ||
                    s.state == SessionState::TornDown)
                    continue;
                if (report.accepted) {
                    s.state = SessionState::Active;
                    s.last_error.clear();
                } else {
                    s.last_error = report.reason;
                }
            }
            return {true, report};
        }
        case EwEnvelope::Type::Binding: {
            std::istringstream is(env.payload);
            std::string kw, session_id, kw2, list;
            is >> kw >> session_id >> kw2 >> list;
            if (kw != "SESSION" || kw2 != "BINDINGS") return {true, {}};
            auto it = sessions_.find(session_id);
            if (it == sessions_.end() ||
                it->second.state == SessionState::TornDown)
                return {true, {}};

            std::map<Ipv4, std::string> reported;
            if (list != "-") {
                std::size_t start = 0;
                while (start <= list.size()) {
                    auto comma = list.find(',', start);
                    auto entry = list.substr(
                        start, comma == std::string::npos ? std::string::npos
                                                          : comma - start);
                    auto colon = entry.find(':');
                    if (colon != std::string::npos) {
                        auto ip = Ipv4::parse(entry.substr(0, colon));
                        if (ip) reported[*ip] = entry.substr(colon + 1);
                    }
                    if (comma == std::string::npos) break;
                    start = comma + 1;
                }
            }
            mint_and_send_session_rpt(it->second, reported, now);
            return {true, {}};
        }
        case EwEnvelope::Type::Session:
            return {true, {}};  // informational
    }
    return {true, {}};
}

std::size_t InterdomainFabric::pump(Tick now) {
    std::size_t processed = 0;
    for (auto env : collect_due(now)) {
        dispatch(env, now);
        ++processed;
    }
    return processed;
}

bool InterdomainFabric::idle() const {
    for (const auto& [key, ch] : channels_)
        if (ch->pending()) return false;
    return true;
}

}  // namespace peps
