#include <doctest.h>

#include "peps/controller.hpp"
#include "support/oracle.hpp"

using namespace peps;

namespace {

const Ipv4 kDp{10, 2, 0, 10};
const Ipv4 kH1{10, 0, 0, 1};
const Ipv4 kH2{10, 0, 0, 2};
const Ipv4 kEvil{10, 0, 0, 9};

Policy mk(std::int32_t prio, Decision d, MatchFields m = {}) {
    Policy p;
    p.priority = prio;
    p.decision = d;
    p.match = std::move(m);
    return p;
}

MatchFields dst(Ipv4 ip) {
    MatchFields m;
    m.dst_ip = Cidr{ip, 32};
    return m;
}

struct Rig {
    std::shared_ptr<SignatureScheme> scheme = make_default_scheme();
    KeyPair ctrl_keys = scheme->derive_keypair(stable_hash64("ctrl-A"));
    KeyPair dbms_keys = scheme->derive_keypair(stable_hash64("app-dbms"));
    KeyPair peer_keys = scheme->derive_keypair(stable_hash64("ctrl-B"));
    Controller ctrl;

    explicit Rig(ControllerConfig cfg = {})
        : ctrl("A", scheme, ctrl_keys, cfg) {
        ctrl.set_universe(oracle::small_universe());
        ctrl.add_switch("s1", true);
        ctrl.add_switch("s2", false);
        ctrl.set_local_policies({mk(1, Decision::allow())});
        ctrl.set_route_fn([](const SwitchId&, Ipv4) {
            return std::optional<std::uint16_t>{7};
        });
        ctrl.register_subscriber(Subscriber{
            "dbms", ServiceAddress{kDp, {}}, dbms_keys.public_key,
            Subscriber::Kind::LocalApp, ""});
        ctrl.geo().define_zone({"Z1", "Location 1", SecurityClass::Secure});
        ctrl.geo().map_port("s1", 2, "Z1");
        ctrl.add_peer_key("B", peer_keys.public_key);
        ctrl.register_subscriber(Subscriber{
            "db_b", ServiceAddress{Ipv4{10, 3, 0, 10}, {}}, "",
            Subscriber::Kind::RemoteDomainApp, "B"});
    }

    PolicyTransfer signed_pt(std::vector<Policy> policies, std::uint64_t seq = 1) {
        PolicyTransfer pt;
        pt.subscriber_id = "dbms";
        pt.policies = std::move(policies);
        pt.sequence_number = seq;
        pt.sign_with(*scheme, dbms_keys);
        return pt;
    }

    RemotePolicyTransfer signed_rpt(std::vector<Policy> policies,
                                    std::uint64_t seq = 1) {
        RemotePolicyTransfer rpt;
        rpt.origin_domain_id = "B";
        rpt.subscriber_id = "db_b";
        rpt.subscriber_service_address = ServiceAddress{Ipv4{10, 3, 0, 10}, {}};
        rpt.policies = std::move(policies);
        rpt.sequence_number = seq;
        rpt.sign_with(*scheme, peer_keys);
        return rpt;
    }

    std::size_t policy_rules_everywhere(OriginKind kind) {
        std::size_t n = 0;
        for (auto& [id, st] : ctrl.switches_mut()) {
            for (const auto& r :
                 st.pipeline.table(st.pipeline.last_table_index()).rules)
                if (r.origin.kind == kind) ++n;
        }
        return n;
    }
};

PacketHeader flow(Ipv4 src, Ipv4 dst, std::uint16_t sport = 40000,
                  std::uint16_t dport = 3306) {
    PacketHeader pkt;
    pkt.src_ip = src;
    pkt.dst_ip = dst;
    pkt.src_port = sport;
    pkt.dst_port = dport;
    pkt.protocol = Protocol::Tcp;
    return pkt;
}

}  // namespace

TEST_CASE("packet_in: attaches the host, installs a reactive rule, forwards") {
    Rig rig;
    auto res = rig.ctrl.handle_packet_in("s1", 2, flow(kH1, kDp));
    REQUIRE(res.ok);
    CHECK(res.geo_updated);
    CHECK(res.zone->zone_id == "Z1");
    CHECK(res.verdict.kind == PipelineVerdict::Kind::Forward);
    CHECK(res.verdict.port == 7);
    REQUIRE(rig.ctrl.geo().attachment(kH1).has_value());
    CHECK(rig.ctrl.geo().attachment(kH1)->switch_id == "s1");

    // The flow is now handled in the data plane.
    auto* st = rig.ctrl.switch_state("s1");
    auto verdict = st->pipeline.process(flow(kH1, kDp), 1);
    CHECK(verdict.kind == PipelineVerdict::Kind::Forward);
}

TEST_CASE("packet_in: deny decision installs a dropping reactive rule") {
    Rig rig;
    rig.ctrl.set_local_policies({mk(10, Decision::deny(), [] {
                                     MatchFields m;
                                     m.src_ip = kEvil;
                                     return m;
                                 }()),
                                 mk(1, Decision::allow())});
    auto res = rig.ctrl.handle_packet_in("s1", 2, flow(kEvil, kDp));
    REQUIRE(res.ok);
    CHECK(res.verdict.kind == PipelineVerdict::Kind::Drop);
}

TEST_CASE("packet_in: rate-limit decision pairs a limiter with forwarding") {
    Rig rig;
    rig.ctrl.set_local_policies({mk(10, Decision::rate_limit(5, 10), dst(kDp)),
                                 mk(1, Decision::allow())});
    auto res = rig.ctrl.handle_packet_in("s1", 2, flow(kH1, kDp));
    REQUIRE(res.ok);
    CHECK(res.verdict.kind == PipelineVerdict::Kind::Forward);
    auto* st = rig.ctrl.switch_state("s1");
    bool limiter_found = false;
    for (const auto& r : st->pipeline.table(0).rules)
        limiter_found = limiter_found || r.action.kind == ActionKind::RateLimit;
    CHECK(limiter_found);
}

TEST_CASE("packet_in: unknown switch") {
    Rig rig;
    CHECK_FALSE(rig.ctrl.handle_packet_in("nope", 1, flow(kH1, kDp)).ok);
}

TEST_CASE("register_subscriber: id and address uniqueness") {
    Rig rig;
    auto fresh = rig.ctrl.register_subscriber(Subscriber{
        "files", ServiceAddress{Ipv4{10, 2, 0, 11}, {445}}, "k",
        Subscriber::Kind::LocalApp, ""});
    CHECK(fresh.ok);

    auto dup_addr = rig.ctrl.register_subscriber(Subscriber{
        "files2", ServiceAddress{Ipv4{10, 2, 0, 11}, {445}}, "k",
        Subscriber::Kind::LocalApp, ""});
    CHECK_FALSE(dup_addr.ok);
    CHECK(dup_addr.error == "DuplicateAddress");

    // Same host, disjoint ports: a different service, allowed.
    auto other_port = rig.ctrl.register_subscriber(Subscriber{
        "files3", ServiceAddress{Ipv4{10, 2, 0, 11}, {8080}}, "k",
        Subscriber::Kind::LocalApp, ""});
    CHECK(other_port.ok);

    auto dup_id = rig.ctrl.register_subscriber(Subscriber{
        "dbms", ServiceAddress{Ipv4{10, 9, 9, 9}, {}}, "k",
        Subscriber::Kind::LocalApp, ""});
    CHECK_FALSE(dup_id.ok);
}

TEST_CASE("receive_pt: accepted rules appear on every switch's last table") {
    Rig rig;
    auto report = rig.ctrl.receive_pt(rig.signed_pt({mk(10, Decision::deny(),
                                                        dst(kDp))}));
    REQUIRE(report.accepted);
    CHECK(report.rules_installed == 2);  // one rule x two switches
    CHECK(rig.policy_rules_everywhere(OriginKind::LocalPT) == 2);
    CHECK(report.line() == "ACCEPT ok rules=2");

    // The data plane now drops traffic to the service.
    auto* st = rig.ctrl.switch_state("s2");
    REQUIRE(rig.ctrl.handle_packet_in("s2", 1, flow(kH2, kDp)).verdict.kind ==
            PipelineVerdict::Kind::Drop);
    CHECK(st->pipeline.process(flow(kH2, kDp), 1).kind ==
          PipelineVerdict::Kind::Drop);
}

TEST_CASE("receive_pt: a deny-flipping transfer is rejected with a witness") {
    Rig rig;
    MatchFields evil_src;
    evil_src.src_ip = kEvil;
    rig.ctrl.set_local_policies({mk(50, Decision::deny(), evil_src),
                                 mk(1, Decision::allow())});

    MatchFields exemption;
    exemption.src_ip = kEvil;
    exemption.dst_ip = Cidr{kDp, 32};
    auto report =
        rig.ctrl.receive_pt(rig.signed_pt({mk(99, Decision::allow(), exemption)}));
    CHECK_FALSE(report.accepted);
    CHECK(report.reason == "Violation");
    REQUIRE(report.witness.has_value());
    CHECK(report.witness->src_ip == kEvil);
    CHECK(rig.policy_rules_everywhere(OriginKind::LocalPT) == 0);
}

TEST_CASE("receive_pt: replacement, revocation, and sequence tracking") {
    Rig rig;
    REQUIRE(rig.ctrl.receive_pt(rig.signed_pt({mk(10, Decision::deny(), dst(kDp))},
                                              1))
                .accepted);
    // Same sequence replayed: stale.
    CHECK(rig.ctrl.receive_pt(rig.signed_pt({mk(10, Decision::deny(), dst(kDp))}, 1))
              .reason == "StaleSequence");
    // Fresh sequence replaces the old rules instead of stacking.
    REQUIRE(rig.ctrl
                .receive_pt(rig.signed_pt(
                    {mk(10, Decision::rate_limit(5, 10), dst(kDp))}, 2))
                .accepted);
    CHECK(rig.policy_rules_everywhere(OriginKind::LocalPT) == 2);

    auto revoked = rig.ctrl.revoke_pt("dbms");
    CHECK(revoked.found);
    CHECK(revoked.rules_removed == 2);
    CHECK(rig.policy_rules_everywhere(OriginKind::LocalPT) == 0);
    CHECK_FALSE(rig.ctrl.revoke_pt("dbms").found);
}

TEST_CASE("receive_pt: flood beyond the token bucket is rejected without oracle work") {
    ControllerConfig cfg;
    cfg.bucket_capacity = 4;
    cfg.bucket_refill_rate = 1;
    Rig rig(cfg);

    int rate_limited = 0;
    for (std::uint64_t i = 1; i <= 7; ++i) {
        auto report = rig.ctrl.receive_pt(
            rig.signed_pt({mk(10, Decision::deny(), dst(kDp))}, i));
        if (report.reason == "RateLimited") ++rate_limited;
    }
    CHECK(rate_limited == 3);  // capacity 4, burst 7
    CHECK(rig.ctrl.stats().oracle_validations == 4);

    // Refill lets later transfers through again.
    rig.ctrl.advance_to(5);
    CHECK(rig.ctrl.receive_pt(rig.signed_pt({mk(10, Decision::deny(), dst(kDp))}, 9))
              .accepted);
}

TEST_CASE("receive_rpt: placement honours the edge-only strategy") {
    Rig rig;
    auto report = rig.ctrl.receive_rpt(
        rig.signed_rpt({mk(10, Decision::deny(), dst(Ipv4{10, 3, 0, 10}))}));
    REQUIRE(report.accepted);
    // s1 is the only edge switch.
    CHECK(report.rules_installed == 1);
    auto* edge = rig.ctrl.switch_state("s1");
    auto* inner = rig.ctrl.switch_state("s2");
    CHECK(edge->pipeline.table(edge->pipeline.last_table_index()).rules.size() == 1);
    CHECK(inner->pipeline.table(inner->pipeline.last_table_index()).rules.empty());
}

TEST_CASE("receive_rpt: rejection paths") {
    Rig rig;
    SUBCASE("wrong signing key") {
        auto rpt = rig.signed_rpt({mk(10, Decision::deny(), dst(Ipv4{10, 3, 0, 10}))});
        rpt.sign_with(*rig.scheme, rig.scheme->derive_keypair(999));
        CHECK(rig.ctrl.receive_rpt(rpt).reason == "BadSignature");
    }
    SUBCASE("unknown origin domain") {
        auto rpt = rig.signed_rpt({mk(10, Decision::deny(), dst(Ipv4{10, 3, 0, 10}))});
        rpt.origin_domain_id = "C";
        rpt.sign_with(*rig.scheme, rig.peer_keys);
        CHECK(rig.ctrl.receive_rpt(rpt).reason == "UnknownPeer");
    }
    SUBCASE("scoping a third party's address") {
        auto rpt = rig.signed_rpt({mk(10, Decision::deny(), dst(kDp))});
        rpt.subscriber_service_address = ServiceAddress{kDp, {}};
        rpt.sign_with(*rig.scheme, rig.peer_keys);
        auto report = rig.ctrl.receive_rpt(rpt);
        CHECK(report.reason.substr(0, 14) == "ScopeViolation");
    }
    SUBCASE("unregistered remote subscriber") {
        auto rpt = rig.signed_rpt({mk(10, Decision::deny(), dst(Ipv4{10, 3, 0, 10}))});
        rpt.subscriber_id = "ghost";
        rpt.sign_with(*rig.scheme, rig.peer_keys);
        CHECK(rig.ctrl.receive_rpt(rpt).reason == "UnknownSubscriber");
    }
    CHECK(rig.policy_rules_everywhere(OriginKind::RemoteRPT) == 0);
}

TEST_CASE("revoke_rpt counts rules across switches") {
    ControllerConfig cfg;
    cfg.rpt_placement = Placement::AllSwitches;
    Rig rig(cfg);
    REQUIRE(rig.ctrl
                .receive_rpt(rig.signed_rpt(
                    {mk(10, Decision::deny(), dst(Ipv4{10, 3, 0, 10}))}))
                .accepted);
    auto revoked = rig.ctrl.revoke_rpt("B", "db_b");
    CHECK(revoked.found);
    CHECK(revoked.rules_removed == 2);  // 1 rule x 2 switches
    CHECK_FALSE(rig.ctrl.revoke_rpt("B", "db_b").found);
}

TEST_CASE("on_local_policy_change: violating transfers are evicted with witnesses") {
    Rig rig;
    REQUIRE(rig.ctrl.receive_pt(rig.signed_pt({mk(10, Decision::deny(), dst(kDp))}))
                .accepted);

    SUBCASE("no-op change evicts nothing") {
        auto report = rig.ctrl.on_local_policy_change({mk(1, Decision::allow())});
        CHECK(report.evicted.empty());
        CHECK(rig.policy_rules_everywhere(OriginKind::LocalPT) == 2);
    }
    SUBCASE("tightening the local set against the transfer evicts it") {
        // The service traffic becomes explicitly denied locally at a lower
        // priority than the accepted rate-limiting PT, which would now
        // un-deny some packets.
        REQUIRE(rig.ctrl
                    .receive_pt(rig.signed_pt(
                        {mk(10, Decision::rate_limit(3, 5), dst(kDp))}, 2))
                    .accepted);
        auto report = rig.ctrl.on_local_policy_change(
            {mk(5, Decision::deny(), dst(kDp)), mk(1, Decision::allow())});
        REQUIRE(report.evicted.size() == 1);
        CHECK(report.evicted[0].origin == "LocalPT(dbms)");
        CHECK(decide(rig.ctrl.local_policies(), report.evicted[0].witness)
                  .is_deny());
        CHECK(rig.policy_rules_everywhere(OriginKind::LocalPT) == 0);
        CHECK(rig.ctrl.accepted_pts().empty());
    }
}

TEST_CASE("repository and pipelines stay coherent through a random op mix") {
    Rig rig;
    std::mt19937_64 rng(3);
    for (int step = 0; step < 120; ++step) {
        const auto seq = static_cast<std::uint64_t>(step + 2);
        switch (rng() % 5) {
            case 0:
                rig.ctrl.receive_pt(rig.signed_pt(
                    {mk(10, Decision::deny(), dst(kDp))}, seq));
                break;
            case 1:
                rig.ctrl.receive_rpt(rig.signed_rpt(
                    {mk(5, Decision::deny(), dst(Ipv4{10, 3, 0, 10}))}, seq));
                break;
            case 2: rig.ctrl.revoke_pt("dbms"); break;
            case 3: rig.ctrl.revoke_rpt("B", "db_b"); break;
            default:
                rig.ctrl.handle_packet_in(
                    "s1", 2, flow(kH1, kDp, static_cast<std::uint16_t>(1000 + step)));
        }
        rig.ctrl.advance_to(static_cast<Tick>(step));

        // Accepted transfers and installed policy rules must match exactly.
        const std::size_t expected_pt =
            rig.ctrl.accepted_pts().size() * 2;  // 1 rule, both switches
        const std::size_t expected_rpt =
            rig.ctrl.accepted_rpts().size();  // 1 rule, edge only
        CHECK(rig.policy_rules_everywhere(OriginKind::LocalPT) == expected_pt);
        CHECK(rig.policy_rules_everywhere(OriginKind::RemoteRPT) == expected_rpt);
        for (auto& [id, st] : rig.ctrl.switches_mut())
            CHECK_FALSE(st.pipeline.check_invariants().has_value());
    }
}

TEST_CASE("pin_port: spoofed sources are dropped and the geo table is protected") {
    Rig rig;
    REQUIRE(rig.ctrl.handle_packet_in("s1", 2, flow(kH1, kDp)).ok);
    REQUIRE(rig.ctrl.pin_port(kH1, "s1", 2).ok);

    auto* st = rig.ctrl.switch_state("s1");

    // Legitimate traffic from the pinned port flows on.
    auto legit = flow(kH1, kDp);
    legit.in_port = 2;
    CHECK(st->pipeline.process(legit, 1).kind == PipelineVerdict::Kind::Forward);

    // Same source address from any other port dies in table 0 -> no
    // packet_in -> no geo update.
    auto spoof = flow(kH1, kDp, 555);
    spoof.in_port = 4;
    CHECK(st->pipeline.process(spoof, 1).kind == PipelineVerdict::Kind::Drop);
    CHECK(rig.ctrl.geo().attachment(kH1)->port_id == 2);

    // And a foreign source on the pinned port is refused too.
    auto squatter = flow(kH2, kDp, 556);
    squatter.in_port = 2;
    CHECK(st->pipeline.process(squatter, 1).kind == PipelineVerdict::Kind::Drop);
}

TEST_CASE("pin_port: requires a matching attachment") {
    Rig rig;
    CHECK(rig.ctrl.pin_port(kH1, "s1", 2).error == "NotAttached");
    REQUIRE(rig.ctrl.handle_packet_in("s1", 2, flow(kH1, kDp)).ok);
    CHECK(rig.ctrl.pin_port(kH1, "s1", 3).error == "NotAttached");
    CHECK(rig.ctrl.pin_port(kH1, "nope", 2).error == "UnknownSwitch");
}

TEST_CASE("controller tickets ride on the controller clock and keys") {
    Rig rig;
    REQUIRE(rig.ctrl.handle_packet_in("s1", 2, flow(kH1, kDp)).ok);
    rig.ctrl.advance_to(100);
    auto host_keys = rig.scheme->derive_keypair(stable_hash64("host-h1"));
    auto ltr = LocationTicketRequest::make_signed(*rig.scheme, host_keys, kH1, 95);
    auto issued = rig.ctrl.issue_ticket(ltr, kH1);
    REQUIRE(issued.ok);
    CHECK(issued.ticket.zone_id == "Z1");
    CHECK(issued.ticket.issuer_domain_id == "A");
    CHECK(verify_location_ticket(*rig.scheme, rig.ctrl_keys.public_key,
                                 issued.ticket, 120, 50, kH1,
                                 host_keys.public_key)
              .ok);
}
