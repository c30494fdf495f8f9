#include <doctest.h>

#include "peps/session.hpp"

using namespace peps;

namespace {

const Ipv4 kDp{10, 2, 0, 10};
const Ipv4 kH1{10, 0, 0, 1};
const Ipv4 kH2{10, 0, 0, 2};

Policy allow_all() {
    Policy p;
    p.priority = 1;
    p.decision = Decision::allow();
    return p;
}

PacketHeader flow(Ipv4 src, Ipv4 dst, std::uint16_t sport = 40000) {
    PacketHeader pkt;
    pkt.src_ip = src;
    pkt.dst_ip = dst;
    pkt.src_port = sport;
    pkt.dst_port = 3306;
    pkt.protocol = Protocol::Tcp;
    return pkt;
}

/// Two domains: A hosts the requestors (h1 in Z1, h2 in Z2), B hosts the
/// data provider service "dbms".
struct TwoDomains {
    std::shared_ptr<SignatureScheme> scheme = make_default_scheme();
    Controller a{"A", scheme, scheme->derive_keypair(stable_hash64("ctrl-A"))};
    Controller b{"B", scheme, scheme->derive_keypair(stable_hash64("ctrl-B"))};
    InterdomainFabric fabric{scheme};
    Tick now = 0;

    TwoDomains() {
        for (Controller* c : {&a, &b}) {
            c->set_universe(HeaderUniverse{
                {kH1, kH2, kDp}, {3306, 40000, 40001}, {Protocol::Tcp}});
            c->set_local_policies({allow_all()});
            c->set_route_fn([](const SwitchId&, Ipv4) {
                return std::optional<std::uint16_t>{1};
            });
        }
        a.add_switch("a1", true);
        b.add_switch("b1", true);
        a.geo().define_zone({"Z1", "Location 1", SecurityClass::Secure});
        a.geo().define_zone({"Z2", "Location 2", SecurityClass::NonSecure});
        a.geo().map_port("a1", 2, "Z1");
        a.geo().map_port("a1", 3, "Z2");

        b.register_subscriber(Subscriber{"dbms", ServiceAddress{kDp, {}},
                                         scheme->derive_keypair(5).public_key,
                                         Subscriber::Kind::LocalApp, ""});
        a.register_subscriber(Subscriber{"dbms", ServiceAddress{kDp, {}}, "",
                                         Subscriber::Kind::RemoteDomainApp, "B"});

        fabric.register_controller(&a);
        fabric.register_controller(&b);
        a.set_on_host_located([this](Ipv4 host, const LocationZone&, bool) {
            fabric.on_host_located("A", host, now);
        });
    }

    void step(int ticks = 1) {
        for (int i = 0; i < ticks; ++i) {
            ++now;
            a.advance_to(now);
            b.advance_to(now);
            fabric.pump(now);
        }
    }

    RemotePolicyTransfer b_rpt(std::vector<Policy> policies, std::uint64_t seq) {
        RemotePolicyTransfer rpt;
        rpt.origin_domain_id = "B";
        rpt.subscriber_id = "dbms";
        rpt.subscriber_service_address = ServiceAddress{kDp, {}};
        rpt.policies = std::move(policies);
        rpt.sequence_number = seq;
        rpt.sign_with(*scheme, b.keys());
        return rpt;
    }
};

Policy deny_to_dp() {
    Policy p;
    p.priority = 5;
    p.decision = Decision::deny();
    p.match.dst_ip = Cidr{kDp, 32};
    return p;
}

}  // namespace

TEST_CASE("connect: cross-registers keys, is idempotent, checks prerequisites") {
    TwoDomains rig;
    auto first = rig.fabric.connect("A", "B");
    REQUIRE(first.ok);
    CHECK(rig.a.has_peer_key("B"));
    CHECK(rig.b.has_peer_key("A"));

    auto again = rig.fabric.connect("B", "A");
    REQUIRE(again.ok);
    CHECK(again.channel == first.channel);

    CHECK_FALSE(rig.fabric.connect("A", "C").ok);

    Controller keyless{"K", rig.scheme, KeyPair{}};
    rig.fabric.register_controller(&keyless);
    CHECK(rig.fabric.connect("A", "K").error == "MissingPeerKey");
}

TEST_CASE("send_rpt: end-to-end delivery produces an accept report") {
    TwoDomains rig;
    REQUIRE(rig.fabric.connect("A", "B").ok);

    auto receipt = rig.fabric.send_rpt("B", "A", rig.b_rpt({deny_to_dp()}, 1),
                                       rig.now);
    REQUIRE(receipt.ok);
    rig.step();

    REQUIRE(rig.a.report_log().size() == 1);
    CHECK(rig.a.report_log().back().substr(0, 6) == "ACCEPT");
    CHECK(rig.a.accepted_rpts().size() == 1);
    // The edge switch now drops traffic toward the provider.
    auto* sw = rig.a.switch_state("a1");
    rig.a.handle_packet_in("a1", 2, flow(kH1, kDp));
    CHECK(sw->pipeline.process(flow(kH1, kDp), rig.now).kind ==
          PipelineVerdict::Kind::Drop);
}

TEST_CASE("send_rpt: tampered envelopes never mutate receiver state") {
    TwoDomains rig;
    REQUIRE(rig.fabric.connect("A", "B").ok);
    rig.fabric.channel_between("A", "B")->tamper_next("B");

    REQUIRE(rig.fabric.send_rpt("B", "A", rig.b_rpt({deny_to_dp()}, 1), rig.now).ok);
    rig.step();

    CHECK(rig.fabric.stats().envelopes_bad_signature == 1);
    CHECK(rig.a.accepted_rpts().empty());
    CHECK(rig.a.report_log().empty());
}

TEST_CASE("send_rpt: channel failures surface as errors") {
    TwoDomains rig;
    CHECK(rig.fabric.send_rpt("B", "A", rig.b_rpt({deny_to_dp()}, 1), rig.now)
              .error == "MissingChannel");
    REQUIRE(rig.fabric.connect("A", "B").ok);
    rig.fabric.channel_between("A", "B")->teardown();
    CHECK(rig.fabric.send_rpt("B", "A", rig.b_rpt({deny_to_dp()}, 1), rig.now)
              .error == "ChannelDown");
}

TEST_CASE("lbac session: located host is exempt, everyone else is dropped") {
    TwoDomains rig;
    REQUIRE(rig.fabric.connect("A", "B").ok);

    // h1 gets located in Z1 before the session opens.
    rig.a.handle_packet_in("a1", 2, flow(kH1, kDp, 41000));

    auto opened = rig.fabric.open_session("B", "A", "dbms", {"Z1"}, rig.now);
    REQUIRE(opened.ok);
    // Binding report travels A->B, session RPT travels B->A.
    rig.step(2);

    const auto* session = rig.fabric.session(opened.session_id);
    REQUIRE(session != nullptr);
    CHECK(session->state == SessionState::Active);
    REQUIRE(session->bindings.contains(kH1));
    CHECK(session->bindings.at(kH1) == "Z1");

    auto* sw = rig.a.switch_state("a1");
    rig.a.handle_packet_in("a1", 2, flow(kH1, kDp));
    CHECK(sw->pipeline.process(flow(kH1, kDp), rig.now).kind ==
          PipelineVerdict::Kind::Forward);
    rig.a.handle_packet_in("a1", 3, flow(kH2, kDp));
    CHECK(sw->pipeline.process(flow(kH2, kDp), rig.now).kind ==
          PipelineVerdict::Kind::Drop);
}

TEST_CASE("lbac session: opens deny-all when nothing is located yet") {
    TwoDomains rig;
    REQUIRE(rig.fabric.connect("A", "B").ok);
    auto opened = rig.fabric.open_session("B", "A", "dbms", {"Z1"}, rig.now);
    REQUIRE(opened.ok);
    rig.step(2);

    CHECK(rig.fabric.session(opened.session_id)->state == SessionState::Active);
    CHECK(rig.fabric.session(opened.session_id)->bindings.empty());
    auto* sw = rig.a.switch_state("a1");
    rig.a.handle_packet_in("a1", 2, flow(kH1, kDp));
    CHECK(sw->pipeline.process(flow(kH1, kDp), rig.now).kind ==
          PipelineVerdict::Kind::Drop);
}

TEST_CASE("lbac session: moving to a disallowed zone revokes the exemption") {
    TwoDomains rig;
    REQUIRE(rig.fabric.connect("A", "B").ok);
    rig.a.handle_packet_in("a1", 2, flow(kH1, kDp, 41000));
    auto opened = rig.fabric.open_session("B", "A", "dbms", {"Z1"}, rig.now);
    REQUIRE(opened.ok);
    rig.step(2);
    REQUIRE(rig.fabric.session(opened.session_id)->bindings.contains(kH1));

    // h1 shows up on the Z2 port; the geo change triggers a binding report
    // and a replacement RPT.
    rig.a.handle_packet_in("a1", 3, flow(kH1, kDp, 41001));
    rig.step(2);

    CHECK_FALSE(rig.fabric.session(opened.session_id)->bindings.contains(kH1));
    CHECK(rig.a.handle_packet_in("a1", 3, flow(kH1, kDp, 42000)).verdict.kind ==
          PipelineVerdict::Kind::Drop);
}

TEST_CASE("lbac session: open fails cleanly without prerequisites") {
    TwoDomains rig;
    CHECK(rig.fabric.open_session("B", "A", "dbms", {"Z1"}, 0).error ==
          "MissingChannel");
    REQUIRE(rig.fabric.connect("A", "B").ok);
    CHECK(rig.fabric.open_session("B", "A", "ghost", {"Z1"}, 0).error ==
          "UnknownSubscriber");
    CHECK(rig.fabric.open_session("A", "B", "dbms", {"Z1"}, 0).error ==
          "UnknownSubscriber");
}

TEST_CASE("teardown: removes the session rules, twice is a no-op") {
    TwoDomains rig;
    REQUIRE(rig.fabric.connect("A", "B").ok);
    auto opened = rig.fabric.open_session("B", "A", "dbms", {"Z1"}, rig.now);
    rig.step(2);
    REQUIRE(rig.fabric.session(opened.session_id)->state == SessionState::Active);
    REQUIRE(rig.a.accepted_rpts().size() == 1);

    rig.fabric.teardown_session(opened.session_id, rig.now);
    CHECK(rig.fabric.session(opened.session_id)->state == SessionState::TornDown);
    CHECK(rig.a.accepted_rpts().empty());
    std::size_t last_table_rules = 0;
    for (auto& [id, st] : rig.a.switches_mut())
        last_table_rules +=
            st.pipeline.table(st.pipeline.last_table_index()).rules.size();
    CHECK(last_table_rules == 0);

    rig.fabric.teardown_session(opened.session_id, rig.now);  // idempotent
    CHECK(rig.fabric.session(opened.session_id)->state == SessionState::TornDown);

    // A torn-down session ignores further location changes.
    rig.a.handle_packet_in("a1", 2, flow(kH1, kDp, 43000));
    rig.step(2);
    CHECK(rig.a.accepted_rpts().empty());
}

TEST_CASE("teardown before activation is a no-op") {
    TwoDomains rig;
    REQUIRE(rig.fabric.connect("A", "B").ok);
    auto opened = rig.fabric.open_session("B", "A", "dbms", {"Z1"}, rig.now);
    rig.fabric.teardown_session(opened.session_id, rig.now);
    CHECK(rig.fabric.session(opened.session_id)->state == SessionState::TornDown);
    rig.step(3);
    CHECK(rig.a.accepted_rpts().empty());
}

TEST_CASE("envelope text round trip") {
    EwEnvelope env;
    env.from_domain = "A";
    env.to_domain = "B";
    env.seq = 9;
    env.type = EwEnvelope::Type::Binding;
    env.payload = "SESSION lbac-1 BINDINGS 10.0.0.1:Z1,10.0.0.2:Z2\nsecond line";
    env.signature_hex = "feed";

    auto parsed = EwEnvelope::parse(env.line());
    REQUIRE(parsed.has_value());
    CHECK(parsed->payload == env.payload);
    CHECK(parsed->line() == env.line());
    CHECK(parsed->seq == 9);

    CHECK_FALSE(EwEnvelope::parse("EW A B SEQ x TYPE RPT p SIG s").has_value());
    CHECK_FALSE(EwEnvelope::parse("EW A B SEQ 1 TYPE NOPE p SIG s").has_value());
}
