#include <doctest.h>

#include <random>

#include "peps/validate.hpp"
#include "support/oracle.hpp"

using namespace peps;

namespace {

const Ipv4 kDp{10, 2, 0, 10};
// The subscriber owns every port of its address here; port-scoped
// subscribers are covered by their own test below.
const ServiceAddress kDpAddr{kDp, {}};

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

MatchFields dst_port(Ipv4 ip, std::uint16_t port) {
    MatchFields m;
    m.dst_ip = Cidr{ip, 32};
    m.dst_port = port;
    return m;
}

PolicyTransfer make_pt(std::vector<Policy> policies, std::uint64_t seq = 1) {
    PolicyTransfer pt;
    pt.subscriber_id = "dbms";
    pt.policies = std::move(policies);
    pt.sequence_number = seq;
    return pt;
}

RemotePolicyTransfer make_rpt(std::vector<Policy> policies, std::uint64_t seq = 1) {
    RemotePolicyTransfer rpt;
    rpt.origin_domain_id = "B";
    rpt.subscriber_id = "dbms";
    rpt.subscriber_service_address = kDpAddr;
    rpt.policies = std::move(policies);
    rpt.sequence_number = seq;
    return rpt;
}

}  // namespace

TEST_CASE("validate_pt: the empty transfer is the identity and is accepted") {
    const auto u = oracle::small_universe();
    std::vector<Policy> local = {mk(1, Decision::allow())};
    auto res = validate_pt(local, make_pt({}), kDpAddr, "", 0, nullptr, u);
    CHECK(res.ok());
}

TEST_CASE("validate_pt: restricting traffic to one's own service is accepted") {
    const auto u = oracle::small_universe();
    std::vector<Policy> local = {mk(1, Decision::allow())};
    auto pt = make_pt({mk(10, Decision::deny(), dst(kDp))});
    auto res = validate_pt(local, pt, kDpAddr, "", 0, nullptr, u);
    CHECK(res.ok());

    // The reference enumeration agrees there is nothing to witness: only
    // subscriber-bound packets changed, and only Allow -> Deny.
    CHECK(oracle::ref_all_violations(local, pt.policies, kDpAddr, u).empty());
}

TEST_CASE("validate_pt: flipping an explicit local deny is caught with a witness") {
    const auto u = oracle::small_universe();
    MatchFields bad_src;
    bad_src.src_ip = Ipv4{10, 0, 0, 9};
    std::vector<Policy> local = {mk(50, Decision::deny(), bad_src),
                                 mk(1, Decision::allow())};

    MatchFields exemption;
    exemption.src_ip = Ipv4{10, 0, 0, 9};
    exemption.dst_ip = Cidr{kDp, 32};
    auto pt = make_pt({mk(99, Decision::allow(), exemption)});

    auto res = validate_pt(local, pt, kDpAddr, "", 0, nullptr, u);
    REQUIRE(res.code == ValidationCode::Violation);
    REQUIRE(res.witness.has_value());
    CHECK(res.witness->src_ip == Ipv4{10, 0, 0, 9});

    // Witness replays through decide() as a real flip.
    std::vector<Policy> composed = local;
    composed.insert(composed.end(), pt.policies.begin(), pt.policies.end());
    CHECK(decide(local, *res.witness).is_deny());
    CHECK_FALSE(decide(composed, *res.witness).is_deny());
}

TEST_CASE("validate_pt: touching a foreign destination is a violation") {
    const auto u = oracle::small_universe();
    std::vector<Policy> local = {mk(1, Decision::allow())};
    auto pt = make_pt({mk(10, Decision::deny(), dst(Ipv4{10, 0, 0, 2}))});
    auto res = validate_pt(local, pt, kDpAddr, "", 0, nullptr, u);
    REQUIRE(res.code == ValidationCode::Violation);
    REQUIRE(res.witness.has_value());
    CHECK(res.witness->dst_ip == Ipv4{10, 0, 0, 2});
}

TEST_CASE("validate_pt: rate-limiting one's own inbound traffic is a restriction") {
    const auto u = oracle::small_universe();
    std::vector<Policy> local = {mk(1, Decision::allow())};
    auto pt = make_pt({mk(10, Decision::rate_limit(10, 5), dst_port(kDp, 3306))});
    CHECK(validate_pt(local, pt, kDpAddr, "", 0, nullptr, u).ok());
}

TEST_CASE("validate_pt: a port-scoped subscriber owns only its own ports") {
    // Two services can share a host IP on disjoint ports; a transfer from
    // one must not reach the other's traffic.
    const auto u = oracle::small_universe();
    const ServiceAddress scoped{kDp, {3306}};
    std::vector<Policy> local = {mk(1, Decision::allow())};

    auto overreach = make_pt({mk(10, Decision::deny(), dst(kDp))});
    auto res = validate_pt(local, overreach, scoped, "", 0, nullptr, u);
    REQUIRE(res.code == ValidationCode::Violation);
    REQUIRE(res.witness.has_value());
    CHECK(res.witness->dst_ip == kDp);
    CHECK(res.witness->dst_port != 3306);

    auto in_scope = make_pt({mk(10, Decision::deny(), dst_port(kDp, 3306))});
    CHECK(validate_pt(local, in_scope, scoped, "", 0, nullptr, u).ok());
}

TEST_CASE("validate_pt: a transfer cannot lift the default deny elsewhere") {
    const auto u = oracle::small_universe();
    std::vector<Policy> local = {mk(5, Decision::allow(), dst(kDp))};
    // Everything not destined to the service is default-denied locally; an
    // allow for another host must be rejected even though no explicit local
    // policy mentions it.
    auto pt = make_pt({mk(10, Decision::allow(), dst(Ipv4{10, 0, 0, 1}))});
    auto res = validate_pt(local, pt, kDpAddr, "", 0, nullptr, u);
    CHECK(res.code == ValidationCode::Violation);
}

TEST_CASE("validate_pt agrees with the exhaustive reference on random pairs") {
    std::mt19937_64 rng(5);
    const auto u = oracle::small_universe();
    int accepted = 0, rejected = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const auto local = oracle::random_policy_set(rng, u, 4);
        std::vector<Policy> transfer;
        if (rng() % 2) {
            // Restriction-shaped transfers keep the accept path exercised.
            transfer.push_back(mk(static_cast<std::int32_t>(rng() % 50),
                                  rng() % 2 ? Decision::deny()
                                            : Decision::rate_limit(2, 5),
                                  dst_port(kDp, 3306)));
        } else {
            transfer = oracle::random_policy_set(rng, u, 3);
        }
        const auto pt = make_pt(transfer);
        const auto mine = validate_pt(local, pt, kDpAddr, "", 0, nullptr, u);
        const auto witnesses =
            oracle::ref_all_violations(local, transfer, kDpAddr, u);
        CHECK(mine.ok() == witnesses.empty());
        if (mine.ok())
            ++accepted;
        else
            ++rejected;
    }
    // The generator must exercise both paths for the comparison to mean much.
    CHECK(accepted > 10);
    CHECK(rejected > 10);
}

TEST_CASE("validate_rpt: a deny scoped to the subscriber is accepted") {
    const auto u = oracle::small_universe();
    std::vector<Policy> local = {mk(1, Decision::allow())};
    auto rpt = make_rpt({mk(10, Decision::deny(), dst(kDp))});
    CHECK(validate_rpt(local, rpt, kDpAddr, "", 0, nullptr, u).ok());
}

TEST_CASE("validate_rpt: policy reaching a third host is a scope violation") {
    const auto u = oracle::small_universe();
    std::vector<Policy> local = {mk(1, Decision::allow())};
    auto rpt = make_rpt({mk(10, Decision::deny(), dst(kDp)),
                         mk(9, Decision::deny(), dst(Ipv4{10, 0, 0, 1}))});
    auto res = validate_rpt(local, rpt, kDpAddr, "", 0, nullptr, u);
    REQUIRE(res.code == ValidationCode::ScopeViolation);
    CHECK(res.policy_index == 1);
}

TEST_CASE("validate_rpt: wildcard destination cannot be scoped") {
    const auto u = oracle::small_universe();
    std::vector<Policy> local = {mk(1, Decision::allow())};
    auto rpt = make_rpt({mk(10, Decision::deny())});
    CHECK(validate_rpt(local, rpt, kDpAddr, "", 0, nullptr, u).code ==
          ValidationCode::ScopeViolation);
}

TEST_CASE("validate_rpt: claimed scope must match the registered address") {
    const auto u = oracle::small_universe();
    std::vector<Policy> local = {mk(1, Decision::allow())};
    auto rpt = make_rpt({mk(10, Decision::deny(), dst(Ipv4{10, 0, 0, 1}))});
    rpt.subscriber_service_address = ServiceAddress{Ipv4{10, 0, 0, 1}, {80}};
    auto res = validate_rpt(local, rpt, kDpAddr, "", 0, nullptr, u);
    CHECK(res.code == ValidationCode::ScopeViolation);
}

TEST_CASE("validate_rpt: replayed sequence numbers are stale") {
    const auto u = oracle::small_universe();
    std::vector<Policy> local = {mk(1, Decision::allow())};
    auto rpt = make_rpt({mk(10, Decision::deny(), dst(kDp))}, 4);
    CHECK(validate_rpt(local, rpt, kDpAddr, "", 4, nullptr, u).code ==
          ValidationCode::StaleSequence);
    CHECK(validate_rpt(local, rpt, kDpAddr, "", 3, nullptr, u).ok());
}

TEST_CASE("signature checks run when a scheme is supplied") {
    const auto u = oracle::small_universe();
    auto scheme = make_default_scheme();
    const auto keys = scheme->derive_keypair(42);
    std::vector<Policy> local = {mk(1, Decision::allow())};

    auto pt = make_pt({mk(10, Decision::deny(), dst(kDp))});
    pt.sign_with(*scheme, keys);
    CHECK(validate_pt(local, pt, kDpAddr, keys.public_key, 0, scheme.get(), u).ok());

    // Envelope altered after signing.
    auto tampered = pt;
    tampered.policies[0].priority += 1;
    CHECK(validate_pt(local, tampered, kDpAddr, keys.public_key, 0, scheme.get(), u)
              .code == ValidationCode::BadSignature);

    // Signed by the wrong key.
    const auto other = scheme->derive_keypair(43);
    auto wrong = pt;
    wrong.sign_with(*scheme, other);
    CHECK(validate_pt(local, wrong, kDpAddr, keys.public_key, 0, scheme.get(), u)
              .code == ValidationCode::BadSignature);
}

TEST_CASE("compiled set mirrors every accepted transfer") {
    ComposedPolicySet set;
    set.local = {mk(1, Decision::allow())};
    set.accepted_pt.emplace_back("dbms", std::vector<Policy>{
                                             mk(10, Decision::deny(), dst(kDp))});
    set.accepted_rpt.emplace_back(
        std::make_pair(std::string("B"), std::string("rdb")),
        std::vector<Policy>{mk(5, Decision::rate_limit(4, 8),
                               dst(Ipv4{10, 0, 0, 9}))});

    auto compiled = compile_to_rules(set, 2);
    REQUIRE(compiled.ok);
    REQUIRE(compiled.rules.size() == 2);
    CHECK(compiled.rules[0].origin == RuleOrigin::local_pt("dbms"));
    CHECK(compiled.rules[0].action.kind == ActionKind::Drop);
    CHECK(compiled.rules[1].origin == RuleOrigin::remote_rpt("B", "rdb"));
    CHECK(compiled.rules[1].action.kind == ActionKind::RateLimit);
    for (const auto& r : compiled.rules) CHECK(r.table_index == 2);
}

TEST_CASE("monotonic restriction: an accepted transfer never un-drops a packet") {
    std::mt19937_64 rng(61);
    const auto u = oracle::small_universe();
    int accepted_trials = 0;
    while (accepted_trials < 60) {
        const auto local = oracle::random_policy_set(rng, u, 4);
        std::vector<Policy> transfer{
            mk(static_cast<std::int32_t>(rng() % 50),
               rng() % 2 ? Decision::deny() : Decision::rate_limit(2, 6),
               dst(kDp))};
        if (rng() % 2) transfer[0].match.src_ip = u.hosts()[rng() % 4];
        if (find_composition_violation(local, transfer, kDpAddr, u)) continue;
        ++accepted_trials;

        // Realize the local policies in the local tables and compare the
        // pipeline with and without the compiled transfer installed.
        FlowTablePipeline without(2);
        for (const auto& p : local) {
            FlowRule r;
            r.match = p.match;
            r.priority = static_cast<std::uint16_t>(100 + p.priority);
            r.table_index = 0;
            r.action = p.decision.is_allow()
                           ? RuleAction::forward(1)
                           : (p.decision.is_deny()
                                  ? RuleAction::drop()
                                  : RuleAction::rate_limit(
                                        p.decision.max_new_flows,
                                        p.decision.window_ticks));
            REQUIRE(without.install(r).ok);
        }
        FlowTablePipeline with = without;
        for (const auto& rule :
             compile_transfer(transfer, RuleOrigin::local_pt("dbms"), 1).rules)
            REQUIRE(with.install(rule).ok);

        u.scan([&](const PacketHeader& pkt) {
            auto before = without.process(pkt, 0);
            auto after = with.process(pkt, 0);
            if (before.is_drop())
                CHECK(after.kind != PipelineVerdict::Kind::Forward);
            return true;
        });
    }
}

TEST_CASE("scope soundness: remote rules never match foreign destinations") {
    std::mt19937_64 rng(62);
    const auto u = oracle::small_universe();
    const ServiceAddress scoped{Ipv4{10, 0, 0, 9}, {}};
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Policy> policies;
        const std::size_t len = 1 + rng() % 3;
        for (std::size_t i = 0; i < len; ++i) {
            auto p = oracle::random_policy(rng, u);
            p.match.dst_ip = Cidr{scoped.ip, 32};
            policies.push_back(std::move(p));
        }
        auto rpt = make_rpt(policies);
        rpt.subscriber_service_address = scoped;
        REQUIRE(validate_rpt({}, rpt, scoped, "", 0, nullptr, u).code !=
                ValidationCode::ScopeViolation);

        auto compiled = compile_transfer(
            policies, RuleOrigin::remote_rpt("B", "dbms"), 1);
        REQUIRE(compiled.ok);
        u.scan([&](const PacketHeader& pkt) {
            if (pkt.dst_ip == scoped.ip) return true;
            for (const auto& rule : compiled.rules)
                CHECK_FALSE(rule.match.matches(pkt));
            return true;
        });
    }
}

TEST_CASE("universe refuses to enumerate past its cap") {
    std::vector<Ipv4> hosts(40, Ipv4{10, 0, 0, 1});
    std::vector<std::uint16_t> ports(40, 80);
    CHECK_THROWS_AS(HeaderUniverse(hosts, ports, {Protocol::Tcp, Protocol::Udp}),
                    std::invalid_argument);
    CHECK_NOTHROW(HeaderUniverse(hosts, ports, {Protocol::Tcp, Protocol::Udp},
                                 6'000'000));
}

TEST_CASE("transfer envelopes round-trip through their text form") {
    auto scheme = make_default_scheme();
    const auto keys = scheme->derive_keypair(7);

    auto pt = make_pt({mk(10, Decision::deny(), dst(kDp)),
                       mk(4, Decision::rate_limit(5, 20), dst_port(kDp, 3306))},
                      12);
    pt.sign_with(*scheme, keys);
    auto pt2 = PolicyTransfer::parse(pt.serialize());
    REQUIRE(pt2.has_value());
    CHECK(pt2->subscriber_id == pt.subscriber_id);
    CHECK(pt2->sequence_number == 12);
    CHECK(pt2->policies == pt.policies);
    CHECK(pt2->signature_hex == pt.signature_hex);
    CHECK(pt2->serialize() == pt.serialize());

    auto rpt = make_rpt({mk(10, Decision::deny(), dst(kDp))}, 3);
    rpt.sign_with(*scheme, keys);
    auto rpt2 = RemotePolicyTransfer::parse(rpt.serialize());
    REQUIRE(rpt2.has_value());
    CHECK(rpt2->origin_domain_id == "B");
    CHECK(rpt2->subscriber_service_address == kDpAddr);
    CHECK(rpt2->serialize() == rpt.serialize());

    CHECK_FALSE(PolicyTransfer::parse("SUBSCRIBER x\n").has_value());
    CHECK_FALSE(RemotePolicyTransfer::parse(pt.serialize()).has_value());
}
