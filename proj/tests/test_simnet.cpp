#include <doctest.h>

#include <fstream>
#include <sstream>

#include "peps/bench.hpp"
#include "peps/world.hpp"

using namespace peps;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Domain A (hA on a1, hB on a1) -- a2 -- inter-domain -- B (dp1 on b1).
const char* kTwoDomainText = R"(
[topology]
domain A
domain B
switch A:a1
switch A:a2
switch B:b1
host hA 10.0.0.1 A:a1:1
host hB 10.0.0.2 A:a1:2
host dp1 10.2.0.10 B:b1:1
link A:a1:3 A:a2:1
link A:a2:2 B:b1:2

[universe]
hosts 10.0.0.1 10.0.0.2 10.2.0.10
ports 3306 40000
protocols tcp

[policies A]
PRIO 1 ALLOW src=* dst=* sport=* dport=* proto=*

[policies B]
PRIO 1 ALLOW src=* dst=* sport=* dport=* proto=*

[subscribers]
subscriber B dbms 10.2.0.10:3306 local
subscriber A dbms 10.2.0.10:3306 remote B

[provider dp1 3306]
PRIO 5 ALLOW src=10.0.0.1 dst=10.2.0.10 sport=* dport=3306 proto=*

[channels]
channel A B
)";

const char* kBlockingRpt = R"(
[rpt B A dbms seq=1 at=1]
PRIO 10 DENY src=10.0.0.2 dst=10.2.0.10 sport=* dport=3306 proto=*
)";

const char* kMixedInjects = R"(
[inject]
at 4 from hA dst=10.2.0.10 dport=3306 sport=40000 count=60
at 4 from hB dst=10.2.0.10 dport=3306 sport=40000 count=40
)";

const std::string kInterLink = "A:a2:2-B:b1:2";

}  // namespace

TEST_CASE("build: two domains come up with their controllers") {
    auto sc = parse_scenario(kTwoDomainText);
    World world(sc);
    CHECK(world.controller("A").domain_id() == "A");
    CHECK(world.controller("B").switches().size() == 1);
    CHECK(world.controller("A").switches().size() == 2);
    // Edges derived from wiring: a1 has hosts, a2 and b1 share the
    // inter-domain link.
    CHECK(world.controller("A").switch_state("a1")->edge);
    CHECK(world.controller("A").switch_state("a2")->edge);
    CHECK(world.controller("B").switch_state("b1")->edge);
}

TEST_CASE("build: duplicate addresses and broken references are refused") {
    std::string dup(kTwoDomainText);
    dup += "\n[topology]\nhost hC 10.0.0.1 A:a2:5\n";
    CHECK_THROWS_AS(World{parse_scenario(dup)}, InvariantError);

    std::string dangling(kTwoDomainText);
    dangling += "\n[topology]\nlink A:a1:9 A:a9:1\n";
    CHECK_THROWS_AS(World{parse_scenario(dangling)}, InvariantError);

    std::string split(kTwoDomainText);
    split += "\n[topology]\nswitch A:a3\n";  // no link back to the domain
    CHECK_THROWS_AS(World{parse_scenario(split)}, InvariantError);

    std::string ghost_inject(kTwoDomainText);
    ghost_inject += "\n[inject]\nat 1 from nobody dst=10.2.0.10 dport=3306\n";
    CHECK_THROWS_AS(World{parse_scenario(ghost_inject)}, InvariantError);
}

TEST_CASE("build: a 32-switch single-domain line topology comes up") {
    std::ostringstream os;
    os << "[topology]\ndomain A\n";
    for (int i = 0; i < 32; ++i) os << "switch A:s" << i << "\n";
    os << "host h0 10.0.0.100 A:s0:1\n";
    for (int i = 0; i + 1 < 32; ++i)
        os << "link A:s" << i << ":11 A:s" << (i + 1) << ":10\n";
    World world(parse_scenario(os.str()));
    CHECK(world.controller("A").switches().size() == 32);
}

TEST_CASE("run: no injections means all-zero counters") {
    World world(parse_scenario(kTwoDomainText));
    auto report = world.run(5);
    auto totals = report.totals();
    CHECK(report.injected == 0);
    CHECK(totals.delivered == 0);
    CHECK(totals.drops() == 0);
    CHECK(totals.packet_in_count == 0);
}

TEST_CASE("run: same-tick injections keep their declaration order") {
    std::string text(kTwoDomainText);
    text += R"(
[inject]
at 2 from hB dst=10.2.0.10 dport=3306 sport=40000
at 2 from hA dst=10.2.0.10 dport=3306 sport=40001
)";
    World world(parse_scenario(text));
    world.run(30);
    const auto& log = world.dp_log("dp1");
    REQUIRE(log.size() == 2);
    CHECK(log[0].pkt.src_ip == Ipv4{10, 0, 0, 2});
    CHECK(log[1].pkt.src_ip == Ipv4{10, 0, 0, 1});
}

TEST_CASE("run: one packet_in per switch per flow, then pure data plane") {
    std::string text(kTwoDomainText);
    text += R"(
[inject]
at 2 from hA dst=10.2.0.10 dport=3306 sport=40000 count=3
)";
    World world(parse_scenario(text));
    auto report = world.run(30);
    // Path a1 -> a2 -> b1: three table misses for the first packet only.
    CHECK(report.totals().packet_in_count == 3);
    CHECK(report.totals().delivered == 3);
}

TEST_CASE("run: blocking RPT drops at the requestor edge and saves bandwidth") {
    std::string blocked(kTwoDomainText);
    blocked += kBlockingRpt;
    blocked += kMixedInjects;
    World world(parse_scenario(blocked));
    auto report = world.run(60);
    auto totals = report.totals();

    CHECK(report.injected == 100);
    CHECK(totals.dropped_at_source_edge == 40);
    CHECK(totals.delivered == 60);
    CHECK(totals.dropped_at_dp_app == 0);
    CHECK(totals.delivered + totals.drops() == report.injected);
    CHECK(report.link_total(kInterLink) == 60);

    // Without the transfer the same traffic crosses the link and dies at
    // the application instead.
    std::string open(kTwoDomainText);
    open += kMixedInjects;
    World plain(parse_scenario(open));
    auto base = plain.run(60);
    CHECK(base.totals().dropped_at_source_edge == 0);
    CHECK(base.totals().dropped_at_dp_app == 40);
    CHECK(base.totals().delivered == 60);
    CHECK(base.link_total(kInterLink) == 100);
    CHECK(report.link_total(kInterLink) < base.link_total(kInterLink));
}

TEST_CASE("run: disabling the outer layer moves drops to the application") {
    std::string text(kTwoDomainText);
    text += kBlockingRpt;
    text += kMixedInjects;

    World enabled(parse_scenario(text));
    auto with_outer = enabled.run(60);

    std::string disabled_text = text;
    disabled_text += "\n[hooks]\ndisable_outer A\n";
    World disabled(parse_scenario(disabled_text));
    auto without_outer = disabled.run(60);

    // The outer layer only changes where the denial happens.
    CHECK(with_outer.totals().dropped_at_source_edge == 40);
    CHECK(with_outer.totals().dropped_at_dp_app == 0);
    CHECK(without_outer.totals().dropped_at_source_edge == 0);
    CHECK(without_outer.totals().dropped_at_dp_app == 40);
    CHECK(with_outer.totals().delivered == without_outer.totals().delivered);
}

TEST_CASE("run: reports are byte-identical across repeated runs") {
    std::string text(kTwoDomainText);
    text += kBlockingRpt;
    text += kMixedInjects;
    auto sc = parse_scenario(text);
    World a(sc);
    World b(sc);
    CHECK(a.run(60).to_csv() == b.run(60).to_csv());
}

TEST_CASE("lbac scenario from file: location gates the service") {
    auto sc = parse_scenario(read_file(std::string(PEPSIM_SCENARIO_DIR) +
                                       "/lbac_realtime.scn"));
    World world(sc);
    auto report = world.run(40);
    auto totals = report.totals();

    REQUIRE(world.fabric().sessions().size() == 1);
    CHECK(world.fabric().sessions().begin()->second.state == SessionState::Active);

    // Warm-ups: h1 granted, h2 denied by the inner pep. Requests: h1's five
    // pass the session rules, h2's five die at the requestor edge.
    CHECK(totals.delivered == 6);
    CHECK(totals.dropped_at_dp_app == 1);
    CHECK(totals.dropped_at_source_edge == 5);
    CHECK(totals.delivered + totals.drops() == report.injected);

    // Grant set at the provider: h1's warm-up plus its five requests.
    std::size_t granted = 0;
    for (const auto& req : world.dp_log("dp1"))
        if (req.granted) ++granted;
    CHECK(granted == 6);
}

TEST_CASE("progressive firewall: the canned ladder kills the blocked class early") {
    auto report = run_progressive_firewall(3, canned_firewall_ladder());
    auto totals = report.totals();
    CHECK(report.injected == 120);
    CHECK(totals.dropped_at_source_edge == 30);   // x1 at D1
    CHECK(totals.dropped_in_transit == 60);       // x2, x3 at D2
    CHECK(totals.dropped_at_dp_network == 0);     // nothing reaches D3's edge
    CHECK(totals.dropped_at_dp_app == 0);
    CHECK(totals.delivered == 30);                // the good host
    CHECK(totals.delivered + totals.drops() == report.injected);
}

TEST_CASE("progressive firewall: an empty ladder behaves like a plain run") {
    auto laddered = run_progressive_firewall(3, {{}, {}});
    auto plain = run_progressive_firewall(3, {});
    CHECK(laddered.totals().delivered == plain.totals().delivered);
    CHECK(laddered.totals().dropped_at_dp_app == plain.totals().dropped_at_dp_app);
    CHECK(laddered.totals().dropped_at_source_edge == 0);
    CHECK(plain.totals().dropped_at_source_edge == 0);
    // The inner enforcement point still protects the provider on its own.
    CHECK(plain.totals().dropped_at_dp_app == 90);
    CHECK(plain.totals().delivered == 30);
}

TEST_CASE("progressive firewall: a mis-scoped ladder entry is rejected alone") {
    auto ladder = canned_firewall_ladder();
    // D1's entry now tries to shield an unrelated host.
    ladder[0][0].match.dst_ip = Cidr{Ipv4{10, 1, 0, 9}, 32};
    auto report = run_progressive_firewall(3, ladder);
    auto totals = report.totals();
    // D1 passes everything (its RPT was rejected), D2 still blocks the class.
    CHECK(totals.dropped_at_source_edge == 0);
    CHECK(totals.dropped_in_transit == 90);
    CHECK(totals.delivered == 30);
}

TEST_CASE("bench: saturated baseline, dominated and monotone under ticket load") {
    BenchConfig base_cfg;
    base_cfg.ltr_load = 0;
    base_cfg.flow_load = 2000;
    base_cfg.budget_per_tick = 20;
    base_cfg.window = 100;
    auto baseline = bench_packet_in(base_cfg);
    CHECK(baseline.flows_processed == 2000);
    for (auto v : baseline.flows_per_tick) CHECK(v == 20);

    auto loaded_cfg = base_cfg;
    loaded_cfg.ltr_load = 300;
    auto loaded = bench_packet_in(loaded_cfg);
    CHECK(loaded.flows_processed < baseline.flows_processed);
    CHECK(loaded.ltrs_processed > 0);

    auto sorted_desc = [](std::vector<std::uint64_t> v) {
        std::sort(v.begin(), v.end(), std::greater<>());
        return v;
    };
    auto b = sorted_desc(baseline.flows_per_tick);
    auto l = sorted_desc(loaded.flows_per_tick);
    REQUIRE(b.size() == l.size());
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(l[i] <= b[i]);

    auto heavier_cfg = base_cfg;
    heavier_cfg.ltr_load = 600;
    auto heavier = bench_packet_in(heavier_cfg);
    CHECK(heavier.flows_processed < loaded.flows_processed);
}
