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

// pepsim: run scenarios, validate transfers, compile them to flow rules,
// issue/verify location tickets, and benchmark controller load.
//
// Exit codes: 0 success/accept, 1 reject or failed check, 2 parse error,
// 3 invariant violation. stdout carries machine-readable results only.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "peps/bench.hpp"
#include "peps/ticket.hpp"
#include "peps/validate.hpp"
#include "peps/world.hpp"

namespace {

using namespace peps;

constexpr int kExitOk = 0;
constexpr int kExitRejected = 1;
constexpr int kExitParseError = 2;
constexpr int kExitInvariant = 3;

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) return std::nullopt;
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return true;
    }
    std::ofstream out(path);
    if (!out.good()) return false;
    out << content;
    return out.good();
}

std::vector<Policy> parse_policy_file(const std::string& text,
                                      const std::string& path) {
    std::vector<Policy> out;
    std::size_t lineno = 0;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\r'))
            line.pop_back();
        if (line.empty()) continue;
        auto p = Policy::parse_line(line);
        if (!p)
            throw ScenarioParseError(lineno, path + ": bad policy line");
        out.push_back(std::move(*p));
    }
    return out;
}

HeaderUniverse parse_universe_file(const std::string& text,
                                   const std::string& path) {
    auto sc = parse_scenario("[universe]\n" + text);
    if (!sc.universe) throw ScenarioParseError(1, path + ": incomplete universe");
    return *sc.universe;
}

// "PUB <hex>" / "PRIV <hex>" key files emitted by `ticket keygen`.
KeyPair parse_key_file(const std::string& text) {
    KeyPair keys;
    std::istringstream is(text);
    std::string kind, hex;
    while (is >> kind >> hex) {
        if (kind == "PUB") keys.public_key = hex;
        if (kind == "PRIV") keys.private_key = hex;
    }
    return keys;
}

std::string describe_action(const RuleAction& a) {
    switch (a.kind) {
        case ActionKind::Drop: return "drop";
        case ActionKind::Forward: return "forward:" + std::to_string(a.port);
        case ActionKind::GotoTable: return "goto:" + std::to_string(a.table);
        case ActionKind::SendToController: return "controller";
        case ActionKind::Accept: return "accept";
        case ActionKind::RateLimit:
            return "ratelimit:" + std::to_string(a.max_new_flows) + "/" +
                   std::to_string(a.window_ticks);
    }
    return "?";
}

std::string describe_match(const MatchFields& m) {
    std::ostringstream os;
    os << "src=" << (m.src_ip ? m.src_ip->to_string() : "*");
    os << " dst=" << (m.dst_ip ? m.dst_ip->to_string() : "*");
    os << " sport=" << (m.src_port ? std::to_string(*m.src_port) : "*");
    os << " dport=" << (m.dst_port ? std::to_string(*m.dst_port) : "*");
    os << " proto=" << (m.protocol ? to_string(*m.protocol) : "*");
    if (m.in_port) os << " in_port=" << *m.in_port;
    return os.str();
}

int cmd_run(const std::string& scenario_path, const std::string& config_path,
            std::uint64_t seed, Tick until, bool disable_outer,
            const std::string& out_path) {
    auto text = read_file(scenario_path);
    if (!text) {
        std::cerr << "cannot read scenario: " << scenario_path << "\n";
        return kExitParseError;
    }
    if (!config_path.empty()) {
        auto extra = read_file(config_path);
        if (!extra) {
            std::cerr << "cannot read config: " << config_path << "\n";
            return kExitParseError;
        }
        *text += "\n" + *extra;
    }
    try {
        auto scenario = parse_scenario(*text);
        WorldConfig config;
        config.seed = seed;
        config.disable_outer_everywhere = disable_outer;
        World world(scenario, config);
        auto report = world.run(until);
        if (!write_output(out_path, report.to_csv())) {
            std::cerr << "cannot write: " << out_path << "\n";
            return kExitInvariant;
        }
        return kExitOk;
    } catch (const ScenarioParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParseError;
    } catch (const InvariantError& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kExitInvariant;
    }
}

int cmd_validate(const std::string& local_path, const std::string& transfer_path,
                 const std::string& universe_path, const std::string& scope_text,
                 const std::string& pub_hex, std::uint64_t last_seq) {
    try {
        auto local_text = read_file(local_path);
        auto transfer_text = read_file(transfer_path);
        auto universe_text = read_file(universe_path);
        if (!local_text || !transfer_text || !universe_text) {
            std::cerr << "cannot read input files\n";
            return kExitParseError;
        }
        auto local = parse_policy_file(*local_text, local_path);
        auto universe = parse_universe_file(*universe_text, universe_path);

        auto scheme = make_default_scheme();
        SignatureScheme* maybe_scheme = pub_hex.empty() ? nullptr : scheme.get();

        ValidationResult result;
        if (auto rpt = RemotePolicyTransfer::parse(*transfer_text)) {
            std::optional<ServiceAddress> registered;
            if (!scope_text.empty()) {
                registered = ServiceAddress::parse(scope_text);
                if (!registered) {
                    std::cerr << "bad --scope\n";
                    return kExitParseError;
                }
            }
            result = validate_rpt(local, *rpt, registered, pub_hex, last_seq,
                                  maybe_scheme, universe);
        } else if (auto pt = PolicyTransfer::parse(*transfer_text)) {
            if (scope_text.empty()) {
                std::cerr << "--scope <ip:ports> is required for a PT\n";
                return kExitParseError;
            }
            auto scope = ServiceAddress::parse(scope_text);
            if (!scope) {
                std::cerr << "bad --scope\n";
                return kExitParseError;
            }
            result = validate_pt(local, *pt, *scope, pub_hex, last_seq,
                                 maybe_scheme, universe);
        } else {
            std::cerr << "transfer file is neither a PT nor an RPT envelope\n";
            return kExitParseError;
        }

        if (result.ok()) {
            std::cout << "ACCEPT ok\n";
            return kExitOk;
        }
        std::cout << "REJECT " << to_string(result.code);
        if (result.policy_index) std::cout << " index=" << *result.policy_index;
        if (result.witness)
            std::cout << " witness=" << result.witness->witness_string();
        std::cout << "\n";
        return kExitRejected;
    } catch (const ScenarioParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParseError;
    }
}

int cmd_compile(const std::string& transfer_path, std::uint32_t last_table) {
    auto text = read_file(transfer_path);
    if (!text) {
        std::cerr << "cannot read transfer: " << transfer_path << "\n";
        return kExitParseError;
    }
    CompileResult compiled;
    if (auto rpt = RemotePolicyTransfer::parse(*text)) {
        compiled = compile_transfer(
            rpt->policies,
            RuleOrigin::remote_rpt(rpt->origin_domain_id, rpt->subscriber_id),
            last_table);
    } else if (auto pt = PolicyTransfer::parse(*text)) {
        compiled = compile_transfer(
            pt->policies, RuleOrigin::local_pt(pt->subscriber_id), last_table);
    } else {
        std::cerr << "transfer file is neither a PT nor an RPT envelope\n";
        return kExitParseError;
    }
    if (!compiled.ok) {
        std::cerr << "BandOverflow\n";
        return kExitRejected;
    }
    for (const auto& r : compiled.rules) {
        std::cout << "table=" << r.table_index << " prio=" << r.priority
                  << " origin=" << r.origin.to_string() << " action="
                  << describe_action(r.action) << " " << describe_match(r.match)
                  << "\n";
    }
    return kExitOk;
}

int cmd_ticket_keygen(std::uint64_t seed) {
    auto keys = make_default_scheme()->derive_keypair(seed);
    std::cout << "PUB " << keys.public_key << "\nPRIV " << keys.private_key << "\n";
    return kExitOk;
}

int cmd_ticket_issue(const std::string& ltr_path, const std::string& key_path,
                     const std::string& domain, const std::string& zone,
                     Tick now, Tick freshness, const std::string& observed_ip) {
    auto ltr_text = read_file(ltr_path);
    auto key_text = read_file(key_path);
    if (!ltr_text || !key_text) {
        std::cerr << "cannot read input files\n";
        return kExitParseError;
    }
    // The envelope is the first non-empty line.
    std::istringstream is(*ltr_text);
    std::string line;
    while (std::getline(is, line) && line.empty()) {
    }
    auto ltr = LocationTicketRequest::parse(line);
    if (!ltr) {
        std::cerr << "bad LTR line\n";
        return kExitParseError;
    }
    auto issuer = parse_key_file(*key_text);
    if (issuer.private_key.empty()) {
        std::cerr << "issuer key file lacks PRIV\n";
        return kExitParseError;
    }

    Ipv4 observed = ltr->requestor_ip;
    if (!observed_ip.empty()) {
        auto ip = Ipv4::parse(observed_ip);
        if (!ip) {
            std::cerr << "bad --observed-ip\n";
            return kExitParseError;
        }
        observed = *ip;
    }

    // Standalone issuance: stand in for the geo table with the stated zone.
    auto scheme = make_default_scheme();
    GeoLocationTable geo;
    geo.define_zone({zone, zone, SecurityClass::Secure});
    geo.map_port("cli", 1, zone);
    geo.track(ltr->requestor_ip, "cli", 1, now);

    auto issued = issue_location_ticket(*scheme, issuer, domain, geo, *ltr,
                                        observed, now, freshness);
    if (!issued.ok) {
        std::cerr << to_string(issued.error) << "\n";
        return kExitRejected;
    }
    std::cout << issued.ticket.serialize() << "\n";
    return kExitOk;
}

int cmd_ticket_verify(const std::string& lt_path, const std::string& pub,
                      Tick now, Tick max_age, const std::string& expected_ip,
                      const std::string& expected_key) {
    auto lt_text = read_file(lt_path);
    if (!lt_text) {
        std::cerr << "cannot read ticket\n";
        return kExitParseError;
    }
    std::istringstream is(*lt_text);
    std::string line;
    while (std::getline(is, line) && line.empty()) {
    }
    auto lt = LocationTicket::parse(line);
    if (!lt) {
        std::cerr << "bad LT line\n";
        return kExitParseError;
    }
    auto ip = Ipv4::parse(expected_ip);
    if (!ip) {
        std::cerr << "bad --expected-ip\n";
        return kExitParseError;
    }
    auto scheme = make_default_scheme();
    auto result = verify_location_ticket(*scheme, pub, *lt, now, max_age, *ip,
                                         expected_key);
    if (result.ok) {
        std::cout << "ACCEPT ok\n";
        return kExitOk;
    }
    std::cout << "REJECT " << to_string(result.reason) << "\n";
    return kExitRejected;
}

int cmd_bench(const BenchConfig& config, const std::string& out_path) {
    auto baseline_cfg = config;
    baseline_cfg.ltr_load = 0;
    auto baseline = bench_packet_in(baseline_cfg);
    auto loaded = bench_packet_in(config);
    if (!write_output(out_path, bench_csv(baseline, loaded))) {
        std::cerr << "cannot write: " << out_path << "\n";
        return kExitInvariant;
    }
    return kExitOk;
}

int cmd_firewall_chain(std::size_t domains, Tick until,
                       const std::string& out_path) {
    std::vector<std::vector<Policy>> ladder;
    auto canned = canned_firewall_ladder();
    for (std::size_t i = 0; i + 1 < domains; ++i)
        ladder.push_back(i == 0 ? canned[0] : canned[1]);
    try {
        auto report = run_progressive_firewall(domains, ladder, until);
        if (!write_output(out_path, report.to_csv())) {
            std::cerr << "cannot write: " << out_path << "\n";
            return kExitInvariant;
        }
        return kExitOk;
    } catch (const InvariantError& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kExitInvariant;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pepsim: multi-domain SDN policy-enforcement simulator"};
    app.require_subcommand(1);

    // run
    std::string scenario_path, config_path, out_path;
    std::uint64_t seed = 1;
    Tick until = 100;
    bool disable_outer = false;
    auto* run = app.add_subcommand("run", "run a scenario file");
    run->add_option("scenario", scenario_path)->required();
    run->add_option("--config", config_path, "extra scenario text to append");
    run->add_option("--seed", seed);
    run->add_option("--until", until, "minimum ticks to simulate");
    run->add_flag("--disable-outer", disable_outer,
                  "disable every domain's last-table enforcement");
    run->add_option("--out", out_path, "CSV output path (default stdout)");

    // validate
    std::string local_path, transfer_path, universe_path, scope_text, pub_hex;
    std::uint64_t last_seq = 0;
    auto* validate = app.add_subcommand("validate", "check a PT/RPT offline");
    validate->add_option("--local", local_path)->required();
    validate->add_option("--transfer", transfer_path)->required();
    validate->add_option("--universe", universe_path)->required();
    validate->add_option("--scope", scope_text,
                         "subscriber service address ip:ports");
    validate->add_option("--pub", pub_hex, "verify the signature with this key");
    validate->add_option("--last-seq", last_seq);

    // compile
    std::string compile_transfer_path;
    std::uint32_t last_table = 2;
    auto* compile = app.add_subcommand("compile", "compile a transfer to rules");
    compile->add_option("--transfer", compile_transfer_path)->required();
    compile->add_option("--last-table", last_table);

    // ticket
    auto* ticket = app.add_subcommand("ticket", "location ticket operations");
    ticket->require_subcommand(1);
    std::uint64_t key_seed = 1;
    auto* keygen = ticket->add_subcommand("keygen", "derive a keypair");
    keygen->add_option("--seed", key_seed);

    std::string ltr_path, key_path, domain = "A", zone = "Z1", observed_ip;
    Tick now = 0, freshness = 10, max_age = 50;
    auto* issue = ticket->add_subcommand("issue", "issue a ticket from an LTR");
    issue->add_option("--ltr", ltr_path)->required();
    issue->add_option("--issuer-key", key_path)->required();
    issue->add_option("--domain", domain);
    issue->add_option("--zone", zone, "zone the requestor is located in");
    issue->add_option("--now", now);
    issue->add_option("--freshness", freshness);
    issue->add_option("--observed-ip", observed_ip,
                      "source address seen on the wire (default: the LTR's)");

    std::string lt_path, issuer_pub, expected_ip, expected_key;
    auto* verify = ticket->add_subcommand("verify", "verify a ticket");
    verify->add_option("--lt", lt_path)->required();
    verify->add_option("--issuer-pub", issuer_pub)->required();
    verify->add_option("--now", now);
    verify->add_option("--max-age", max_age);
    verify->add_option("--expected-ip", expected_ip)->required();
    verify->add_option("--expected-key", expected_key)->required();

    // bench
    BenchConfig bench_cfg;
    std::string bench_out;
    auto* bench = app.add_subcommand("bench", "controller packet_in benchmark");
    bench->add_option("--switches", bench_cfg.switch_count);
    bench->add_option("--ltr", bench_cfg.ltr_load);
    bench->add_option("--flows", bench_cfg.flow_load);
    bench->add_option("--budget", bench_cfg.budget_per_tick);
    bench->add_option("--window", bench_cfg.window);
    bench->add_option("--burst", bench_cfg.ltr_burst_ticks);
    bench->add_option("--out", bench_out);

    // firewall-chain
    std::size_t chain_domains = 3;
    Tick chain_until = 200;
    std::string chain_out;
    auto* chain =
        app.add_subcommand("firewall-chain", "run the chained-firewall scenario");
    chain->add_option("--domains", chain_domains)->check(CLI::Range(2, 16));
    chain->add_option("--until", chain_until);
    chain->add_option("--out", chain_out);

    CLI11_PARSE(app, argc, argv);

    if (run->parsed())
        return cmd_run(scenario_path, config_path, seed, until, disable_outer,
                       out_path);
    if (validate->parsed())
        return cmd_validate(local_path, transfer_path, universe_path, scope_text,
                            pub_hex, last_seq);
    if (compile->parsed()) return cmd_compile(compile_transfer_path, last_table);
    if (ticket->parsed()) {
        if (keygen->parsed()) return cmd_ticket_keygen(key_seed);
        if (issue->parsed())
            return cmd_ticket_issue(ltr_path, key_path, domain, zone, now,
                                    freshness, observed_ip);
        if (verify->parsed())
            return cmd_ticket_verify(lt_path, issuer_pub, now, max_age,
                                     expected_ip, expected_key);
    }
    if (bench->parsed()) return cmd_bench(bench_cfg, bench_out);
    if (chain->parsed()) return cmd_firewall_chain(chain_domains, chain_until,
                                                   chain_out);
    return kExitOk;
}
