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

#include "peps/bench.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "peps/controller.hpp"

namespace peps {

namespace {

struct BenchMsg {
    enum class Kind : std::uint8_t { Flow, Ltr } kind;
    SwitchId sw;
    PacketHeader pkt;           // Flow
    LocationTicketRequest ltr;  // Ltr
};

}  // namespace

BenchResult bench_packet_in(const BenchConfig& config) {
    auto scheme = make_default_scheme();
    Controller ctrl("bench", scheme, scheme->derive_keypair(stable_hash64("bench")));
    ctrl.set_local_policies([] {
        Policy allow;
        allow.priority = 1;
        allow.decision = Decision::allow();
        return std::vector<Policy>{allow};
    }());
    ctrl.set_route_fn([](const SwitchId&, Ipv4) {
        return std::optional<std::uint16_t>{2};
    });

    std::vector<SwitchId> switches;
    std::vector<Ipv4> host_ips;
    std::vector<KeyPair> host_keys;
    ctrl.geo().define_zone({"Z", "bench floor", SecurityClass::Secure});
    for (std::size_t i = 0; i < config.switch_count; ++i) {
        SwitchId sw = "s" + std::to_string(i);
        ctrl.add_switch(sw, true);
        ctrl.geo().map_port(sw, 1, "Z");
        const Ipv4 ip(10, 8, static_cast<std::uint8_t>(i / 250),
                      static_cast<std::uint8_t>(i % 250 + 1));
        ctrl.geo().track(ip, sw, 1, 0);
        switches.push_back(std::move(sw));
        host_ips.push_back(ip);
        host_keys.push_back(
            scheme->derive_keypair(stable_hash64("bench-host-" + std::to_string(i))));
    }

    BenchResult result;
    result.flows_per_tick.assign(config.window, 0);
    result.msgs_per_tick.assign(config.window, 0);

    std::deque<BenchMsg> inbox;
    std::uint32_t flows_issued = 0;
    std::uint32_t ltrs_issued = 0;

    const std::size_t n = switches.size();
    for (Tick t = 0; t < config.window; ++t) {
        ctrl.advance_to(t);

        // Evenly spread arrivals; flows across the window, tickets across the
        // burst prefix. Interleaved so the FIFO shares the budget fairly.
        const std::uint32_t flow_rate = static_cast<std::uint32_t>(
            (static_cast<std::uint64_t>(config.flow_load) * (t + 1)) / config.window -
            (static_cast<std::uint64_t>(config.flow_load) * t) / config.window);
        std::uint32_t ltr_rate = 0;
        if (t < config.ltr_burst_ticks && config.ltr_load > 0) {
            ltr_rate = static_cast<std::uint32_t>(
                (static_cast<std::uint64_t>(config.ltr_load) * (t + 1)) /
                    config.ltr_burst_ticks -
                (static_cast<std::uint64_t>(config.ltr_load) * t) /
                    config.ltr_burst_ticks);
        }
        for (std::uint32_t i = 0; i < std::max(flow_rate, ltr_rate); ++i) {
            if (i < flow_rate) {
                const std::uint32_t f = flows_issued++;
                BenchMsg msg;
                msg.kind = BenchMsg::Kind::Flow;
                msg.sw = switches[f % n];
                msg.pkt.src_ip = host_ips[f % n];
                msg.pkt.dst_ip = host_ips[(f * 7 + 13) % n];
                msg.pkt.src_port = static_cast<std::uint16_t>(1024 + f % 60000);
                msg.pkt.dst_port = 80;
                msg.pkt.protocol = Protocol::Tcp;
                inbox.push_back(std::move(msg));
            }
            if (i < ltr_rate) {
                const std::uint32_t l = ltrs_issued++;
                BenchMsg msg;
                msg.kind = BenchMsg::Kind::Ltr;
                msg.sw = switches[l % n];
                msg.ltr = LocationTicketRequest::make_signed(
                    *scheme, host_keys[l % n], host_ips[l % n], t);
                inbox.push_back(std::move(msg));
            }
        }

        std::uint32_t budget = config.budget_per_tick;
        while (budget > 0 && !inbox.empty()) {
            BenchMsg msg = std::move(inbox.front());
            inbox.pop_front();
            --budget;
            ++result.msgs_per_tick[t];
            if (msg.kind == BenchMsg::Kind::Flow) {
                ctrl.handle_packet_in(msg.sw, 1, msg.pkt);
                ++result.flows_per_tick[t];
                ++result.flows_processed;
            } else {
                ctrl.issue_ticket(msg.ltr, msg.ltr.requestor_ip);
                ++result.ltrs_processed;
            }
        }
    }
    return result;
}

std::string bench_csv(const BenchResult& baseline, const BenchResult& loaded) {
    std::ostringstream os;
    os << "tick,flows_baseline,msgs_baseline,flows_loaded,msgs_loaded\n";
    const std::size_t n =
        std::max(baseline.flows_per_tick.size(), loaded.flows_per_tick.size());
    auto at = [](const std::vector<std::uint64_t>& v, std::size_t i) {
        return i < v.size() ? v[i] : 0;
    };
    for (std::size_t t = 0; t < n; ++t) {
        os << t << ',' << at(baseline.flows_per_tick, t) << ','
           << at(baseline.msgs_per_tick, t) << ',' << at(loaded.flows_per_tick, t)
           << ',' << at(loaded.msgs_per_tick, t) << '\n';
    }
    return os.str();
}

}  // namespace peps
