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
#include <optional>
#include <string>
#include <vector>

#include "peps/crypto.hpp"
#include "peps/net.hpp"

namespace peps {

/// Signed message on the east-west link between two controllers.
/// Wire form: `EW <from> <to> SEQ <n> TYPE <RPT|SESSION|BINDING> <payload> SIG <hex>`
/// with the payload escaped to a single token ('\' -> "\\", '\n' -> "\n",
/// ' ' -> "\s"). The signed bytes are the line up to and excluding " SIG".
struct EwEnvelope {
    enum class Type : std::uint8_t { Rpt, Session, Binding };

    DomainId from_domain;
    DomainId to_domain;
    std::uint64_t seq = 0;
    Type type = Type::Rpt;
    std::string payload;  // unescaped
    std::string signature_hex;

    std::string signing_payload() const;
    std::string line() const;
    static std::optional<EwEnvelope> parse(std::string_view line);
};

std::string escape_payload(std::string_view raw);
std::optional<std::string> unescape_payload(std::string_view escaped);

/// In-memory FIFO link between two domains: per-direction sequence numbers,
/// fixed delivery latency, message-level signatures. Envelopes are signed by
/// the sending controller before they enter the queue.
class EastWestChannel {
 public:
    EastWestChannel(DomainId a, DomainId b, Tick latency = 1)
        : domain_a_(std::move(a)), domain_b_(std::move(b)), latency_(latency) {}

    const DomainId& domain_a() const { return domain_a_; }
    const DomainId& domain_b() const { return domain_b_; }
    bool active() const { return active_; }
    bool links(const DomainId& x, const DomainId& y) const {
        return (x == domain_a_ && y == domain_b_) ||
               (x == domain_b_ && y == domain_a_);
    }

    struct SendReceipt {
        bool ok = false;
        std::string error;  // ChannelDown, NotEndpoint
        std::uint64_t seq = 0;
    };

    SendReceipt send(const DomainId& from, EwEnvelope::Type type,
                     std::string payload, SignatureScheme& scheme,
                     const KeyPair& sender_keys, Tick now);

    /// Pops every envelope whose delivery tick has arrived, in FIFO order
    /// per direction (a->b drained before b->a for determinism).
    std::vector<EwEnvelope> collect_due(Tick now);

    bool pending() const { return !to_b_.empty() || !to_a_.empty(); }

    void teardown();

    /// Test hook: corrupt the next envelope sent from `from` after signing.
    void tamper_next(const DomainId& from);

 private:
    struct Queued {
        Tick deliver_at;
        EwEnvelope env;
    };

    DomainId domain_a_;
    DomainId domain_b_;
    Tick latency_;
    bool active_ = true;
    std::deque<Queued> to_b_;  // direction a -> b
    std::deque<Queued> to_a_;
    std::uint64_t seq_to_b_ = 0;
    std::uint64_t seq_to_a_ = 0;
    bool tamper_from_a_ = false;
    bool tamper_from_b_ = false;
};

}  // namespace peps
