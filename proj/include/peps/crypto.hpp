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

#include <memory>
#include <string>
#include <string_view>

namespace peps {

/// Keys and signatures travel as lowercase hex so they can be embedded in
/// the line-oriented wire formats.
struct KeyPair {
    std::string public_key;
    std::string private_key;
};

/// Detached-signature contract every principal (controller, host) uses.
/// Signing is deterministic so simulation runs are reproducible.
class SignatureScheme {
 public:
    virtual ~SignatureScheme() = default;

    /// Deterministically derives a keypair from a seed.
    virtual KeyPair derive_keypair(std::uint64_t seed) = 0;
    virtual std::string sign(const std::string& private_key_hex,
                             std::string_view message) = 0;
    virtual bool verify(const std::string& public_key_hex, std::string_view message,
                        const std::string& signature_hex) = 0;
};

/// Ed25519 (libsodium) implementation.
class Ed25519Scheme final : public SignatureScheme {
 public:
    Ed25519Scheme();
    KeyPair derive_keypair(std::uint64_t seed) override;
    std::string sign(const std::string& private_key_hex,
                     std::string_view message) override;
    bool verify(const std::string& public_key_hex, std::string_view message,
                const std::string& signature_hex) override;
};

std::shared_ptr<SignatureScheme> make_default_scheme();

/// Stable 64-bit FNV-1a over a string; used to derive per-principal key seeds.
std::uint64_t stable_hash64(std::string_view s);

}  // namespace peps
