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

#include "peps/crypto.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>
#include <vector>

namespace peps {

namespace {

std::string to_hex(const unsigned char* data, std::size_t len) {
    std::string out(len * 2 + 1, '\0');
    sodium_bin2hex(out.data(), out.size(), data, len);
    out.resize(len * 2);
    return out;
}

std::vector<unsigned char> from_hex(const std::string& hex) {
    std::vector<unsigned char> out(hex.size() / 2 + 1);
    std::size_t bin_len = 0;
    if (sodium_hex2bin(out.data(), out.size(), hex.data(), hex.size(), nullptr,
                       &bin_len, nullptr) != 0)
        return {};
    out.resize(bin_len);
    return out;
}

}  // namespace

Ed25519Scheme::Ed25519Scheme() {
    if (sodium_init() < 0) throw std::runtime_error("libsodium init failed");
}

KeyPair Ed25519Scheme::derive_keypair(std::uint64_t seed) {
    unsigned char seed_bytes[crypto_sign_SEEDBYTES] = {};
    // Expand the 64-bit seed into the 32-byte signing seed (splitmix64).
    std::uint64_t x = seed;
    for (std::size_t i = 0; i < crypto_sign_SEEDBYTES; i += 8) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
        std::memcpy(seed_bytes + i, &z, 8);
    }
    unsigned char pk[crypto_sign_PUBLICKEYBYTES];
    unsigned char sk[crypto_sign_SECRETKEYBYTES];
    crypto_sign_seed_keypair(pk, sk, seed_bytes);
    return {to_hex(pk, sizeof pk), to_hex(sk, sizeof sk)};
}

std::string Ed25519Scheme::sign(const std::string& private_key_hex,
                                std::string_view message) {
    auto sk = from_hex(private_key_hex);
    if (sk.size() != crypto_sign_SECRETKEYBYTES)
        throw std::invalid_argument("malformed private key");
    unsigned char sig[crypto_sign_BYTES];
    crypto_sign_detached(sig, nullptr,
                         reinterpret_cast<const unsigned char*>(message.data()),
                         message.size(), sk.data());
    return to_hex(sig, sizeof sig);
}

bool Ed25519Scheme::verify(const std::string& public_key_hex,
                           std::string_view message,
                           const std::string& signature_hex) {
    auto pk = from_hex(public_key_hex);
    auto sig = from_hex(signature_hex);
    if (pk.size() != crypto_sign_PUBLICKEYBYTES || sig.size() != crypto_sign_BYTES)
        return false;
    return crypto_sign_verify_detached(
               sig.data(), reinterpret_cast<const unsigned char*>(message.data()),
               message.size(), pk.data()) == 0;
}

std::shared_ptr<SignatureScheme> make_default_scheme() {
    return std::make_shared<Ed25519Scheme>();
}

std::uint64_t stable_hash64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace peps
