#ifndef LORENZCODE_CIPHER_HPP
#define LORENZCODE_CIPHER_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "lorenzcode/oneway.hpp"

namespace lzc::cipher {

using Block32 = std::array<std::uint8_t, 32>;

// Secret key (m1..m8) plus the public base parameters.
struct CipherKey {
  oneway::KeyBlock k{};
  oneway::BaseConfig base;
};

// Serialized layout: magic "LZC1" | version 0x01 | original_length u64
// big-endian | body of ceil(original_length/32) 32-byte groups.
constexpr std::array<std::uint8_t, 4> container_magic = {'L', 'Z', 'C', '1'};
constexpr std::uint8_t container_version = 0x01;
constexpr std::size_t container_header_size = 4 + 1 + 8;

struct Container {
  std::uint64_t original_length = 0;
  std::vector<std::uint8_t> body; // exactly ceil(original_length/32)*32 bytes
};

std::vector<std::uint8_t> serialize(const Container& c);
// Throws FormatError: bad magic, unsupported version, corrupt lengths.
Container parse_container(std::span<const std::uint8_t> bytes);

// Keystream block for a chain value: hash8(base, chain) as 32 bytes.
Block32 keystream_block(const CipherKey& key, const oneway::KeyBlock& chain);

// 32 -> 8 bytes: out[j] = b[j] ^ b[j+8] ^ b[j+16] ^ b[j+24].
std::array<std::uint8_t, 8> fold32to8(std::span<const std::uint8_t> block);

// Feedback schedule: next[j] = chain[j] ^ fold(M)[j] ^ fold(C)[j]. Because
// C = M ^ K this reduces to chain ^ fold(K): the chain sequence does not
// depend on the plaintext (output-feedback style).
oneway::KeyBlock next_chain(const oneway::KeyBlock& chain,
                            std::span<const std::uint8_t> plain_group,
                            std::span<const std::uint8_t> cipher_group);

// Zero-pads the plaintext to whole 32-byte groups, XORs each group with the
// keystream, chains the key. chain_0 = key.k.
Container encrypt(const CipherKey& key, std::span<const std::uint8_t> plain);

// Regenerates the keystream and recovers exactly original_length bytes.
std::vector<std::uint8_t> decrypt(const CipherKey& key, const Container& c);

// The first n_blocks keystream blocks under the chain schedule (what
// encrypt would XOR against the plaintext).
std::vector<Block32> keystream(const CipherKey& key, std::size_t n_blocks);

} // namespace lzc::cipher

#endif
