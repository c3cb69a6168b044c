#include "lorenzcode/cipher.hpp"

#include <algorithm>

namespace lzc::cipher {

using oneway::KeyBlock;

std::vector<std::uint8_t> serialize(const Container& c) {
  std::vector<std::uint8_t> out;
  out.reserve(container_header_size + c.body.size());
  out.insert(out.end(), container_magic.begin(), container_magic.end());
  out.push_back(container_version);
  for (int i = 7; i >= 0; --i)
    out.push_back(static_cast<std::uint8_t>(c.original_length >> (8 * i)));
  out.insert(out.end(), c.body.begin(), c.body.end());
  return out;
}

Container parse_container(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < container_header_size)
    throw FormatError("corrupt container: shorter than the header");
  if (!std::equal(container_magic.begin(), container_magic.end(),
                  bytes.begin()))
    throw FormatError("bad magic: not a LZC1 container");
  if (bytes[4] != container_version)
    throw FormatError("unsupported version " + std::to_string(bytes[4]));
  std::uint64_t len = 0;
  for (int i = 0; i < 8; ++i) len = (len << 8) | bytes[5 + i];
  std::uint64_t groups = (len + 31) / 32;
  std::uint64_t body_size = bytes.size() - container_header_size;
  if (body_size != groups * 32)
    throw FormatError("corrupt container: body is " +
                      std::to_string(body_size) + " bytes, expected " +
                      std::to_string(groups * 32));
  Container c;
  c.original_length = len;
  c.body.assign(bytes.begin() + container_header_size, bytes.end());
  return c;
}

Block32 keystream_block(const CipherKey& key, const KeyBlock& chain) {
  return oneway::hash8(key.base, chain);
}

std::array<std::uint8_t, 8> fold32to8(std::span<const std::uint8_t> block) {
  if (block.size() != 32)
    throw DomainError("fold32to8: need exactly 32 bytes, got " +
                      std::to_string(block.size()));
  std::array<std::uint8_t, 8> out{};
  for (std::size_t j = 0; j < 8; ++j)
    out[j] = block[j] ^ block[j + 8] ^ block[j + 16] ^ block[j + 24];
  return out;
}

KeyBlock next_chain(const KeyBlock& chain,
                    std::span<const std::uint8_t> plain_group,
                    std::span<const std::uint8_t> cipher_group) {
  auto fm = fold32to8(plain_group);
  auto fc = fold32to8(cipher_group);
  KeyBlock next{};
  for (std::size_t j = 0; j < 8; ++j) next[j] = chain[j] ^ fm[j] ^ fc[j];
  return next;
}

Container encrypt(const CipherKey& key, std::span<const std::uint8_t> plain) {
  Container c;
  c.original_length = plain.size();
  std::size_t groups = (plain.size() + 31) / 32;
  c.body.resize(groups * 32);

  KeyBlock chain = key.k;
  std::array<std::uint8_t, 32> m{};
  for (std::size_t g = 0; g < groups; ++g) {
    m.fill(0);
    std::size_t offset = g * 32;
    std::size_t n = std::min<std::size_t>(32, plain.size() - offset);
    std::copy_n(plain.begin() + offset, n, m.begin());
    Block32 k;
    try {
      k = keystream_block(key, chain);
    } catch (const DivergedError& e) {
      throw DivergedError("encrypt failed in group " + std::to_string(g) +
                              ": " + e.what(),
                          e.step());
    }
    for (std::size_t j = 0; j < 32; ++j) c.body[offset + j] = m[j] ^ k[j];
    chain = next_chain(chain, m,
                       std::span<const std::uint8_t>(c.body).subspan(offset, 32));
  }
  return c;
}

std::vector<std::uint8_t> decrypt(const CipherKey& key, const Container& c) {
  std::uint64_t groups = (c.original_length + 31) / 32;
  if (c.body.size() != groups * 32)
    throw FormatError("corrupt container: body/length mismatch");

  std::vector<std::uint8_t> plain(c.body.size());
  KeyBlock chain = key.k;
  std::array<std::uint8_t, 32> m{};
  for (std::uint64_t g = 0; g < groups; ++g) {
    std::size_t offset = static_cast<std::size_t>(g) * 32;
    Block32 k = keystream_block(key, chain);
    for (std::size_t j = 0; j < 32; ++j) m[j] = c.body[offset + j] ^ k[j];
    std::copy_n(m.begin(), 32, plain.begin() + offset);
    chain = next_chain(
        chain, m, std::span<const std::uint8_t>(c.body).subspan(offset, 32));
  }
  plain.resize(c.original_length);
  return plain;
}

std::vector<Block32> keystream(const CipherKey& key, std::size_t n_blocks) {
  std::vector<Block32> out;
  out.reserve(n_blocks);
  KeyBlock chain = key.k;
  for (std::size_t g = 0; g < n_blocks; ++g) {
    Block32 k = keystream_block(key, chain);
    out.push_back(k);
    // Plaintext-independent schedule: chain ^ fold(M) ^ fold(C) = chain ^ fold(K).
    auto fk = fold32to8(k);
    for (std::size_t j = 0; j < 8; ++j) chain[j] ^= fk[j];
  }
  return out;
}

} // namespace lzc::cipher
