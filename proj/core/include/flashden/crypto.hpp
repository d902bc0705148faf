#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace flashden {

using Key256 = std::array<uint8_t, 32>;

uint32_t crc32_of(std::span<const uint8_t> bytes);

/// PBKDF2-HMAC-SHA256 with a fixed salt; deterministic per passphrase.
Key256 derive_key(const std::string& passphrase);

/// Keyed PRF (HMAC-SHA256 truncated to 64 bits) over a label plus a list
/// of integer inputs. Used for hidden-offset and replica placement.
uint64_t prf_u64(const Key256& key, const std::string& label,
                 std::initializer_list<uint64_t> inputs = {});

/// Length-preserving tweakable sector cipher (AES-256-XTS, tweak = sector
/// index). Ciphertext carries no structure recoverable without the key.
class SectorCipher {
public:
  explicit SectorCipher(const Key256& key);

  std::vector<uint8_t> encrypt(uint64_t sector,
                               std::span<const uint8_t> plaintext) const;
  std::vector<uint8_t> decrypt(uint64_t sector,
                               std::span<const uint8_t> ciphertext) const;

private:
  std::vector<uint8_t> run(uint64_t sector, std::span<const uint8_t> in,
                           bool encrypt) const;

  std::array<uint8_t, 64> xts_key_;
};

/// Deterministic byte stream for workload randomness (volume fills,
/// file payloads). Seeded per scenario so dumps reproduce exactly.
class RandomStream {
public:
  explicit RandomStream(uint64_t seed) : rng_(seed) {}

  std::vector<uint8_t> bytes(size_t n);
  uint64_t next_u64() { return rng_(); }
  /// Uniform in [0, n).
  uint64_t below(uint64_t n);

private:
  std::mt19937_64 rng_;
};

} // namespace flashden
