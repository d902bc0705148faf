#include "flashden/crypto.hpp"

#include <cstring>

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/sha.h>
#include <zlib.h>

#include "flashden/errors.hpp"

namespace flashden {

uint32_t crc32_of(std::span<const uint8_t> bytes) {
  return uint32_t(::crc32(0L, bytes.data(), uInt(bytes.size())));
}

Key256 derive_key(const std::string& passphrase) {
  if (passphrase.empty()) {
    raise(Err::EmptyPassphrase, "passphrase must be non-empty");
  }
  static constexpr char kSalt[] = "flashden-kdf-v1";
  static constexpr int kIterations = 10000;
  Key256 key{};
  if (PKCS5_PBKDF2_HMAC(passphrase.data(), int(passphrase.size()),
                        reinterpret_cast<const unsigned char*>(kSalt),
                        int(sizeof(kSalt) - 1), kIterations, EVP_sha256(),
                        int(key.size()), key.data()) != 1) {
    throw std::runtime_error("PBKDF2 failed");
  }
  return key;
}

uint64_t prf_u64(const Key256& key, const std::string& label,
                 std::initializer_list<uint64_t> inputs) {
  std::vector<uint8_t> msg(label.begin(), label.end());
  for (uint64_t v : inputs) {
    for (int i = 7; i >= 0; --i) {
      msg.push_back(uint8_t(v >> (8 * i)));
    }
  }
  unsigned char mac[EVP_MAX_MD_SIZE];
  unsigned int mac_len = 0;
  if (HMAC(EVP_sha256(), key.data(), int(key.size()), msg.data(), msg.size(),
           mac, &mac_len) == nullptr ||
      mac_len < 8) {
    throw std::runtime_error("HMAC failed");
  }
  uint64_t out = 0;
  for (int i = 0; i < 8; ++i) {
    out = (out << 8) | mac[i];
  }
  return out;
}

SectorCipher::SectorCipher(const Key256& key) {
  // XTS wants two independent 32-byte keys; expand the volume key with
  // domain-separated hashes.
  for (int half = 0; half < 2; ++half) {
    std::vector<uint8_t> msg(key.begin(), key.end());
    msg.push_back(uint8_t(half + 1));
    SHA256(msg.data(), msg.size(), xts_key_.data() + half * 32);
  }
}

std::vector<uint8_t> SectorCipher::run(uint64_t sector,
                                       std::span<const uint8_t> in,
                                       bool encrypt) const {
  unsigned char tweak[16] = {0};
  for (int i = 0; i < 8; ++i) {
    tweak[i] = uint8_t(sector >> (8 * i));
  }
  EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
  if (ctx == nullptr) {
    throw std::runtime_error("EVP_CIPHER_CTX_new failed");
  }
  std::vector<uint8_t> out(in.size());
  int len = 0;
  int total = 0;
  bool ok = EVP_CipherInit_ex(ctx, EVP_aes_256_xts(), nullptr, xts_key_.data(),
                              tweak, encrypt ? 1 : 0) == 1 &&
            EVP_CipherUpdate(ctx, out.data(), &len, in.data(), int(in.size())) == 1;
  total = len;
  ok = ok && EVP_CipherFinal_ex(ctx, out.data() + total, &len) == 1;
  total += len;
  EVP_CIPHER_CTX_free(ctx);
  if (!ok || size_t(total) != in.size()) {
    throw std::runtime_error("AES-XTS cipher operation failed");
  }
  return out;
}

std::vector<uint8_t> SectorCipher::encrypt(uint64_t sector,
                                           std::span<const uint8_t> plaintext) const {
  return run(sector, plaintext, true);
}

std::vector<uint8_t> SectorCipher::decrypt(uint64_t sector,
                                           std::span<const uint8_t> ciphertext) const {
  return run(sector, ciphertext, false);
}

std::vector<uint8_t> RandomStream::bytes(size_t n) {
  std::vector<uint8_t> out(n);
  size_t i = 0;
  while (i + 8 <= n) {
    uint64_t v = rng_();
    std::memcpy(out.data() + i, &v, 8);
    i += 8;
  }
  if (i < n) {
    uint64_t v = rng_();
    std::memcpy(out.data() + i, &v, n - i);
  }
  return out;
}

uint64_t RandomStream::below(uint64_t n) {
  std::uniform_int_distribution<uint64_t> dist(0, n - 1);
  return dist(rng_);
}

} // namespace flashden
