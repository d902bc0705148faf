#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "flashden/crypto.hpp"
#include "flashden/fs_model.hpp"
#include "flashden/ftl.hpp"

namespace flashden {

struct StegConfig {
  uint32_t replica_count = 4;
  Key256 steg_key{};
  uint64_t disk_sectors = 0;
  uint32_t max_slot_attempts = 64;
};

/// Fill the whole logical space with random bytes through the FTL.
void steg_init(Ftl& ftl, const StegConfig& config, RandomStream& rng);

/// Steganographic file-system model: plaintext FAT-style public writes
/// from sector 0, plus k encrypted replicas of each hidden file at
/// key-derived pseudo-random sectors.
class StegFs {
public:
  StegFs(Ftl& ftl, StegConfig config);

  std::vector<uint64_t> fat_write(uint32_t file_id,
                                  std::span<const uint8_t> bytes);

  /// Writes replica_count encrypted copies; returns one sector list per
  /// replica. NoFreeSlot if a slot cannot be derived clear of the public
  /// region within max_slot_attempts re-derivations.
  std::vector<std::vector<uint64_t>> steg_write(uint32_t file_id,
                                                std::span<const uint8_t> bytes);

  std::vector<uint8_t> steg_read(const std::vector<uint64_t>& sectors,
                                 size_t size_bytes) const;

  uint64_t public_watermark() const { return fat_.next_sector(); }

private:
  uint64_t derive_slot(uint32_t file_id, uint32_t replica, uint32_t page);

  Ftl& ftl_;
  StegConfig config_;
  FsVolume fat_;
  std::set<uint64_t> steg_sectors_;
};

} // namespace flashden
