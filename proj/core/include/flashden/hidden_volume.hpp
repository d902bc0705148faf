#pragma once

#include <cstdint>
#include <string>

#include "flashden/crypto.hpp"
#include "flashden/fs_model.hpp"
#include "flashden/ftl.hpp"

namespace flashden {

/// Hidden-volume geometry plus key material. The hidden offset is not
/// stored anywhere on disk; it is re-derived from the true key.
struct VolumeLayout {
  uint64_t logical_sectors = 0;
  uint64_t hidden_size_sectors = 0;
  uint64_t hidden_offset_sector = 0;
  Key256 decoy_key{};
  Key256 true_key{};
};

/// Compute where the hidden volume starts for a given true key: somewhere
/// in the second half of the disk, keyed so the same passphrase always
/// yields the same offset.
uint64_t hidden_offset_for(const Key256& true_key, uint64_t logical_sectors,
                           uint64_t hidden_size_sectors);

/// Format the device: fill every logical sector with random bytes through
/// the FTL, then derive both keys and the hidden offset.
VolumeLayout create_volume(Ftl& ftl, const std::string& decoy_pass,
                           const std::string& true_pass,
                           uint64_t hidden_size_sectors, RandomStream& rng);

void public_write(const VolumeLayout& layout, Ftl& ftl, uint64_t sector,
                  std::span<const uint8_t> plaintext);
std::vector<uint8_t> public_read(const VolumeLayout& layout, const Ftl& ftl,
                                 uint64_t sector);

void hidden_write(const VolumeLayout& layout, Ftl& ftl, uint64_t rel_sector,
                  std::span<const uint8_t> plaintext);
std::vector<uint8_t> hidden_read(const VolumeLayout& layout, const Ftl& ftl,
                                 uint64_t rel_sector);

/// SectorIo views for the fs model: public addresses are absolute,
/// hidden addresses are relative to the hidden offset.
SectorIo public_io(const VolumeLayout& layout, Ftl& ftl);
SectorIo hidden_io(const VolumeLayout& layout, Ftl& ftl);

} // namespace flashden
