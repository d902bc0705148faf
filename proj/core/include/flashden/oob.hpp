#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace flashden {

/// Per-page spare-area record: the FTL's self-description of what a
/// physical page holds. An all-0xFF spare area means "never programmed".
///
/// Layout: magic(2) | lba(8 BE) | seq(8 BE) | valid_flag(1) | crc32(4 BE),
/// remaining spare bytes 0xFF. The CRC covers magic|lba|seq.
struct OobRecord {
  static constexpr uint8_t kMagic0 = 0x4F;
  static constexpr uint8_t kMagic1 = 0x46;
  static constexpr size_t kValidFlagOffset = 18;
  static constexpr size_t kRecordBytes = 23;
  static constexpr uint8_t kValid = 0xFF;
  static constexpr uint8_t kInvalid = 0x00;

  uint64_t lba = 0;
  uint64_t seq = 0;
  uint8_t valid_flag = kValid;

  /// Encode into a spare area of `oob_bytes` total size.
  std::vector<uint8_t> encode(size_t oob_bytes) const;

  /// Decode from a spare area. Returns nullopt if the area is all 0xFF
  /// (unprogrammed). Throws CorruptOob if a record is present but its
  /// magic or CRC does not check out.
  static std::optional<OobRecord> decode(std::span<const uint8_t> oob);
};

bool all_ff(std::span<const uint8_t> bytes);

} // namespace flashden
