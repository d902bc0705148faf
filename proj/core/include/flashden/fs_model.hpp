#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "flashden/frame.hpp"

namespace flashden {

/// Sector-granular I/O a file-system model writes through. The concrete
/// write path (decoy-encrypted, true-key-encrypted, or plaintext) is
/// supplied by the volume layer.
struct SectorIo {
  std::function<void(uint64_t sector, std::span<const uint8_t> page)> write;
  std::function<std::vector<uint8_t>(uint64_t sector)> read;
  uint32_t sector_bytes = 0;
};

/// Strictly increasing sector allocator over a half-open range, imitating
/// a sequential-writing FAT/exFAT layout.
class SeqAllocator {
public:
  SeqAllocator(uint64_t start, uint64_t end) : next_(start), end_(end) {}

  uint64_t allocate(); // RegionFull when exhausted
  uint64_t next() const { return next_; }
  uint64_t end() const { return end_; }

private:
  uint64_t next_;
  uint64_t end_;
};

/// Behavioral file-system model: appends files as framed pages at
/// consecutive sectors and supports in-place modification (same logical
/// sector, bumped frame seq).
class FsVolume {
public:
  FsVolume(SectorIo io, std::span<const char, 8> magic, uint64_t region_start,
           uint64_t region_end);

  std::vector<uint64_t> append_file(uint32_t file_id,
                                    std::span<const uint8_t> bytes);
  void modify_in_place(uint64_t sector, std::span<const uint8_t> new_payload);

  std::vector<uint8_t> read_file(const std::vector<uint64_t>& sectors,
                                 size_t size_bytes) const;

  uint64_t next_sector() const { return alloc_.next(); }
  size_t payload_capacity() const {
    return frame_payload_capacity(io_.sector_bytes);
  }

private:
  struct SectorState {
    uint32_t file_id = 0;
    uint32_t seq = 0;
  };

  SectorIo io_;
  std::array<char, 8> magic_;
  SeqAllocator alloc_;
  std::unordered_map<uint64_t, SectorState> written_;
};

} // namespace flashden
