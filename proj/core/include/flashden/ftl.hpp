#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "flashden/nand_chip.hpp"

namespace flashden {

class FlashImage;

struct PhysAddr {
  uint32_t block = 0;
  uint32_t page = 0;

  bool operator==(const PhysAddr&) const = default;
};

struct GcStats {
  uint32_t victim_block = 0;
  uint32_t valid_pages_moved = 0;
  uint32_t erased = 0;
};

/// Log-structured page-mapping FTL over a NandChip. One logical sector is
/// one flash page. Host writes go to one open block; GC relocations go to
/// a second open block so reclaimed data does not share blocks with fresh
/// host writes. The mapping lives in memory; the authoritative copy is
/// the per-page OOB record, which rebuild_mapping() recovers from a dump.
class Ftl {
public:
  explicit Ftl(const FlashGeometry& geometry, uint32_t gc_threshold = 2,
               uint32_t wl_delta = 4);

  uint64_t capacity_sectors() const { return capacity_; }
  uint32_t sector_bytes() const { return chip_.geometry().page_data_bytes; }

  void write(uint64_t lba, std::span<const uint8_t> data);
  std::vector<uint8_t> read(uint64_t lba) const;

  GcStats garbage_collect();
  void wear_level();
  void retire_bad_block(uint32_t block);

  const NandChip& chip() const { return chip_; }
  NandChip& chip_mut() { return chip_; }

  /// Live logical-to-physical map; UNMAPPED sectors are absent.
  std::unordered_map<uint64_t, PhysAddr> live_map() const;

  /// Reconstruct the map from a raw dump by scanning OOB records and
  /// keeping the highest-seq valid page per sector.
  static std::unordered_map<uint64_t, PhysAddr> rebuild_mapping(
      const FlashImage& image);

  uint64_t gc_runs() const { return gc_runs_; }
  uint64_t wl_migrations() const { return wl_migrations_; }
  uint64_t free_blocks() const { return free_pool_.size(); }

private:
  struct OpenBlock {
    uint32_t block = 0;
    uint32_t next_page = 0;
  };

  enum class Stream { Host, Gc };

  void check_lba(uint64_t lba) const;
  uint32_t take_free_block();
  PhysAddr append(Stream stream, uint64_t lba, std::span<const uint8_t> data);
  void invalidate(PhysAddr addr);
  void ensure_host_space();
  GcStats collect_once();
  std::optional<uint32_t> pick_gc_victim() const;
  bool is_open(uint32_t block) const;
  void release_block(uint32_t block);
  void maybe_wear_level();
  bool wear_level_once(bool require_trigger);

  NandChip chip_;
  uint64_t capacity_;
  uint32_t gc_threshold_;
  uint32_t wl_delta_;

  std::vector<std::optional<PhysAddr>> map_;
  std::deque<uint32_t> free_pool_; // LIFO reuse; freed blocks go to the front
  std::vector<bool> in_free_pool_;
  std::optional<OpenBlock> host_open_;
  std::optional<OpenBlock> gc_open_;
  uint64_t global_seq_ = 0;

  std::vector<uint32_t> invalid_count_;
  std::vector<uint32_t> valid_count_;

  uint64_t gc_runs_ = 0;
  uint64_t wl_migrations_ = 0;
  bool in_wear_level_ = false;
};

} // namespace flashden
