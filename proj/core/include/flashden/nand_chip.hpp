#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "flashden/geometry.hpp"

namespace flashden {

class FlashImage;

struct PageContent {
  std::vector<uint8_t> data;
  std::vector<uint8_t> oob;
};

/// Raw NAND chip model. Enforces the physical rules the rest of the
/// stack is built around: erase-before-program, whole-block erase,
/// sequential page programming within a block, and bit-clearing-only
/// partial programs (used for the OOB valid flag).
class NandChip {
public:
  explicit NandChip(const FlashGeometry& geometry);

  const FlashGeometry& geometry() const { return geom_; }

  void program_page(uint32_t block, uint32_t page, const PageContent& content);
  void erase_block(uint32_t block);
  PageContent read_page(uint32_t block, uint32_t page) const;

  std::span<const uint8_t> page_data(uint32_t block, uint32_t page) const;
  std::span<const uint8_t> page_oob(uint32_t block, uint32_t page) const;

  /// Partial program that drives the OOB valid flag 0xFF -> 0x00.
  /// Idempotent on already-invalid pages; only clears bits.
  void clear_oob_valid_flag(uint32_t block, uint32_t page);

  void mark_bad(uint32_t block);
  bool is_bad(uint32_t block) const { return bad_blocks_.count(block) != 0; }
  const std::set<uint32_t>& bad_blocks() const { return bad_blocks_; }

  uint32_t erase_count(uint32_t block) const;
  uint64_t total_erases() const { return total_erases_; }

  /// Pages programmed so far in this block (next programmable index).
  uint32_t watermark(uint32_t block) const;

  FlashImage dump_image() const;

private:
  struct Block {
    std::vector<uint8_t> bytes; // pages_per_block * (data+oob), page-contiguous
    uint32_t watermark = 0;
    uint32_t erase_count = 0;
  };

  void check_block(uint32_t block) const;
  uint8_t* page_ptr(uint32_t block, uint32_t page);
  const uint8_t* page_ptr(uint32_t block, uint32_t page) const;

  FlashGeometry geom_;
  std::vector<Block> blocks_;
  std::set<uint32_t> bad_blocks_;
  uint64_t total_erases_ = 0;
};

} // namespace flashden
