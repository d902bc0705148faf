#pragma once

#include <cstddef>
#include <cstdint>

namespace flashden {

/// Physical layout of the simulated NAND chip. Defaults model a small
/// 64MB part with 2048+64-byte pages and 128KB blocks.
struct FlashGeometry {
  uint32_t page_data_bytes = 2048;
  uint32_t page_oob_bytes = 64;
  uint32_t pages_per_block = 64;
  uint32_t block_count = 512;
  double overprovision_fraction = 0.10;

  uint32_t page_total_bytes() const { return page_data_bytes + page_oob_bytes; }
  uint64_t block_data_bytes() const {
    return uint64_t(page_data_bytes) * pages_per_block;
  }
  uint64_t total_pages() const { return uint64_t(block_count) * pages_per_block; }

  /// Blocks exported as logical capacity; the rest is overprovisioning
  /// kept back for GC headroom.
  uint32_t exported_blocks() const {
    return uint32_t(double(block_count) * (1.0 - overprovision_fraction));
  }
  uint64_t exported_sectors() const {
    return uint64_t(exported_blocks()) * pages_per_block;
  }

  bool valid() const {
    return page_data_bytes >= 1 && page_oob_bytes >= 1 && pages_per_block >= 1 &&
           block_count >= 1 && overprovision_fraction >= 0.0 &&
           overprovision_fraction < 1.0 && exported_blocks() >= 1;
  }
};

} // namespace flashden
