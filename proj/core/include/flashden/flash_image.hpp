#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flashden/geometry.hpp"

namespace flashden {

/// Bit-exact raw dump of a chip: 32-byte header followed by every page,
/// block-major, data then OOB per page.
///
/// Header: "FDIMG001" | page_data_bytes(4 BE) | page_oob_bytes(4 BE) |
///         pages_per_block(4 BE) | block_count(4 BE) | 8 reserved zero bytes.
class FlashImage {
public:
  static constexpr char kMagic[8] = {'F', 'D', 'I', 'M', 'G', '0', '0', '1'};
  static constexpr size_t kHeaderBytes = 32;

  FlashImage(const FlashGeometry& geometry, std::vector<uint8_t> pages);

  const FlashGeometry& geometry() const { return geom_; }

  std::span<const uint8_t> page_data(uint32_t block, uint32_t page) const;
  std::span<const uint8_t> page_oob(uint32_t block, uint32_t page) const;

  std::vector<uint8_t> to_bytes() const;
  static FlashImage from_bytes(std::span<const uint8_t> bytes);

  void save(const std::string& path) const;
  static FlashImage load(const std::string& path);

  size_t byte_size() const { return kHeaderBytes + pages_.size(); }

private:
  const uint8_t* page_ptr(uint32_t block, uint32_t page) const;

  FlashGeometry geom_;
  std::vector<uint8_t> pages_;
};

} // namespace flashden
