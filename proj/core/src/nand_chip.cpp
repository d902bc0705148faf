#include "flashden/nand_chip.hpp"

#include <algorithm>
#include <cstring>

#include "flashden/errors.hpp"
#include "flashden/flash_image.hpp"
#include "flashden/oob.hpp"

namespace flashden {

bool all_ff(std::span<const uint8_t> bytes) {
  return std::all_of(bytes.begin(), bytes.end(),
                     [](uint8_t b) { return b == 0xFF; });
}

NandChip::NandChip(const FlashGeometry& geometry) : geom_(geometry) {
  if (!geom_.valid()) {
    raise(Err::OutOfRange, "invalid flash geometry");
  }
  blocks_.resize(geom_.block_count);
  const size_t block_bytes = size_t(geom_.page_total_bytes()) * geom_.pages_per_block;
  for (auto& b : blocks_) {
    b.bytes.assign(block_bytes, 0xFF);
  }
}

void NandChip::check_block(uint32_t block) const {
  if (block >= geom_.block_count) {
    raise(Err::OutOfRange, "block index out of range");
  }
}

uint8_t* NandChip::page_ptr(uint32_t block, uint32_t page) {
  return blocks_[block].bytes.data() + size_t(page) * geom_.page_total_bytes();
}

const uint8_t* NandChip::page_ptr(uint32_t block, uint32_t page) const {
  return blocks_[block].bytes.data() + size_t(page) * geom_.page_total_bytes();
}

void NandChip::program_page(uint32_t block, uint32_t page,
                            const PageContent& content) {
  check_block(block);
  if (page >= geom_.pages_per_block) {
    raise(Err::OutOfRange, "page index out of range");
  }
  if (is_bad(block)) {
    raise(Err::BadBlockAccess, "program on retired bad block");
  }
  if (content.data.size() != geom_.page_data_bytes ||
      content.oob.size() != geom_.page_oob_bytes) {
    raise(Err::OutOfRange, "page content size mismatch");
  }
  Block& b = blocks_[block];
  const uint8_t* p = page_ptr(block, page);
  if (!all_ff({p, geom_.page_total_bytes()})) {
    raise(Err::ProgramOnProgrammedPage, "page already programmed");
  }
  if (page != b.watermark) {
    raise(Err::NonSequentialProgram, "pages must be programmed in order");
  }
  uint8_t* dst = page_ptr(block, page);
  std::memcpy(dst, content.data.data(), geom_.page_data_bytes);
  std::memcpy(dst + geom_.page_data_bytes, content.oob.data(), geom_.page_oob_bytes);
  b.watermark = page + 1;
}

void NandChip::erase_block(uint32_t block) {
  check_block(block);
  if (is_bad(block)) {
    raise(Err::BadBlockAccess, "erase on retired bad block");
  }
  Block& b = blocks_[block];
  std::fill(b.bytes.begin(), b.bytes.end(), 0xFF);
  b.watermark = 0;
  b.erase_count += 1;
  total_erases_ += 1;
}

PageContent NandChip::read_page(uint32_t block, uint32_t page) const {
  check_block(block);
  if (page >= geom_.pages_per_block) {
    raise(Err::OutOfRange, "page index out of range");
  }
  const uint8_t* p = page_ptr(block, page);
  PageContent out;
  out.data.assign(p, p + geom_.page_data_bytes);
  out.oob.assign(p + geom_.page_data_bytes, p + geom_.page_total_bytes());
  return out;
}

std::span<const uint8_t> NandChip::page_data(uint32_t block, uint32_t page) const {
  check_block(block);
  if (page >= geom_.pages_per_block) {
    raise(Err::OutOfRange, "page index out of range");
  }
  return {page_ptr(block, page), geom_.page_data_bytes};
}

std::span<const uint8_t> NandChip::page_oob(uint32_t block, uint32_t page) const {
  check_block(block);
  if (page >= geom_.pages_per_block) {
    raise(Err::OutOfRange, "page index out of range");
  }
  return {page_ptr(block, page) + geom_.page_data_bytes, geom_.page_oob_bytes};
}

void NandChip::clear_oob_valid_flag(uint32_t block, uint32_t page) {
  check_block(block);
  if (page >= geom_.pages_per_block) {
    raise(Err::OutOfRange, "page index out of range");
  }
  if (is_bad(block)) {
    raise(Err::BadBlockAccess, "partial program on retired bad block");
  }
  const uint8_t* p = page_ptr(block, page);
  if (all_ff({p, geom_.page_total_bytes()})) {
    raise(Err::PageNotProgrammed, "valid flag clear on unprogrammed page");
  }
  // Partial program: only 1 -> 0 transitions, here a single byte.
  uint8_t* flag = page_ptr(block, page) + geom_.page_data_bytes +
                  OobRecord::kValidFlagOffset;
  *flag = 0x00;
}

void NandChip::mark_bad(uint32_t block) {
  check_block(block);
  bad_blocks_.insert(block);
}

uint32_t NandChip::erase_count(uint32_t block) const {
  check_block(block);
  return blocks_[block].erase_count;
}

uint32_t NandChip::watermark(uint32_t block) const {
  check_block(block);
  return blocks_[block].watermark;
}

FlashImage NandChip::dump_image() const {
  std::vector<uint8_t> pages;
  pages.reserve(size_t(geom_.page_total_bytes()) * geom_.total_pages());
  for (const auto& b : blocks_) {
    pages.insert(pages.end(), b.bytes.begin(), b.bytes.end());
  }
  return FlashImage(geom_, std::move(pages));
}

} // namespace flashden
