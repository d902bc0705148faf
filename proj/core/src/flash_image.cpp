#include "flashden/flash_image.hpp"

#include <cstring>
#include <fstream>

#include "flashden/errors.hpp"
#include "flashden/oob.hpp"

namespace flashden {

namespace {

void put_be32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(uint8_t(v >> 24));
  out.push_back(uint8_t(v >> 16));
  out.push_back(uint8_t(v >> 8));
  out.push_back(uint8_t(v));
}

uint32_t get_be32(const uint8_t* p) {
  return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) |
         (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

} // namespace

FlashImage::FlashImage(const FlashGeometry& geometry, std::vector<uint8_t> pages)
    : geom_(geometry), pages_(std::move(pages)) {
  const size_t expected = size_t(geom_.page_total_bytes()) * geom_.total_pages();
  if (!geom_.valid() || pages_.size() != expected) {
    raise(Err::MalformedImage, "image payload does not match geometry");
  }
}

const uint8_t* FlashImage::page_ptr(uint32_t block, uint32_t page) const {
  if (block >= geom_.block_count || page >= geom_.pages_per_block) {
    raise(Err::OutOfRange, "image page index out of range");
  }
  const size_t idx = (size_t(block) * geom_.pages_per_block + page) *
                     geom_.page_total_bytes();
  return pages_.data() + idx;
}

std::span<const uint8_t> FlashImage::page_data(uint32_t block, uint32_t page) const {
  return {page_ptr(block, page), geom_.page_data_bytes};
}

std::span<const uint8_t> FlashImage::page_oob(uint32_t block, uint32_t page) const {
  return {page_ptr(block, page) + geom_.page_data_bytes, geom_.page_oob_bytes};
}

std::vector<uint8_t> FlashImage::to_bytes() const {
  std::vector<uint8_t> out;
  out.reserve(byte_size());
  out.insert(out.end(), kMagic, kMagic + sizeof(kMagic));
  put_be32(out, geom_.page_data_bytes);
  put_be32(out, geom_.page_oob_bytes);
  put_be32(out, geom_.pages_per_block);
  put_be32(out, geom_.block_count);
  out.insert(out.end(), 8, 0x00);
  out.insert(out.end(), pages_.begin(), pages_.end());
  return out;
}

FlashImage FlashImage::from_bytes(std::span<const uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    raise(Err::MalformedImage, "bad image header");
  }
  FlashGeometry g;
  g.page_data_bytes = get_be32(bytes.data() + 8);
  g.page_oob_bytes = get_be32(bytes.data() + 12);
  g.pages_per_block = get_be32(bytes.data() + 16);
  g.block_count = get_be32(bytes.data() + 20);
  if (!g.valid()) {
    raise(Err::MalformedImage, "bad geometry in image header");
  }
  const size_t expected = size_t(g.page_total_bytes()) * g.total_pages();
  if (bytes.size() != kHeaderBytes + expected) {
    raise(Err::MalformedImage, "truncated or oversized image");
  }
  std::vector<uint8_t> pages(bytes.begin() + kHeaderBytes, bytes.end());
  return FlashImage(g, std::move(pages));
}

void FlashImage::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    raise(Err::MalformedImage, "cannot open image file for writing: " + path);
  }
  auto bytes = to_bytes();
  f.write(reinterpret_cast<const char*>(bytes.data()),
          std::streamsize(bytes.size()));
}

FlashImage FlashImage::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    raise(Err::MalformedImage, "cannot open image file: " + path);
  }
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  return from_bytes(bytes);
}

} // namespace flashden
