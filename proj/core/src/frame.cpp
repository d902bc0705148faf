#include "flashden/frame.hpp"

#include <cstring>

#include "flashden/crypto.hpp"
#include "flashden/errors.hpp"

namespace flashden {

namespace {

void put_be32_at(std::vector<uint8_t>& buf, size_t off, uint32_t v) {
  buf[off] = uint8_t(v >> 24);
  buf[off + 1] = uint8_t(v >> 16);
  buf[off + 2] = uint8_t(v >> 8);
  buf[off + 3] = uint8_t(v);
}

uint32_t get_be32_at(std::span<const uint8_t> buf, size_t off) {
  return (uint32_t(buf[off]) << 24) | (uint32_t(buf[off + 1]) << 16) |
         (uint32_t(buf[off + 2]) << 8) | uint32_t(buf[off + 3]);
}

} // namespace

std::vector<uint8_t> make_frame(std::span<const char, 8> magic, uint32_t file_id,
                                uint32_t seq, std::span<const uint8_t> payload,
                                size_t page_bytes) {
  if (payload.size() > frame_payload_capacity(page_bytes)) {
    raise(Err::OutOfRange, "frame payload too large");
  }
  std::vector<uint8_t> page(page_bytes, 0x00);
  std::memcpy(page.data(), magic.data(), kFrameMagicBytes);
  put_be32_at(page, 8, file_id);
  put_be32_at(page, 12, seq);
  std::memcpy(page.data() + kFrameHeaderBytes, payload.data(), payload.size());
  const uint32_t crc = crc32_of({page.data(), page_bytes - kFrameCrcBytes});
  put_be32_at(page, page_bytes - kFrameCrcBytes, crc);
  return page;
}

bool verify_frame(std::span<const uint8_t> page, std::span<const char, 8> magic) {
  if (page.size() < kFrameHeaderBytes + kFrameCrcBytes) {
    return false;
  }
  if (std::memcmp(page.data(), magic.data(), kFrameMagicBytes) != 0) {
    return false;
  }
  const uint32_t stored = get_be32_at(page, page.size() - kFrameCrcBytes);
  const uint32_t actual =
      crc32_of({page.data(), page.size() - kFrameCrcBytes});
  return stored == actual;
}

bool verify_any_frame(std::span<const uint8_t> page) {
  return verify_frame(page, kPublicFrameMagic) ||
         verify_frame(page, kHiddenFrameMagic);
}

FrameHeader parse_frame_header(std::span<const uint8_t> page) {
  FrameHeader h;
  h.file_id = get_be32_at(page, 8);
  h.seq = get_be32_at(page, 12);
  return h;
}

} // namespace flashden
