#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace flashden {

/// Verifiable page framing used by the file-system models. A framed page
/// is: magic(8) | file_id(4 BE) | seq(4 BE) | payload | crc32(4 BE, over
/// everything before it). Verification needs both the 8-byte magic and
/// the CRC to match, so a random page passes with probability ~2^-96.
inline constexpr std::array<char, 8> kPublicFrameMagic = {'P', 'U', 'B', 'F',
                                                          'S', '0', '1', '\0'};
inline constexpr std::array<char, 8> kHiddenFrameMagic = {'H', 'I', 'D', 'F',
                                                          'S', '0', '1', '\0'};

inline constexpr size_t kFrameMagicBytes = 8;
inline constexpr size_t kFrameHeaderBytes = 8 + 4 + 4;
inline constexpr size_t kFrameCrcBytes = 4;
inline constexpr size_t kFrameOverheadBytes = kFrameHeaderBytes + kFrameCrcBytes;

inline constexpr size_t frame_payload_capacity(size_t page_bytes) {
  return page_bytes - kFrameOverheadBytes;
}

struct FrameHeader {
  uint32_t file_id = 0;
  uint32_t seq = 0;
};

std::vector<uint8_t> make_frame(std::span<const char, 8> magic, uint32_t file_id,
                                uint32_t seq, std::span<const uint8_t> payload,
                                size_t page_bytes);

bool verify_frame(std::span<const uint8_t> page, std::span<const char, 8> magic);
bool verify_any_frame(std::span<const uint8_t> page);

FrameHeader parse_frame_header(std::span<const uint8_t> page);

} // namespace flashden
