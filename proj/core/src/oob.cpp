#include "flashden/oob.hpp"

#include "flashden/crypto.hpp"
#include "flashden/errors.hpp"
#include "flashden/nand_chip.hpp"

namespace flashden {

namespace {

void put_be64(std::vector<uint8_t>& out, size_t off, uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out[off + i] = uint8_t(v >> (8 * (7 - i)));
  }
}

uint64_t get_be64(std::span<const uint8_t> in, size_t off) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v = (v << 8) | in[off + i];
  }
  return v;
}

} // namespace

std::vector<uint8_t> OobRecord::encode(size_t oob_bytes) const {
  std::vector<uint8_t> out(oob_bytes, 0xFF);
  out[0] = kMagic0;
  out[1] = kMagic1;
  put_be64(out, 2, lba);
  put_be64(out, 10, seq);
  out[kValidFlagOffset] = valid_flag;
  const uint32_t crc = crc32_of({out.data(), 18});
  out[19] = uint8_t(crc >> 24);
  out[20] = uint8_t(crc >> 16);
  out[21] = uint8_t(crc >> 8);
  out[22] = uint8_t(crc);
  return out;
}

std::optional<OobRecord> OobRecord::decode(std::span<const uint8_t> oob) {
  if (oob.size() < kRecordBytes) {
    raise(Err::CorruptOob, "spare area smaller than record");
  }
  if (all_ff(oob)) {
    return std::nullopt;
  }
  if (oob[0] != kMagic0 || oob[1] != kMagic1) {
    raise(Err::CorruptOob, "bad spare-area magic");
  }
  const uint32_t stored = (uint32_t(oob[19]) << 24) | (uint32_t(oob[20]) << 16) |
                          (uint32_t(oob[21]) << 8) | uint32_t(oob[22]);
  if (stored != crc32_of(oob.subspan(0, 18))) {
    raise(Err::CorruptOob, "spare-area CRC mismatch");
  }
  OobRecord rec;
  rec.lba = get_be64(oob, 2);
  rec.seq = get_be64(oob, 10);
  rec.valid_flag = oob[kValidFlagOffset];
  return rec;
}

} // namespace flashden
