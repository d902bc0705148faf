#include "flashden/stegfs.hpp"

#include <algorithm>

#include "flashden/errors.hpp"
#include "flashden/frame.hpp"

namespace flashden {

namespace {

SectorIo plaintext_io(Ftl& ftl) {
  SectorIo io;
  io.sector_bytes = ftl.sector_bytes();
  io.write = [&ftl](uint64_t sector, std::span<const uint8_t> page) {
    ftl.write(sector, page);
  };
  io.read = [&ftl](uint64_t sector) { return ftl.read(sector); };
  return io;
}

} // namespace

void steg_init(Ftl& ftl, const StegConfig& config, RandomStream& rng) {
  for (uint64_t s = 0; s < config.disk_sectors; ++s) {
    ftl.write(s, rng.bytes(ftl.sector_bytes()));
  }
}

StegFs::StegFs(Ftl& ftl, StegConfig config)
    : ftl_(ftl),
      config_(config),
      fat_(plaintext_io(ftl), kPublicFrameMagic, 0, config.disk_sectors) {}

std::vector<uint64_t> StegFs::fat_write(uint32_t file_id,
                                        std::span<const uint8_t> bytes) {
  return fat_.append_file(file_id, bytes);
}

uint64_t StegFs::derive_slot(uint32_t file_id, uint32_t replica, uint32_t page) {
  for (uint32_t attempt = 0; attempt < config_.max_slot_attempts; ++attempt) {
    const uint64_t s = prf_u64(config_.steg_key, "steg-slot",
                               {file_id, replica, page, attempt}) %
                       config_.disk_sectors;
    if (s >= public_watermark() && steg_sectors_.count(s) == 0) {
      return s;
    }
  }
  raise(Err::NoFreeSlot, "could not derive a replica slot");
}

std::vector<std::vector<uint64_t>> StegFs::steg_write(
    uint32_t file_id, std::span<const uint8_t> bytes) {
  const size_t cap = frame_payload_capacity(ftl_.sector_bytes());
  const size_t pages = std::max<size_t>(1, (bytes.size() + cap - 1) / cap);
  SectorCipher cipher(config_.steg_key);
  std::vector<std::vector<uint64_t>> replicas;
  for (uint32_t r = 0; r < config_.replica_count; ++r) {
    std::vector<uint64_t> sectors;
    sectors.reserve(pages);
    for (uint32_t p = 0; p < pages; ++p) {
      const size_t off = size_t(p) * cap;
      const size_t len =
          std::min(cap, bytes.size() - std::min(off, bytes.size()));
      auto frame = make_frame(kHiddenFrameMagic, file_id, p,
                              bytes.subspan(off, len), ftl_.sector_bytes());
      const uint64_t sector = derive_slot(file_id, r, p);
      steg_sectors_.insert(sector);
      ftl_.write(sector, cipher.encrypt(sector, frame));
      sectors.push_back(sector);
    }
    replicas.push_back(std::move(sectors));
  }
  return replicas;
}

std::vector<uint8_t> StegFs::steg_read(const std::vector<uint64_t>& sectors,
                                       size_t size_bytes) const {
  const size_t cap = frame_payload_capacity(ftl_.sector_bytes());
  SectorCipher cipher(config_.steg_key);
  std::vector<uint8_t> out;
  out.reserve(size_bytes);
  for (uint64_t s : sectors) {
    auto page = cipher.decrypt(s, ftl_.read(s));
    const size_t take = std::min(cap, size_bytes - out.size());
    out.insert(out.end(), page.begin() + kFrameHeaderBytes,
               page.begin() + kFrameHeaderBytes + take);
    if (out.size() == size_bytes) {
      break;
    }
  }
  return out;
}

} // namespace flashden
