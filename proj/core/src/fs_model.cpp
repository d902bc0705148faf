#include "flashden/fs_model.hpp"

#include <algorithm>

#include "flashden/errors.hpp"

namespace flashden {

uint64_t SeqAllocator::allocate() {
  if (next_ >= end_) {
    raise(Err::RegionFull, "sequential region exhausted");
  }
  return next_++;
}

FsVolume::FsVolume(SectorIo io, std::span<const char, 8> magic,
                   uint64_t region_start, uint64_t region_end)
    : io_(std::move(io)), alloc_(region_start, region_end) {
  std::copy(magic.begin(), magic.end(), magic_.begin());
}

std::vector<uint64_t> FsVolume::append_file(uint32_t file_id,
                                            std::span<const uint8_t> bytes) {
  const size_t cap = payload_capacity();
  // A zero-byte file still takes one header-only page.
  const size_t pages = std::max<size_t>(1, (bytes.size() + cap - 1) / cap);
  std::vector<uint64_t> sectors;
  sectors.reserve(pages);
  for (size_t i = 0; i < pages; ++i) {
    const size_t off = i * cap;
    const size_t len = std::min(cap, bytes.size() - std::min(off, bytes.size()));
    auto frame = make_frame(magic_, file_id, uint32_t(i),
                            bytes.subspan(off, len), io_.sector_bytes);
    const uint64_t sector = alloc_.allocate();
    io_.write(sector, frame);
    written_[sector] = SectorState{file_id, uint32_t(i)};
    sectors.push_back(sector);
  }
  return sectors;
}

void FsVolume::modify_in_place(uint64_t sector,
                               std::span<const uint8_t> new_payload) {
  auto it = written_.find(sector);
  if (it == written_.end()) {
    raise(Err::UnknownSector, "sector was not written by this volume");
  }
  it->second.seq += 1;
  auto frame = make_frame(magic_, it->second.file_id, it->second.seq,
                          new_payload, io_.sector_bytes);
  io_.write(sector, frame);
}

std::vector<uint8_t> FsVolume::read_file(const std::vector<uint64_t>& sectors,
                                         size_t size_bytes) const {
  std::vector<uint8_t> out;
  out.reserve(size_bytes);
  for (uint64_t s : sectors) {
    auto page = io_.read(s);
    const size_t take =
        std::min(payload_capacity(), size_bytes - out.size());
    out.insert(out.end(), page.begin() + kFrameHeaderBytes,
               page.begin() + kFrameHeaderBytes + take);
    if (out.size() == size_bytes) {
      break;
    }
  }
  return out;
}

} // namespace flashden
