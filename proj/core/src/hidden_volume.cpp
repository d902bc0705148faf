#include "flashden/hidden_volume.hpp"

#include "flashden/errors.hpp"

namespace flashden {

uint64_t hidden_offset_for(const Key256& true_key, uint64_t logical_sectors,
                           uint64_t hidden_size_sectors) {
  const uint64_t half = logical_sectors / 2;
  const uint64_t slack = half - hidden_size_sectors;
  if (slack == 0) {
    return half;
  }
  return half + prf_u64(true_key, "hidden-offset") % slack;
}

VolumeLayout create_volume(Ftl& ftl, const std::string& decoy_pass,
                           const std::string& true_pass,
                           uint64_t hidden_size_sectors, RandomStream& rng) {
  VolumeLayout layout;
  layout.logical_sectors = ftl.capacity_sectors();
  layout.hidden_size_sectors = hidden_size_sectors;
  if (hidden_size_sectors > layout.logical_sectors / 2) {
    raise(Err::HiddenTooLarge, "hidden volume does not fit in second half");
  }
  layout.decoy_key = derive_key(decoy_pass);
  layout.true_key = derive_key(true_pass);
  layout.hidden_offset_sector = hidden_offset_for(
      layout.true_key, layout.logical_sectors, hidden_size_sectors);
  // Initial fill: every sector written once with random bytes, routed
  // through the FTL like any other host write.
  for (uint64_t s = 0; s < layout.logical_sectors; ++s) {
    ftl.write(s, rng.bytes(ftl.sector_bytes()));
  }
  return layout;
}

void public_write(const VolumeLayout& layout, Ftl& ftl, uint64_t sector,
                  std::span<const uint8_t> plaintext) {
  if (sector >= layout.logical_sectors) {
    raise(Err::OutOfRange, "public sector out of range");
  }
  SectorCipher cipher(layout.decoy_key);
  ftl.write(sector, cipher.encrypt(sector, plaintext));
}

std::vector<uint8_t> public_read(const VolumeLayout& layout, const Ftl& ftl,
                                 uint64_t sector) {
  if (sector >= layout.logical_sectors) {
    raise(Err::OutOfRange, "public sector out of range");
  }
  SectorCipher cipher(layout.decoy_key);
  return cipher.decrypt(sector, ftl.read(sector));
}

void hidden_write(const VolumeLayout& layout, Ftl& ftl, uint64_t rel_sector,
                  std::span<const uint8_t> plaintext) {
  if (rel_sector >= layout.hidden_size_sectors) {
    raise(Err::OutOfRange, "hidden sector out of range");
  }
  const uint64_t abs = layout.hidden_offset_sector + rel_sector;
  SectorCipher cipher(layout.true_key);
  ftl.write(abs, cipher.encrypt(abs, plaintext));
}

std::vector<uint8_t> hidden_read(const VolumeLayout& layout, const Ftl& ftl,
                                 uint64_t rel_sector) {
  if (rel_sector >= layout.hidden_size_sectors) {
    raise(Err::OutOfRange, "hidden sector out of range");
  }
  const uint64_t abs = layout.hidden_offset_sector + rel_sector;
  SectorCipher cipher(layout.true_key);
  return cipher.decrypt(abs, ftl.read(abs));
}

SectorIo public_io(const VolumeLayout& layout, Ftl& ftl) {
  SectorIo io;
  io.sector_bytes = ftl.sector_bytes();
  io.write = [&layout, &ftl](uint64_t sector, std::span<const uint8_t> page) {
    public_write(layout, ftl, sector, page);
  };
  io.read = [&layout, &ftl](uint64_t sector) {
    return public_read(layout, ftl, sector);
  };
  return io;
}

SectorIo hidden_io(const VolumeLayout& layout, Ftl& ftl) {
  SectorIo io;
  io.sector_bytes = ftl.sector_bytes();
  io.write = [&layout, &ftl](uint64_t sector, std::span<const uint8_t> page) {
    hidden_write(layout, ftl, sector, page);
  };
  io.read = [&layout, &ftl](uint64_t sector) {
    return hidden_read(layout, ftl, sector);
  };
  return io;
}

} // namespace flashden
