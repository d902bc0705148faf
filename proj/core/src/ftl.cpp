#include "flashden/ftl.hpp"

#include <algorithm>
#include <limits>

#include "flashden/errors.hpp"
#include "flashden/flash_image.hpp"
#include "flashden/oob.hpp"

namespace flashden {

Ftl::Ftl(const FlashGeometry& geometry, uint32_t gc_threshold, uint32_t wl_delta)
    : chip_(geometry),
      capacity_(geometry.exported_sectors()),
      gc_threshold_(gc_threshold),
      wl_delta_(wl_delta) {
  map_.resize(capacity_);
  in_free_pool_.assign(geometry.block_count, true);
  for (uint32_t b = 0; b < geometry.block_count; ++b) {
    free_pool_.push_back(b);
  }
  invalid_count_.assign(geometry.block_count, 0);
  valid_count_.assign(geometry.block_count, 0);
}

void Ftl::check_lba(uint64_t lba) const {
  if (lba >= capacity_) {
    raise(Err::OutOfLogicalRange, "logical sector beyond exported capacity");
  }
}

bool Ftl::is_open(uint32_t block) const {
  return (host_open_ && host_open_->block == block) ||
         (gc_open_ && gc_open_->block == block);
}

uint32_t Ftl::take_free_block() {
  if (free_pool_.empty()) {
    raise(Err::DeviceFull, "no free block available");
  }
  uint32_t b = free_pool_.front();
  free_pool_.pop_front();
  in_free_pool_[b] = false;
  return b;
}

void Ftl::release_block(uint32_t block) {
  chip_.erase_block(block);
  invalid_count_[block] = 0;
  valid_count_[block] = 0;
  free_pool_.push_front(block);
  in_free_pool_[block] = true;
  maybe_wear_level();
}

PhysAddr Ftl::append(Stream stream, uint64_t lba, std::span<const uint8_t> data) {
  auto& open = stream == Stream::Host ? host_open_ : gc_open_;
  if (!open) {
    open = OpenBlock{take_free_block(), 0};
  }
  OobRecord rec;
  rec.lba = lba;
  rec.seq = global_seq_++;
  rec.valid_flag = OobRecord::kValid;
  PageContent content;
  content.data.assign(data.begin(), data.end());
  content.oob = rec.encode(chip_.geometry().page_oob_bytes);
  const PhysAddr addr{open->block, open->next_page};
  chip_.program_page(addr.block, addr.page, content);
  valid_count_[addr.block] += 1;
  open->next_page += 1;
  if (open->next_page == chip_.geometry().pages_per_block) {
    open.reset(); // sealed
  }
  map_[lba] = addr;
  return addr;
}

void Ftl::invalidate(PhysAddr addr) {
  chip_.clear_oob_valid_flag(addr.block, addr.page);
  invalid_count_[addr.block] += 1;
  valid_count_[addr.block] -= 1;
}

void Ftl::ensure_host_space() {
  if (host_open_) {
    return;
  }
  while (free_pool_.size() < gc_threshold_) {
    if (!pick_gc_victim()) {
      break;
    }
    collect_once();
  }
  if (free_pool_.empty()) {
    raise(Err::DeviceFull, "no reclaimable space left");
  }
}

void Ftl::write(uint64_t lba, std::span<const uint8_t> data) {
  check_lba(lba);
  if (data.size() != sector_bytes()) {
    raise(Err::OutOfRange, "sector write must be exactly one page");
  }
  ensure_host_space();
  if (map_[lba]) {
    invalidate(*map_[lba]);
  }
  append(Stream::Host, lba, data);
}

std::vector<uint8_t> Ftl::read(uint64_t lba) const {
  check_lba(lba);
  if (!map_[lba]) {
    return std::vector<uint8_t>(sector_bytes(), 0xFF);
  }
  auto span = chip_.page_data(map_[lba]->block, map_[lba]->page);
  return {span.begin(), span.end()};
}

std::optional<uint32_t> Ftl::pick_gc_victim() const {
  std::optional<uint32_t> victim;
  uint32_t best = 0;
  for (uint32_t b = 0; b < chip_.geometry().block_count; ++b) {
    if (chip_.is_bad(b) || in_free_pool_[b] || is_open(b)) {
      continue;
    }
    if (invalid_count_[b] > best) {
      best = invalid_count_[b];
      victim = b;
    }
  }
  return victim;
}

GcStats Ftl::collect_once() {
  auto victim = pick_gc_victim();
  if (!victim) {
    raise(Err::NothingToReclaim, "no block has an invalid page");
  }
  GcStats stats;
  stats.victim_block = *victim;
  const uint32_t watermark = chip_.watermark(*victim);
  for (uint32_t p = 0; p < watermark; ++p) {
    auto rec = OobRecord::decode(chip_.page_oob(*victim, p));
    if (!rec || rec->valid_flag != OobRecord::kValid) {
      continue;
    }
    auto data = chip_.page_data(*victim, p);
    append(Stream::Gc, rec->lba, data);
    stats.valid_pages_moved += 1;
  }
  release_block(*victim);
  stats.erased = 1;
  gc_runs_ += 1;
  return stats;
}

GcStats Ftl::garbage_collect() { return collect_once(); }

bool Ftl::wear_level_once(bool require_trigger) {
  // M: smallest erase count among in-use blocks; N: largest among free.
  std::optional<uint32_t> m, n;
  for (uint32_t b = 0; b < chip_.geometry().block_count; ++b) {
    if (chip_.is_bad(b)) {
      continue;
    }
    if (in_free_pool_[b]) {
      if (!n || chip_.erase_count(b) > chip_.erase_count(*n)) {
        n = b;
      }
    } else if (!is_open(b)) {
      if (!m || chip_.erase_count(b) < chip_.erase_count(*m)) {
        m = b;
      }
    }
  }
  const bool triggered =
      m && n && chip_.erase_count(*n) >= chip_.erase_count(*m) &&
      chip_.erase_count(*n) - chip_.erase_count(*m) >= wl_delta_;
  if (!triggered) {
    if (require_trigger) {
      raise(Err::TriggerNotMet, "erase-count spread below wear-level delta");
    }
    return false;
  }
  // Verbatim page-for-page move so valid flags and sequence numbers
  // survive; the mapping is redirected for the still-valid pages.
  free_pool_.erase(std::find(free_pool_.begin(), free_pool_.end(), *n));
  in_free_pool_[*n] = false;
  const uint32_t watermark = chip_.watermark(*m);
  for (uint32_t p = 0; p < watermark; ++p) {
    chip_.program_page(*n, p, chip_.read_page(*m, p));
    auto rec = OobRecord::decode(chip_.page_oob(*m, p));
    if (rec && rec->valid_flag == OobRecord::kValid) {
      map_[rec->lba] = PhysAddr{*n, p};
    }
  }
  valid_count_[*n] = valid_count_[*m];
  invalid_count_[*n] = invalid_count_[*m];
  release_block(*m);
  wl_migrations_ += 1;
  return true;
}

void Ftl::wear_level() {
  in_wear_level_ = true;
  try {
    wear_level_once(true);
  } catch (...) {
    in_wear_level_ = false;
    throw;
  }
  in_wear_level_ = false;
}

void Ftl::maybe_wear_level() {
  if (in_wear_level_) {
    return;
  }
  in_wear_level_ = true;
  wear_level_once(false);
  in_wear_level_ = false;
}

void Ftl::retire_bad_block(uint32_t block) {
  if (block >= chip_.geometry().block_count) {
    raise(Err::OutOfRange, "block index out of range");
  }
  if (in_free_pool_[block]) {
    free_pool_.erase(std::find(free_pool_.begin(), free_pool_.end(), block));
    in_free_pool_[block] = false;
    chip_.mark_bad(block);
    return;
  }
  if (host_open_ && host_open_->block == block) {
    host_open_.reset();
  }
  if (gc_open_ && gc_open_->block == block) {
    gc_open_.reset();
  }
  const uint32_t watermark = chip_.watermark(block);
  for (uint32_t p = 0; p < watermark; ++p) {
    auto rec = OobRecord::decode(chip_.page_oob(block, p));
    if (!rec || rec->valid_flag != OobRecord::kValid) {
      continue;
    }
    try {
      append(Stream::Gc, rec->lba, chip_.page_data(block, p));
    } catch (const FlashError& e) {
      if (e.code() == Err::DeviceFull) {
        raise(Err::NoFreeBlockForRescue, "no free block to rescue bad block");
      }
      throw;
    }
  }
  valid_count_[block] = 0;
  invalid_count_[block] = 0;
  chip_.mark_bad(block);
}

std::unordered_map<uint64_t, PhysAddr> Ftl::live_map() const {
  std::unordered_map<uint64_t, PhysAddr> out;
  for (uint64_t lba = 0; lba < capacity_; ++lba) {
    if (map_[lba]) {
      out.emplace(lba, *map_[lba]);
    }
  }
  return out;
}

std::unordered_map<uint64_t, PhysAddr> Ftl::rebuild_mapping(
    const FlashImage& image) {
  const auto& g = image.geometry();
  std::unordered_map<uint64_t, PhysAddr> out;
  std::unordered_map<uint64_t, uint64_t> best_seq;
  for (uint32_t b = 0; b < g.block_count; ++b) {
    for (uint32_t p = 0; p < g.pages_per_block; ++p) {
      auto rec = OobRecord::decode(image.page_oob(b, p));
      if (!rec || rec->valid_flag != OobRecord::kValid) {
        continue;
      }
      auto it = best_seq.find(rec->lba);
      if (it == best_seq.end() || rec->seq > it->second) {
        best_seq[rec->lba] = rec->seq;
        out[rec->lba] = PhysAddr{b, p};
      }
    }
  }
  return out;
}

} // namespace flashden
