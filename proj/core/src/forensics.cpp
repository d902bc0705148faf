#include "flashden/forensics.hpp"

#include <algorithm>
#include <bit>

#include <json.hpp>

#include "flashden/errors.hpp"
#include "flashden/frame.hpp"
#include "flashden/oob.hpp"

namespace flashden {

char page_class_letter(PageClass c) {
  switch (c) {
    case PageClass::Erased: return 'E';
    case PageClass::Decryptable: return 'D';
    case PageClass::Structured: return 'S';
    case PageClass::Random: return 'R';
  }
  return '?';
}

const char* block_signature_name(BlockSignature s) {
  switch (s) {
    case BlockSignature::Normal: return "NORMAL";
    case BlockSignature::Special1: return "SPECIAL1";
    case BlockSignature::Special2: return "SPECIAL2";
    case BlockSignature::Special3: return "SPECIAL3";
    case BlockSignature::StegSharedBlock: return "STEG_SHARED_BLOCK";
  }
  return "?";
}

PageClass classify_page(std::span<const uint8_t> data,
                        std::span<const uint8_t> oob,
                        const AnalysisProfile& profile) {
  if (data.empty() || oob.size() < OobRecord::kRecordBytes) {
    raise(Err::GeometryMismatch, "page smaller than expected");
  }
  if (all_ff(data) && all_ff(oob)) {
    return PageClass::Erased;
  }
  if (profile.mode == AnalysisProfile::Mode::HiddenVolume && profile.decoy_key) {
    // The spare area gives away the logical address, which is the
    // sector-cipher tweak the adversary needs for a decryption attempt.
    std::optional<OobRecord> rec;
    try {
      rec = OobRecord::decode(oob);
    } catch (const FlashError&) {
      rec = std::nullopt;
    }
    if (rec) {
      SectorCipher cipher(*profile.decoy_key);
      auto plain = cipher.decrypt(rec->lba, data);
      if (verify_any_frame(plain)) {
        return PageClass::Decryptable;
      }
    }
  }
  if (verify_any_frame(data)) {
    return PageClass::Structured;
  }
  return PageClass::Random;
}

bool detect_special_block_1(std::span<const PageClass> classes) {
  bool any_erased = false, any_decryptable = false, any_random = false;
  for (PageClass c : classes) {
    any_erased |= c == PageClass::Erased;
    any_decryptable |= c == PageClass::Decryptable;
    any_random |= c == PageClass::Random;
  }
  return !any_erased && any_decryptable && any_random;
}

bool detect_special_block_2(std::span<const PageClass> classes) {
  // Non-empty programmed prefix, non-empty erased suffix, prefix mixes
  // decryptable and random.
  size_t prefix = 0;
  while (prefix < classes.size() && classes[prefix] != PageClass::Erased) {
    ++prefix;
  }
  if (prefix == 0 || prefix == classes.size()) {
    return false;
  }
  for (size_t i = prefix; i < classes.size(); ++i) {
    if (classes[i] != PageClass::Erased) {
      return false; // programmed pages after the erased gap; not this shape
    }
  }
  bool any_decryptable = false, any_random = false;
  for (size_t i = 0; i < prefix; ++i) {
    any_decryptable |= classes[i] == PageClass::Decryptable;
    any_random |= classes[i] == PageClass::Random;
  }
  return any_decryptable && any_random;
}

bool detect_special_block_3(std::span<const PageClass> classes,
                            const std::vector<uint32_t>& invalid_pages) {
  if (invalid_pages.empty() || invalid_pages.size() == classes.size()) {
    return false;
  }
  for (PageClass c : classes) {
    if (c != PageClass::Random) {
      return false;
    }
  }
  // A prefix invalid set {0..j} is what sequential overwrites produce;
  // only invalidations at arbitrary positions are suspicious.
  bool is_prefix = true;
  for (size_t i = 0; i < invalid_pages.size(); ++i) {
    if (invalid_pages[i] != i) {
      is_prefix = false;
      break;
    }
  }
  return !is_prefix;
}

bool detect_steg_shared_block(std::span<const PageClass> classes) {
  bool any_structured = false, any_random = false;
  for (PageClass c : classes) {
    any_structured |= c == PageClass::Structured;
    any_random |= c == PageClass::Random;
  }
  return any_structured && any_random;
}

bool detect_steg_interleave(std::span<const BlockKind> blocks) {
  bool seen_random_only = false;
  for (const BlockKind& b : blocks) {
    if (b.has_structured) {
      if (seen_random_only) {
        return true;
      }
    } else if (b.has_random) {
      seen_random_only = true;
    }
  }
  return false;
}

namespace {

uint64_t count_ones(std::span<const uint8_t> bytes) {
  uint64_t n = 0;
  for (uint8_t b : bytes) {
    n += std::popcount(b);
  }
  return n;
}

} // namespace

Report analyze(const FlashImage& image, const AnalysisProfile& profile) {
  const FlashGeometry& g = image.geometry();
  Report report;
  report.geometry = g;

  uint64_t random_bits = 0;
  uint64_t random_ones = 0;
  std::vector<BlockKind> kinds;

  for (uint32_t b = 0; b < g.block_count; ++b) {
    BlockReport br;
    br.block_index = b;
    br.page_classes.reserve(g.pages_per_block);
    BlockKind kind;
    bool programmed = false;
    for (uint32_t p = 0; p < g.pages_per_block; ++p) {
      auto data = image.page_data(b, p);
      auto oob = image.page_oob(b, p);
      const PageClass c = classify_page(data, oob, profile);
      br.page_classes.push_back(c);
      if (c == PageClass::Random) {
        random_bits += data.size() * 8;
        random_ones += count_ones(data);
      }
      if (c != PageClass::Erased) {
        programmed = true;
        kind.has_structured |= c == PageClass::Structured;
        kind.has_random |= c == PageClass::Random;
        std::optional<OobRecord> rec;
        try {
          rec = OobRecord::decode(oob);
        } catch (const FlashError&) {
          rec = std::nullopt;
        }
        if (rec) {
          if (rec->valid_flag != OobRecord::kValid) {
            br.invalid_pages.push_back(p);
          }
          if (!br.min_seq || rec->seq < *br.min_seq) {
            br.min_seq = rec->seq;
          }
        }
      }
    }
    if (profile.mode == AnalysisProfile::Mode::HiddenVolume) {
      if (detect_special_block_1(br.page_classes)) {
        br.signature = BlockSignature::Special1;
      } else if (detect_special_block_2(br.page_classes)) {
        br.signature = BlockSignature::Special2;
      } else if (detect_special_block_3(br.page_classes, br.invalid_pages)) {
        br.signature = BlockSignature::Special3;
      }
    } else {
      if (detect_steg_shared_block(br.page_classes)) {
        br.signature = BlockSignature::StegSharedBlock;
      }
      if (programmed && br.min_seq) {
        kind.min_seq = *br.min_seq;
        kinds.push_back(kind);
      }
    }
    if (br.signature != BlockSignature::Normal) {
      report.signature_counts[block_signature_name(br.signature)] += 1;
    }
    report.blocks.push_back(std::move(br));
  }

  if (profile.mode == AnalysisProfile::Mode::Stegfs) {
    std::sort(kinds.begin(), kinds.end(),
              [](const BlockKind& a, const BlockKind& b) {
                return a.min_seq < b.min_seq;
              });
    report.steg_interleave = detect_steg_interleave(kinds);
  }

  report.random_ones_fraction =
      random_bits == 0 ? 0.0 : double(random_ones) / double(random_bits);
  report.pde_detected =
      !report.signature_counts.empty() || report.steg_interleave;
  return report;
}

std::string rle_classes(std::span<const PageClass> classes) {
  std::string out;
  size_t i = 0;
  while (i < classes.size()) {
    size_t j = i;
    while (j < classes.size() && classes[j] == classes[i]) {
      ++j;
    }
    out += page_class_letter(classes[i]);
    out += std::to_string(j - i);
    i = j;
  }
  return out;
}

std::string report_to_json(const Report& report,
                           const std::map<std::string, std::string>& extra) {
  nlohmann::json j;
  j["detector_version"] = Report::kDetectorVersion;
  j["geometry"] = {
      {"page_data_bytes", report.geometry.page_data_bytes},
      {"page_oob_bytes", report.geometry.page_oob_bytes},
      {"pages_per_block", report.geometry.pages_per_block},
      {"block_count", report.geometry.block_count},
  };
  nlohmann::json blocks = nlohmann::json::array();
  for (const BlockReport& br : report.blocks) {
    // Keep the report readable: only non-normal or non-trivial blocks.
    if (br.signature == BlockSignature::Normal && br.invalid_pages.empty() &&
        !br.min_seq) {
      continue;
    }
    nlohmann::json jb;
    jb["block_index"] = br.block_index;
    jb["signature"] = block_signature_name(br.signature);
    jb["page_classes"] = rle_classes(br.page_classes);
    jb["invalid_pages"] = br.invalid_pages;
    blocks.push_back(std::move(jb));
  }
  j["blocks"] = std::move(blocks);
  j["global_signals"] = {{"steg_interleave", report.steg_interleave}};
  j["signature_counts"] = report.signature_counts;
  j["random_ones_fraction"] = report.random_ones_fraction;
  j["verdict"] = report.verdict();
  for (const auto& [k, v] : extra) {
    j[k] = v;
  }
  return j.dump(2);
}

} // namespace flashden
