#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flashden/crypto.hpp"
#include "flashden/flash_image.hpp"

namespace flashden {

enum class PageClass : uint8_t {
  Erased,      // all 0xFF, data and spare
  Decryptable, // decrypts under the decoy key to a verifying frame
  Structured,  // plaintext verifying frame
  Random,      // programmed, none of the above
};

enum class BlockSignature : uint8_t {
  Normal,
  Special1,        // fully programmed, mixes decryptable and random pages
  Special2,        // mixed programmed prefix, erased suffix
  Special3,        // all-random with non-prefix, non-total invalidations
  StegSharedBlock, // structured and random pages share one block
};

char page_class_letter(PageClass c);
const char* block_signature_name(BlockSignature s);

struct AnalysisProfile {
  enum class Mode { HiddenVolume, Stegfs };
  Mode mode = Mode::HiddenVolume;
  std::optional<Key256> decoy_key;
};

PageClass classify_page(std::span<const uint8_t> data,
                        std::span<const uint8_t> oob,
                        const AnalysisProfile& profile);

bool detect_special_block_1(std::span<const PageClass> classes);
bool detect_special_block_2(std::span<const PageClass> classes);
bool detect_special_block_3(std::span<const PageClass> classes,
                            const std::vector<uint32_t>& invalid_pages);
bool detect_steg_shared_block(std::span<const PageClass> classes);

/// Per-block summary ordered by allocation time (minimum OOB seq).
struct BlockKind {
  uint64_t min_seq = 0;
  bool has_structured = false;
  bool has_random = false;
};
bool detect_steg_interleave(std::span<const BlockKind> blocks_in_alloc_order);

struct BlockReport {
  uint32_t block_index = 0;
  BlockSignature signature = BlockSignature::Normal;
  std::vector<PageClass> page_classes;
  std::vector<uint32_t> invalid_pages;
  std::optional<uint64_t> min_seq;
};

struct Report {
  static constexpr const char* kDetectorVersion = "flashden-detect-1";

  FlashGeometry geometry;
  std::vector<BlockReport> blocks;
  bool steg_interleave = false;
  bool pde_detected = false;
  std::map<std::string, uint64_t> signature_counts;
  /// Fraction of one-bits across pages classified Random; informational
  /// only, never gates the verdict.
  double random_ones_fraction = 0.0;

  std::string verdict() const {
    return pde_detected ? "PDE_DETECTED" : "NO_EVIDENCE";
  }
};

Report analyze(const FlashImage& image, const AnalysisProfile& profile);

std::string report_to_json(const Report& report,
                           const std::map<std::string, std::string>& extra = {});

/// Run-length encoding of page classes, e.g. "D12R2E50".
std::string rle_classes(std::span<const PageClass> classes);

} // namespace flashden
