#include <doctest.h>

#include "flashden/errors.hpp"
#include "flashden/forensics.hpp"
#include "flashden/frame.hpp"
#include "flashden/oob.hpp"

using namespace flashden;

namespace {

constexpr PageClass E = PageClass::Erased;
constexpr PageClass D = PageClass::Decryptable;
constexpr PageClass S = PageClass::Structured;
constexpr PageClass R = PageClass::Random;

std::vector<PageClass> pattern(std::initializer_list<std::pair<PageClass, int>> runs) {
  std::vector<PageClass> out;
  for (auto [c, n] : runs) {
    out.insert(out.end(), size_t(n), c);
  }
  return out;
}

// A synthetic image builder for analyze()-level tests.
struct ImageBuilder {
  FlashGeometry geom;
  std::vector<uint8_t> pages;
  RandomStream rng{77};

  explicit ImageBuilder(uint32_t blocks, uint32_t ppb = 4) {
    geom.pages_per_block = ppb;
    geom.block_count = blocks;
    pages.assign(size_t(blocks) * ppb * geom.page_total_bytes(), 0xFF);
  }

  void put(uint32_t block, uint32_t page, std::vector<uint8_t> data,
           uint64_t lba, uint64_t seq, bool valid = true) {
    auto rec_bytes = OobRecord{lba, seq,
                               valid ? OobRecord::kValid : OobRecord::kInvalid}
                         .encode(geom.page_oob_bytes);
    uint8_t* p = pages.data() + (size_t(block) * geom.pages_per_block + page) *
                                    geom.page_total_bytes();
    std::copy(data.begin(), data.end(), p);
    std::copy(rec_bytes.begin(), rec_bytes.end(), p + geom.page_data_bytes);
  }

  std::vector<uint8_t> random_page() { return rng.bytes(geom.page_data_bytes); }

  std::vector<uint8_t> structured_page(uint32_t file_id, uint32_t seq) {
    return make_frame(kPublicFrameMagic, file_id, seq, rng.bytes(100),
                      geom.page_data_bytes);
  }

  FlashImage build() { return FlashImage(geom, pages); }
};

} // namespace

TEST_CASE("special block 1: full block mixing decryptable and random") {
  CHECK(detect_special_block_1(pattern({{D, 32}, {R, 32}})));
  CHECK(detect_special_block_1(pattern({{D, 1}, {R, 63}})));
  CHECK_FALSE(detect_special_block_1(pattern({{D, 64}})));
  CHECK_FALSE(detect_special_block_1(pattern({{R, 64}})));
  CHECK_FALSE(detect_special_block_1(pattern({{D, 32}, {R, 31}, {E, 1}})));
  CHECK_FALSE(detect_special_block_1(pattern({{S, 32}, {R, 32}})));
}

TEST_CASE("special block 2: mixed programmed prefix, erased suffix") {
  CHECK(detect_special_block_2(pattern({{D, 10}, {R, 2}, {E, 52}})));
  CHECK(detect_special_block_2(pattern({{R, 1}, {D, 1}, {E, 62}})));
  CHECK_FALSE(detect_special_block_2(pattern({{D, 10}, {E, 54}})));
  CHECK_FALSE(detect_special_block_2(pattern({{R, 12}, {E, 52}})));
  CHECK_FALSE(detect_special_block_2(pattern({{E, 64}})));
  CHECK_FALSE(detect_special_block_2(pattern({{D, 10}, {R, 2}, {E, 10}, {D, 42}})));
  CHECK_FALSE(detect_special_block_2(pattern({{D, 32}, {R, 32}})));
}

TEST_CASE("special block 3: all-random with scattered invalidations") {
  auto all_random = pattern({{R, 64}});
  CHECK(detect_special_block_3(all_random, {5, 17, 40}));
  CHECK(detect_special_block_3(all_random, {63}));
  // Everything invalid: a GC victim waiting for erase, not evidence.
  std::vector<uint32_t> everything(64);
  for (uint32_t i = 0; i < 64; ++i) everything[i] = i;
  CHECK_FALSE(detect_special_block_3(all_random, everything));
  // A prefix {0..11} is sequential-overwrite churn.
  std::vector<uint32_t> prefix(12);
  for (uint32_t i = 0; i < 12; ++i) prefix[i] = i;
  CHECK_FALSE(detect_special_block_3(all_random, prefix));
  CHECK_FALSE(detect_special_block_3(all_random, {}));
  CHECK_FALSE(detect_special_block_3(pattern({{D, 32}, {R, 32}}), {5}));
}

TEST_CASE("steg shared block and interleave ordering") {
  CHECK(detect_steg_shared_block(pattern({{S, 10}, {R, 3}, {E, 51}})));
  CHECK_FALSE(detect_steg_shared_block(pattern({{S, 64}})));
  CHECK_FALSE(detect_steg_shared_block(pattern({{R, 64}})));

  auto kinds = [](std::initializer_list<char> order) {
    std::vector<BlockKind> out;
    uint64_t seq = 0;
    for (char c : order) {
      BlockKind k;
      k.min_seq = seq++;
      k.has_structured = c == 's';
      k.has_random = c == 'r';
      out.push_back(k);
    }
    return out;
  };
  CHECK_FALSE(detect_steg_interleave(kinds({'s', 's', 'r', 'r'})));
  CHECK(detect_steg_interleave(kinds({'s', 'r', 's', 'r'})));
  CHECK(detect_steg_interleave(kinds({'r', 's'})));
  CHECK_FALSE(detect_steg_interleave(kinds({'s'})));
  CHECK_FALSE(detect_steg_interleave(kinds({'r'})));
  CHECK_FALSE(detect_steg_interleave({}));
}

TEST_CASE("page classification is total and matches each writer") {
  FlashGeometry g;
  auto decoy = derive_key("decoy");
  SectorCipher cipher(decoy);
  AnalysisProfile hv;
  hv.decoy_key = decoy;
  AnalysisProfile steg;
  steg.mode = AnalysisProfile::Mode::Stegfs;
  RandomStream rng(21);

  std::vector<uint8_t> erased_data(g.page_data_bytes, 0xFF);
  std::vector<uint8_t> erased_oob(g.page_oob_bytes, 0xFF);
  CHECK(classify_page(erased_data, erased_oob, hv) == PageClass::Erased);

  const uint64_t lba = 42;
  auto oob = OobRecord{lba, 7, OobRecord::kValid}.encode(g.page_oob_bytes);
  auto frame = make_frame(kPublicFrameMagic, 1, 0, rng.bytes(50), g.page_data_bytes);

  CHECK(classify_page(cipher.encrypt(lba, frame), oob, hv) ==
        PageClass::Decryptable);
  // Same ciphertext without the decoy key in hand: random.
  AnalysisProfile no_key;
  CHECK(classify_page(cipher.encrypt(lba, frame), oob, no_key) ==
        PageClass::Random);
  // Wrong tweak (different claimed lba in the spare area): random.
  auto wrong_oob = OobRecord{lba + 1, 7, OobRecord::kValid}.encode(g.page_oob_bytes);
  CHECK(classify_page(cipher.encrypt(lba, frame), wrong_oob, hv) ==
        PageClass::Random);

  CHECK(classify_page(frame, oob, steg) == PageClass::Structured);
  CHECK(classify_page(rng.bytes(g.page_data_bytes), oob, steg) ==
        PageClass::Random);

  std::vector<uint8_t> tiny(8, 0);
  CHECK_THROWS_AS(classify_page({}, erased_oob, hv), FlashError);
  CHECK_THROWS_AS(classify_page(erased_data, tiny, hv), FlashError);
}

TEST_CASE("rle encoding of class runs") {
  CHECK(rle_classes(pattern({{D, 12}, {R, 2}, {E, 50}})) == "D12R2E50");
  CHECK(rle_classes(pattern({{S, 1}})) == "S1");
  CHECK(rle_classes({}) == "");
}

TEST_CASE("analyze on a synthetic image: signatures, counts, verdict") {
  auto decoy = derive_key("decoy");
  SectorCipher cipher(decoy);
  ImageBuilder ib(4);
  // Block 0: full, mixed decryptable/random -> SPECIAL1.
  for (uint32_t p = 0; p < 4; ++p) {
    if (p % 2 == 0) {
      auto frame = ib.structured_page(1, p);
      ib.put(0, p, cipher.encrypt(p, frame), p, p);
    } else {
      ib.put(0, p, ib.random_page(), p, p);
    }
  }
  // Block 1: all random, one mid-block invalidation -> SPECIAL3.
  for (uint32_t p = 0; p < 4; ++p) {
    ib.put(1, p, ib.random_page(), 100 + p, 10 + p, p != 2);
  }
  // Block 2: pure decryptable, partially filled -> NORMAL.
  for (uint32_t p = 0; p < 2; ++p) {
    ib.put(2, p, cipher.encrypt(200 + p, ib.structured_page(2, p)), 200 + p,
           20 + p);
  }
  auto image = ib.build();

  AnalysisProfile profile;
  profile.decoy_key = decoy;
  auto report = analyze(image, profile);
  CHECK(report.blocks.size() == 4);
  CHECK(report.blocks[0].signature == BlockSignature::Special1);
  CHECK(report.blocks[1].signature == BlockSignature::Special3);
  CHECK(report.blocks[1].invalid_pages == std::vector<uint32_t>{2});
  CHECK(report.blocks[2].signature == BlockSignature::Normal);
  CHECK(report.blocks[3].signature == BlockSignature::Normal);
  CHECK(report.signature_counts.at("SPECIAL1") == 1);
  CHECK(report.signature_counts.at("SPECIAL3") == 1);
  CHECK(report.pde_detected);
  CHECK(report.verdict() == "PDE_DETECTED");
  CHECK(report.random_ones_fraction > 0.45);
  CHECK(report.random_ones_fraction < 0.55);

  auto json = report_to_json(report, {{"scenario", "synthetic"}});
  CHECK(json.find("\"verdict\": \"PDE_DETECTED\"") != std::string::npos);
  CHECK(json.find("flashden-detect-1") != std::string::npos);
  CHECK(json.find("\"scenario\": \"synthetic\"") != std::string::npos);
  CHECK(json.find("SPECIAL1") != std::string::npos);
}

TEST_CASE("analyze in stegfs mode: shared blocks and interleave") {
  ImageBuilder ib(4);
  // Alloc order by min seq: block 0 structured (seq 0..), block 1 random
  // (seq 10..), block 2 structured again (seq 20..) => interleave.
  for (uint32_t p = 0; p < 4; ++p) {
    ib.put(0, p, ib.structured_page(1, p), p, p);
  }
  for (uint32_t p = 0; p < 4; ++p) {
    ib.put(1, p, ib.random_page(), 100 + p, 10 + p);
  }
  for (uint32_t p = 0; p < 2; ++p) {
    ib.put(2, p, ib.structured_page(2, p), 200 + p, 20 + p);
  }
  AnalysisProfile profile;
  profile.mode = AnalysisProfile::Mode::Stegfs;
  auto report = analyze(ib.build(), profile);
  CHECK(report.steg_interleave);
  CHECK(report.pde_detected);
  CHECK(report.signature_counts.empty());

  // Shared block: structured and random in the same block.
  ImageBuilder ib2(2);
  ib2.put(0, 0, ib2.structured_page(1, 0), 0, 0);
  ib2.put(0, 1, ib2.random_page(), 1, 1);
  auto report2 = analyze(ib2.build(), profile);
  CHECK(report2.blocks[0].signature == BlockSignature::StegSharedBlock);
  CHECK(report2.signature_counts.at("STEG_SHARED_BLOCK") == 1);
  CHECK(report2.pde_detected);

  // Structured-only device: nothing fires.
  ImageBuilder ib3(2);
  for (uint32_t p = 0; p < 4; ++p) {
    ib3.put(0, p, ib3.structured_page(1, p), p, p);
  }
  auto report3 = analyze(ib3.build(), profile);
  CHECK_FALSE(report3.pde_detected);
  CHECK(report3.verdict() == "NO_EVIDENCE");
}

TEST_CASE("malformed image bytes are rejected") {
  ImageBuilder ib(2);
  auto bytes = ib.build().to_bytes();

  auto truncated = bytes;
  truncated.resize(truncated.size() - 1);
  CHECK_THROWS_AS(FlashImage::from_bytes(truncated), FlashError);

  auto bad_magic = bytes;
  bad_magic[0] ^= 0xFF;
  try {
    FlashImage::from_bytes(bad_magic);
    FAIL("expected MalformedImage");
  } catch (const FlashError& e) {
    CHECK(e.code() == Err::MalformedImage);
  }

  auto bad_geom = bytes;
  bad_geom[8] = bad_geom[9] = bad_geom[10] = bad_geom[11] = 0;
  CHECK_THROWS_AS(FlashImage::from_bytes(bad_geom), FlashError);
}
