#include "flashden/scenario.hpp"

#include <algorithm>

#include "flashden/errors.hpp"
#include "flashden/frame.hpp"
#include "flashden/fs_model.hpp"
#include "flashden/hidden_volume.hpp"
#include "flashden/stegfs.hpp"

namespace flashden {

std::optional<ScenarioName> parse_scenario_name(const std::string& name) {
  if (name == "test1") return ScenarioName::Test1;
  if (name == "test2") return ScenarioName::Test2;
  if (name == "test3") return ScenarioName::Test3;
  if (name == "steg") return ScenarioName::Steg;
  if (name == "control_public") return ScenarioName::ControlPublic;
  if (name == "control_steg") return ScenarioName::ControlSteg;
  return std::nullopt;
}

const char* scenario_name_str(ScenarioName name) {
  switch (name) {
    case ScenarioName::Test1: return "test1";
    case ScenarioName::Test2: return "test2";
    case ScenarioName::Test3: return "test3";
    case ScenarioName::Steg: return "steg";
    case ScenarioName::ControlPublic: return "control_public";
    case ScenarioName::ControlSteg: return "control_steg";
  }
  return "?";
}

AnalysisProfile profile_for(const ScenarioSpec& spec) {
  AnalysisProfile profile;
  switch (spec.name) {
    case ScenarioName::Test1:
    case ScenarioName::Test2:
    case ScenarioName::Test3:
    case ScenarioName::ControlPublic:
      profile.mode = AnalysisProfile::Mode::HiddenVolume;
      profile.decoy_key = derive_key(spec.decoy_pass);
      break;
    case ScenarioName::Steg:
    case ScenarioName::ControlSteg:
      profile.mode = AnalysisProfile::Mode::Stegfs;
      break;
  }
  return profile;
}

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

uint64_t default_hidden_sectors(const Ftl& ftl) {
  return ftl.capacity_sectors() / 8; // 12.5% of the disk
}

void run_test1(const ScenarioSpec& spec, Ftl& ftl, RandomStream& rng) {
  auto layout = create_volume(ftl, spec.decoy_pass, spec.true_pass,
                              default_hidden_sectors(ftl), rng);
  FsVolume pub(public_io(layout, ftl), kPublicFrameMagic, 0,
               layout.logical_sectors / 2);
  FsVolume hid(hidden_io(layout, ftl), kHiddenFrameMagic, 0,
               layout.hidden_size_sectors);
  for (uint32_t i = 0; i < spec.test1_rounds; ++i) {
    pub.append_file(i, rng.bytes(spec.small_file_bytes));
    hid.append_file(i, rng.bytes(spec.small_file_bytes));
  }
}

void run_test2(const ScenarioSpec& spec, Ftl& ftl, RandomStream& rng) {
  auto layout = create_volume(ftl, spec.decoy_pass, spec.true_pass,
                              default_hidden_sectors(ftl), rng);
  FsVolume pub(public_io(layout, ftl), kPublicFrameMagic, 0,
               layout.logical_sectors / 2);
  FsVolume hid(hidden_io(layout, ftl), kHiddenFrameMagic, 0,
               layout.hidden_size_sectors);
  pub.append_file(1, rng.bytes(spec.test2_public_bytes));
  hid.append_file(1, rng.bytes(spec.small_file_bytes));
}

void run_test3(const ScenarioSpec& spec, Ftl& ftl, RandomStream& rng) {
  auto layout = create_volume(ftl, spec.decoy_pass, spec.true_pass,
                              default_hidden_sectors(ftl), rng);
  FsVolume hid(hidden_io(layout, ftl), kHiddenFrameMagic, 0,
               layout.hidden_size_sectors);
  auto sectors = hid.append_file(1, rng.bytes(spec.test3_hidden_bytes));
  for (uint32_t m = 0; m < spec.test3_modifications; ++m) {
    const uint64_t sector = sectors[rng.below(sectors.size())];
    hid.modify_in_place(sector, rng.bytes(hid.payload_capacity()));
  }
}

void run_steg(const ScenarioSpec& spec, Ftl& ftl, RandomStream& rng) {
  StegConfig cfg;
  cfg.replica_count = spec.steg_replicas;
  cfg.steg_key = derive_key(spec.steg_pass);
  cfg.disk_sectors = ftl.capacity_sectors();
  steg_init(ftl, cfg, rng);
  StegFs fs(ftl, cfg);
  fs.fat_write(1, rng.bytes(spec.steg_public_bytes));
  fs.steg_write(2, rng.bytes(spec.steg_hidden_bytes));
}

/// PDE-free workloads. Writes come in whole-block units (64-page files,
/// the exFAT-cluster-sized behavior the attack analysis assumes) so that
/// public data and leftover fill never cohabit a flash block. A hot file
/// rewritten many times supplies the erase churn that forces GC and wear
/// leveling.
void run_control_workload(FsVolume& vol, const FlashGeometry& geom,
                          uint64_t region_sectors, RandomStream& rng) {
  const size_t unit_bytes = size_t(geom.pages_per_block) *
                            frame_payload_capacity(geom.page_data_bytes);
  auto hot_sectors = vol.append_file(0, rng.bytes(unit_bytes));
  const uint64_t max_appends = region_sectors / geom.pages_per_block - 1;
  uint64_t appends_left = std::min<uint64_t>(max_appends, 8 + rng.below(12));
  const uint32_t hot_passes = uint32_t(48 + rng.below(16));
  uint32_t file_id = 1;
  for (uint32_t pass = 0; pass < hot_passes; ++pass) {
    for (uint64_t s : hot_sectors) {
      vol.modify_in_place(s, rng.bytes(vol.payload_capacity()));
    }
    if (pass % 2 == 0 && appends_left > 0) {
      vol.append_file(file_id++, rng.bytes(unit_bytes));
      appends_left -= 1;
    }
  }
}

void run_control_public(const ScenarioSpec& spec, Ftl& ftl, RandomStream& rng) {
  auto layout = create_volume(ftl, spec.decoy_pass, spec.true_pass,
                              default_hidden_sectors(ftl), rng);
  FsVolume pub(public_io(layout, ftl), kPublicFrameMagic, 0,
               layout.logical_sectors / 2);
  run_control_workload(pub, ftl.chip().geometry(), layout.logical_sectors / 2,
                       rng);
}

void run_control_steg(const ScenarioSpec& spec, Ftl& ftl, RandomStream& rng) {
  // A FAT-only device: no stegfs formatting, so no random fill at all.
  // Most of the disk carries ordinary public files, which makes free
  // space scarce enough that the churn below has to recycle blocks.
  FsVolume fat(plaintext_io(ftl), kPublicFrameMagic, 0, ftl.capacity_sectors());
  const FlashGeometry& geom = ftl.chip().geometry();
  const size_t unit_bytes = size_t(geom.pages_per_block) *
                            frame_payload_capacity(geom.page_data_bytes);
  const uint64_t total_units = ftl.capacity_sectors() / geom.pages_per_block;
  const uint64_t churn_units = 24;
  uint32_t file_id = 1000;
  for (uint64_t u = 0; u + churn_units < total_units; ++u) {
    fat.append_file(file_id++, rng.bytes(unit_bytes));
  }
  run_control_workload(fat, geom, churn_units * geom.pages_per_block, rng);
}

} // namespace

SimulationResult simulate(const ScenarioSpec& spec) {
  Ftl ftl(spec.geometry);
  RandomStream rng(spec.seed);
  switch (spec.name) {
    case ScenarioName::Test1: run_test1(spec, ftl, rng); break;
    case ScenarioName::Test2: run_test2(spec, ftl, rng); break;
    case ScenarioName::Test3: run_test3(spec, ftl, rng); break;
    case ScenarioName::Steg: run_steg(spec, ftl, rng); break;
    case ScenarioName::ControlPublic: run_control_public(spec, ftl, rng); break;
    case ScenarioName::ControlSteg: run_control_steg(spec, ftl, rng); break;
  }
  return SimulationResult{ftl.chip().dump_image(), profile_for(spec),
                          ftl.gc_runs(), ftl.wl_migrations()};
}

ScenarioRun run_scenario(const ScenarioSpec& spec) {
  SimulationResult sim = simulate(spec);
  Report report = analyze(sim.image, sim.profile);
  return ScenarioRun{std::move(sim), std::move(report)};
}

} // namespace flashden
