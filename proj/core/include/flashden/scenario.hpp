#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "flashden/forensics.hpp"
#include "flashden/ftl.hpp"
#include "flashden/geometry.hpp"

namespace flashden {

enum class ScenarioName {
  Test1,         // alternating small public/hidden appends
  Test2,         // >1-block public write, then a small hidden append
  Test3,         // >2-block hidden file, then random in-place modifications
  Steg,          // stegfs: random fill, public FAT data, hidden replicas
  ControlPublic, // hidden-volume device, public activity only
  ControlSteg,   // plain FAT device, no steg fill, no hidden data
};

std::optional<ScenarioName> parse_scenario_name(const std::string& name);
const char* scenario_name_str(ScenarioName name);

struct ScenarioSpec {
  ScenarioName name = ScenarioName::Test1;
  uint64_t seed = 1;
  FlashGeometry geometry;

  std::string decoy_pass = "decoy";
  std::string true_pass = "hidden-true";
  std::string steg_pass = "steg-secret";

  // Workload knobs; defaults reproduce the attack workloads at the
  // default 64MB geometry.
  uint32_t test1_rounds = 16;
  uint32_t small_file_bytes = 2048;
  uint32_t test2_public_bytes = 150 * 1024;
  uint32_t test3_hidden_bytes = 256 * 1024;
  uint32_t test3_modifications = 5;
  uint32_t steg_public_bytes = 300 * 1024;
  uint32_t steg_hidden_bytes = 8 * 1024;
  uint32_t steg_replicas = 4;
};

struct SimulationResult {
  FlashImage image;
  AnalysisProfile profile;
  uint64_t gc_runs = 0;
  uint64_t wl_migrations = 0;
};

/// The analysis profile the adversary would use against this scenario
/// (decoy key for hidden-volume devices, plaintext checks for stegfs).
AnalysisProfile profile_for(const ScenarioSpec& spec);

SimulationResult simulate(const ScenarioSpec& spec);

struct ScenarioRun {
  SimulationResult sim;
  Report report;
};

/// simulate + analyze; equals analyze(simulate(spec)) by construction.
ScenarioRun run_scenario(const ScenarioSpec& spec);

} // namespace flashden
