// flashden: deterministic NAND/FTL simulator with block-layer PDE schemes
// and a forensic attack engine for the signatures they leak into flash.
//
//   flashden simulate --scenario test1 --seed 1 --out test1.img
//   flashden analyze  --image test1.img --profile hidden --decoy-pass decoy \
//                     --out report.json
//   flashden run      --scenario test1 --expect detected

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "flashden/errors.hpp"
#include "flashden/flash_image.hpp"
#include "flashden/forensics.hpp"
#include "flashden/scenario.hpp"

namespace {

using namespace flashden;

uint64_t seed_from_env_or(uint64_t fallback) {
  const char* env = std::getenv("FLASHDEN_SEED");
  if (env != nullptr && *env != '\0') {
    return std::strtoull(env, nullptr, 10);
  }
  return fallback;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) {
    throw std::runtime_error("cannot write " + path);
  }
  f << text << "\n";
}

struct CommonOpts {
  std::string scenario = "test1";
  uint64_t seed = 0;
  bool seed_set = false;
  uint32_t blocks = 0;

  ScenarioSpec to_spec() const {
    ScenarioSpec spec;
    auto name = parse_scenario_name(scenario);
    if (!name) {
      throw CLI::ValidationError("unknown scenario: " + scenario);
    }
    spec.name = *name;
    spec.seed = seed_set ? seed : seed_from_env_or(1);
    if (blocks != 0) {
      spec.geometry.block_count = blocks;
    }
    return spec;
  }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--scenario", opts.scenario,
                  "test1|test2|test3|steg|control_public|control_steg")
      ->required();
  cmd->add_option("--seed", opts.seed, "workload RNG seed (env FLASHDEN_SEED)")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--blocks", opts.blocks, "override flash block count");
}

std::string profile_name(const AnalysisProfile& p) {
  return p.mode == AnalysisProfile::Mode::HiddenVolume ? "hidden" : "steg";
}

int print_summary(const ScenarioSpec& spec, const Report& report) {
  std::cout << "scenario=" << scenario_name_str(spec.name)
            << " seed=" << spec.seed << " verdict=" << report.verdict();
  for (const auto& [sig, n] : report.signature_counts) {
    std::cout << " " << sig << "=" << n;
  }
  if (report.steg_interleave) {
    std::cout << " STEG_INTERLEAVE=1";
  }
  std::cout << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"NAND/FTL simulator and PDE forensics harness"};
  app.require_subcommand(1);

  CommonOpts sim_opts;
  std::string sim_out = "flashden.img";
  CLI::App* sim = app.add_subcommand("simulate", "run a scenario, dump flash");
  add_common(sim, sim_opts);
  sim->add_option("--out", sim_out, "output image path");

  std::string an_image;
  std::string an_profile = "hidden";
  std::string an_decoy_pass = "decoy";
  std::string an_out = "report.json";
  CLI::App* an = app.add_subcommand("analyze", "forensic analysis of a dump");
  an->add_option("--image", an_image, "raw flash image")->required();
  an->add_option("--profile", an_profile, "hidden|steg")
      ->check(CLI::IsMember({"hidden", "steg"}));
  an->add_option("--decoy-pass", an_decoy_pass,
                 "decoy passphrase (hidden profile)");
  an->add_option("--out", an_out, "output report path");

  CommonOpts run_opts;
  std::string run_img_out;
  std::string run_rep_out;
  std::string run_expect;
  CLI::App* run = app.add_subcommand("run", "simulate + analyze in one go");
  add_common(run, run_opts);
  run->add_option("--out-image", run_img_out, "also save the dump here");
  run->add_option("--out-report", run_rep_out, "also save the report here");
  run->add_option("--expect", run_expect,
                  "exit 2 unless the verdict matches (detected|none)")
      ->check(CLI::IsMember({"detected", "none"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      ScenarioSpec spec = sim_opts.to_spec();
      SimulationResult result = simulate(spec);
      result.image.save(sim_out);
      std::cout << "wrote " << sim_out << " (" << result.image.byte_size()
                << " bytes, profile=" << profile_name(result.profile) << ")\n";
      return 0;
    }
    if (an->parsed()) {
      FlashImage image = FlashImage::load(an_image);
      AnalysisProfile profile;
      if (an_profile == "hidden") {
        profile.mode = AnalysisProfile::Mode::HiddenVolume;
        profile.decoy_key = derive_key(an_decoy_pass);
      } else {
        profile.mode = AnalysisProfile::Mode::Stegfs;
      }
      Report report = analyze(image, profile);
      write_text(an_out, report_to_json(report, {{"image", an_image}}));
      std::cout << "verdict=" << report.verdict() << " report=" << an_out
                << "\n";
      return 0;
    }
    // run
    ScenarioSpec spec = run_opts.to_spec();
    ScenarioRun result = run_scenario(spec);
    if (!run_img_out.empty()) {
      result.sim.image.save(run_img_out);
    }
    if (!run_rep_out.empty()) {
      write_text(run_rep_out,
                 report_to_json(result.report,
                                {{"scenario", scenario_name_str(spec.name)},
                                 {"seed", std::to_string(spec.seed)}}));
    }
    print_summary(spec, result.report);
    if (!run_expect.empty()) {
      const bool detected = result.report.pde_detected;
      if ((run_expect == "detected") != detected) {
        std::cerr << "verdict assertion failed: expected " << run_expect
                  << ", got " << result.report.verdict() << "\n";
        return 2;
      }
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
