// irs: design, predict and lay out phase-gradient reflecting surfaces.
//
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "irs/error.hpp"
#include "irs/far_field.hpp"
#include "irs/gradient_design.hpp"
#include "irs/mask.hpp"
#include "irs/nlos.hpp"
#include "irs/unit_cell.hpp"

namespace fs = std::filesystem;
using namespace irs;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PhaseSourceFlags {
  std::string table;
  bool lossless = false;

  PhaseCurve curve_for(Frequency f) const {
    if (!table.empty()) return load_phase_table(table, f);
    return surrogate_phase_curve(f, lossless);
  }
};

void add_phase_source(CLI::App* cmd, PhaseSourceFlags& ps) {
  cmd->add_option("--phase-table", ps.table,
                  "External phase table (D_mm, gamma_abs, gamma_phase_deg); replaces the "
                  "built-in unit-cell model")
      ->check(CLI::ExistingFile);
  cmd->add_flag("--lossless", ps.lossless,
                "Use the built-in model with a loss-free substrate (tan_delta = 0)");
}

// "a:b" -> {a, b}; "a:b:c" -> {a, b, c}.
std::vector<double> parse_range(const std::string& text, std::size_t parts) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(fmt::format("cannot parse range '{}'", text));
    }
  }
  if (out.size() != parts) {
    throw UsageError(fmt::format("range '{}' needs {} ':'-separated numbers", text, parts));
  }
  return out;
}

void check_output(const std::string& path) {
  if (path == "-") return;
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw Error(ErrorKind::IoError,
                fmt::format("output directory {} does not exist", parent.string()));
  }
}

template <typename Writer>
void write_output(const std::string& path, Writer&& writer) {
  if (path == "-") {
    writer(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, fmt::format("cannot write {}", path));
  writer(out);
}

SupercellSpec read_design(const std::string& path, bool paper_table2) {
  if (paper_table2) return table2_reference_spec();
  if (path.empty()) throw UsageError("a design file or --paper-table2 is required");
  return load_design(path);
}

// ---------------------------------------------------------------------------

struct DesignArgs {
  double freq_ghz = 5.0;
  double angle_deg = 30.0;
  int cells = 10;
  bool paper_table2 = false;
  std::string out = "design.json";
  PhaseSourceFlags phase;
};

void run_design(const DesignArgs& a) {
  check_output(a.out);
  SupercellSpec spec = a.paper_table2
                           ? table2_reference_spec()
                           : [&] {
                               const Frequency f = Frequency::ghz(a.freq_ghz);
                               const Angle theta = Angle::degrees(a.angle_deg);
                               period_for_angle(f, theta);  // angle errors before model work
                               return design_supercell(f, theta, a.cells, a.phase.curve_for(f));
                             }();
  const double ratio = parallel_wavevector_ratio(spec.period, spec.frequency);
  const Angle theta_r = anomalous_angle(Angle{}, spec.period, spec.frequency);
  write_output(a.out, [&](std::ostream& o) { o << to_design_json(spec); });
  fmt::print("P = {:.2f} mm\n", spec.period * 1e3);
  fmt::print("varrho/k0 = {:.4f}\n", ratio);
  fmt::print("theta_r = {:.2f} deg\n", theta_r.deg());
  std::string sizes;
  for (double d : spec.patch_sizes) sizes += fmt::format("{}{:.3f}", sizes.empty() ? "" : " ", d * 1e3);
  fmt::print("patch_sizes_mm = {}\n", sizes);
}

struct PatternArgs {
  std::string design;
  bool paper_table2 = false;
  double theta_i_deg = 0.0;
  int tiles = 10;
  double step_deg = 0.1;
  bool uniform = false;
  std::string out = "pattern.csv";
  PhaseSourceFlags phase;
};

void run_pattern(const PatternArgs& a) {
  check_output(a.out);
  const SupercellSpec spec = read_design(a.design, a.paper_table2);
  ApertureProfile profile = a.uniform
                                ? ApertureProfile::uniform(a.tiles * spec.n_cells, spec.pitch, -1.0)
                                : build_profile(spec, a.phase.curve_for(spec.frequency), a.tiles);
  const auto pattern = scattered_pattern(profile, Angle::degrees(a.theta_i_deg), spec.frequency,
                                         AngleGrid::degrees(-90.0, 90.0, a.step_deg));
  write_output(a.out, [&](std::ostream& o) { write_pattern_csv(o, pattern); });
  fmt::print("peak_deg={:.2f}, directivity_db={:.2f}\n", peak_angle(pattern).deg(),
             peak_directivity(pattern).db);
}

struct SweepArgs {
  std::string design;
  bool paper_table2 = false;
  double theta_i_deg = 0.0;
  int tiles = 10;
  std::string band = "4.8:5.2";
  int points = 41;
  std::string out = "efficiency.csv";
  PhaseSourceFlags phase;
};

void run_sweep(const SweepArgs& a) {
  check_output(a.out);
  const auto band = parse_range(a.band, 2);
  const SupercellSpec spec = read_design(a.design, a.paper_table2);
  const auto freqs = frequency_band(band[0] * 1e9, band[1] * 1e9, a.points);
  // A table is a single-frequency measurement; the model is re-evaluated per point.
  const CellResponse response =
      a.phase.table.empty()
          ? model_response(LayerStack::paper_on_mdf(a.phase.lossless), CellGeometry::paper())
          : curve_response(load_phase_table(a.phase.table, spec.frequency));
  const auto ratios =
      efficiency_vs_pec(spec, response, Angle::degrees(a.theta_i_deg), freqs, a.tiles);
  write_output(a.out, [&](std::ostream& o) { write_efficiency_csv(o, freqs, ratios); });
  const auto best = std::max_element(ratios.begin(), ratios.end()) - ratios.begin();
  fmt::print("best_freq_ghz={:.4f}, best_ratio={:.4f}\n",
             freqs[static_cast<std::size_t>(best)].ghz_value(),
             ratios[static_cast<std::size_t>(best)]);
}

struct ReplicaArgs {
  std::string design;
  bool paper_table2 = false;
  std::string band = "5.16:5.20";
  int points = 5;
  double s = 1.5;
  double pt_dbm = 14.0;
  double tx_gain_dbi = 0.0;
  double rx_gain_dbi = 0.0;
  double tx_angle_deg = 0.0;
  std::string angles = "-80:80:1";
  int tiles = 2;
  double height_m = IrsPanel::kDefaultHeight;
  bool reference = false;
  std::string out = "sweep.csv";
  PhaseSourceFlags phase;
};

void run_replica(const ReplicaArgs& a) {
  check_output(a.out);
  const auto band = parse_range(a.band, 2);
  const auto ang = parse_range(a.angles, 3);
  const SupercellSpec spec =
      (a.design.empty() && !a.paper_table2)
          ? design_supercell(Frequency::ghz(5.0), Angle::degrees(30.0), 10,
                             a.phase.curve_for(Frequency::ghz(5.0)))
          : read_design(a.design, a.paper_table2);
  const IrsPanel panel =
      a.reference ? IrsPanel::uniform_plate({0, 0}, {0, 1}, a.tiles * spec.period,
                                            a.tiles * spec.n_cells, a.height_m)
                  : IrsPanel::from_design({0, 0}, {0, 1}, spec, a.phase.curve_for(spec.frequency),
                                          a.tiles, a.height_m);
  const auto freqs = frequency_band(band[0] * 1e9, band[1] * 1e9, a.points);
  std::vector<Angle> angles;
  const AngleGrid grid = AngleGrid::degrees(ang[0], ang[1], ang[2]);
  for (const double d : grid.radians()) {
    angles.push_back(Angle::radians(d));
  }
  ReplicaOptions opt;
  opt.distance = a.s;
  opt.pt_dbm = a.pt_dbm;
  opt.tx_gain_dbi = a.tx_gain_dbi;
  opt.rx_gain_dbi = a.rx_gain_dbi;
  opt.incidence = Angle::degrees(a.tx_angle_deg);
  const auto rows = angle_sweep_replica(panel, freqs, angles, opt);
  write_output(a.out, [&](std::ostream& o) { write_sweep_csv(o, rows); });

  for (std::size_t fi = 0; fi < freqs.size(); ++fi) {
    std::optional<std::size_t> best;
    for (std::size_t ai = 0; ai < angles.size(); ++ai) {
      const auto& r = rows[fi * angles.size() + ai];
      if (r.power_dbm && (!best || *r.power_dbm > *rows[fi * angles.size() + *best].power_dbm)) {
        best = ai;
      }
    }
    if (best) {
      fmt::print("freq_ghz={:.4f}, argmax_deg={:.2f}, power_dbm={:.2f}\n", freqs[fi].ghz_value(),
                 angles[*best].deg(), *rows[fi * angles.size() + *best].power_dbm);
    } else {
      fmt::print("freq_ghz={:.4f}, argmax_deg=NOCOV\n", freqs[fi].ghz_value());
    }
  }
}

struct CoverageArgs {
  std::string scene;
  std::string out = "coverage.csv";
  PhaseSourceFlags phase;
};

void run_coverage(const CoverageArgs& a) {
  check_output(a.out);
  const Scene2D scene = load_scene(
      a.scene, [&](const SupercellSpec& spec, const std::optional<fs::path>& table) {
        if (table) return load_phase_table(*table, spec.frequency);
        return a.phase.curve_for(spec.frequency);
      });
  const CoverageMap map = coverage_map(scene);
  write_output(a.out, [&](std::ostream& o) { write_coverage_csv(o, map); });
  const auto covered = std::count_if(map.power_dbm.begin(), map.power_dbm.end(),
                                     [](const auto& v) { return v.has_value(); });
  fmt::print("cells={}, covered={}, nocov={}\n", map.power_dbm.size(), covered,
             static_cast<long>(map.power_dbm.size()) - covered);
}

struct MaskArgs {
  std::string design;
  bool paper_table2 = false;
  int rows = 12;
  int periods = 2;
  double transverse_pitch_mm = 0.0;
  std::string out = "mask.svg";
};

void run_mask(const MaskArgs& a) {
  check_output(a.out);
  const SupercellSpec spec = read_design(a.design, a.paper_table2);
  const double tpitch = a.transverse_pitch_mm > 0.0 ? a.transverse_pitch_mm * 1e-3
                                                    : spec.transverse_pitch.value_or(30e-3);
  const PanelLayout layout = layout_panel(spec, a.rows, a.periods, tpitch);
  const std::string svg = render_svg(layout);
  write_output(a.out, [&](std::ostream& o) { o << svg; });
  fmt::print("sheet = {:.2f} x {:.2f} mm, patches = {}\n", layout.sheet_width * 1e3,
             layout.sheet_height * 1e3, layout.patches.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-gradient reflecting surface toolkit. Units: GHz, mm, deg, dBm."};
  app.require_subcommand(1);

  DesignArgs design;
  auto* c_design = app.add_subcommand("design", "Synthesize a supercell design (JSON)");
  c_design->add_option("--freq-ghz", design.freq_ghz, "Design frequency [GHz]")->capture_default_str();
  c_design->add_option("--angle-deg", design.angle_deg,
                       "Reflection angle for normal incidence [deg]")->capture_default_str();
  c_design->add_option("--cells", design.cells, "Unit cells per supercell")->capture_default_str();
  c_design->add_flag("--paper-table2", design.paper_table2,
                     "Emit the published 10-cell, P = 120 mm reference design");
  c_design->add_option("-o,--out", design.out, "Design JSON output path ('-' = stdout)")->capture_default_str();
  add_phase_source(c_design, design.phase);

  PatternArgs pattern;
  auto* c_pattern = app.add_subcommand("pattern", "Far-field pattern of a tiled design (CSV)");
  c_pattern->add_option("design", pattern.design, "Design JSON file")->check(CLI::ExistingFile);
  c_pattern->add_flag("--paper-table2", pattern.paper_table2, "Use the published design");
  c_pattern->add_option("--theta-i-deg", pattern.theta_i_deg, "Incidence angle [deg]")->capture_default_str();
  c_pattern->add_option("--tiles", pattern.tiles, "Supercell repetitions")->capture_default_str();
  c_pattern->add_option("--step-deg", pattern.step_deg, "Angle grid step [deg]")->capture_default_str();
  c_pattern->add_flag("--uniform", pattern.uniform,
                      "Equal-aperture uniform (PEC, gamma = -1) reference instead of the design");
  c_pattern->add_option("-o,--out", pattern.out,
                        "CSV output: theta_deg, magnitude_db (re PEC peak), phase_deg")->capture_default_str();
  add_phase_source(c_pattern, pattern.phase);

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Reflection efficiency versus PEC over frequency");
  c_sweep->add_option("design", sweep.design, "Design JSON file")->check(CLI::ExistingFile);
  c_sweep->add_flag("--paper-table2", sweep.paper_table2, "Use the published design");
  c_sweep->add_option("--theta-i-deg", sweep.theta_i_deg, "Incidence angle [deg]")->capture_default_str();
  c_sweep->add_option("--tiles", sweep.tiles, "Supercell repetitions")->capture_default_str();
  c_sweep->add_option("--band", sweep.band, "Frequency band start:stop [GHz]")->capture_default_str();
  c_sweep->add_option("--points", sweep.points, "Frequency points")->capture_default_str();
  c_sweep->add_option("-o,--out", sweep.out, "CSV output: freq_ghz, ratio, ratio_db")->capture_default_str();
  add_phase_source(c_sweep, sweep.phase);

  ReplicaArgs replica;
  auto* c_replica =
      app.add_subcommand("replica", "Chamber measurement replica: received power vs Rx angle");
  c_replica->add_option("design", replica.design,
                        "Design JSON file (default: model design for 5 GHz, 30 deg, 10 cells)")
      ->check(CLI::ExistingFile);
  c_replica->add_flag("--paper-table2", replica.paper_table2, "Use the published design");
  c_replica->add_option("--band", replica.band, "Frequency band start:stop [GHz]")->capture_default_str();
  c_replica->add_option("--points", replica.points, "Frequency points")->capture_default_str();
  c_replica->add_option("--s", replica.s, "Tx and Rx distance from the panel [m]")->capture_default_str();
  c_replica->add_option("--pt-dbm", replica.pt_dbm, "Transmit power [dBm]")->capture_default_str();
  c_replica->add_option("--gt-dbi", replica.tx_gain_dbi, "Tx antenna gain [dBi]")->capture_default_str();
  c_replica->add_option("--gr-dbi", replica.rx_gain_dbi, "Rx antenna gain [dBi]")->capture_default_str();
  c_replica->add_option("--tx-angle-deg", replica.tx_angle_deg,
                        "Incidence angle of the Tx beam [deg]")->capture_default_str();
  c_replica->add_option("--angles", replica.angles, "Rx angles start:stop:step [deg]")->capture_default_str();
  c_replica->add_option("--tiles", replica.tiles, "Supercell repetitions on the panel")->capture_default_str();
  c_replica->add_option("--height-m", replica.height_m, "Panel transverse height [m]")->capture_default_str();
  c_replica->add_flag("--reference", replica.reference,
                      "Equal-aperture copper-plate reference instead of the design");
  c_replica->add_option("-o,--out", replica.out,
                        "CSV output: freq_ghz, rx_angle_deg, power_dbm")->capture_default_str();
  add_phase_source(c_replica, replica.phase);

  CoverageArgs coverage;
  auto* c_coverage = app.add_subcommand("coverage", "Indoor coverage heatmap of a scene (CSV)");
  c_coverage->add_option("scene", coverage.scene, "Scene JSON (positions in m, power in dBm)")
      ->required()
      ->check(CLI::ExistingFile);
  c_coverage->add_option("-o,--out", coverage.out,
                         "CSV output: x_m, y_m, power_dbm (NOCOV when unreachable)")->capture_default_str();
  add_phase_source(c_coverage, coverage.phase);

  MaskArgs mask;
  auto* c_mask = app.add_subcommand("mask", "Fabrication mask of a tiled design (SVG, mm)");
  c_mask->add_option("design", mask.design, "Design JSON file")->check(CLI::ExistingFile);
  c_mask->add_flag("--paper-table2", mask.paper_table2, "Use the published design");
  c_mask->add_option("--rows", mask.rows, "Rows along the transverse axis")->capture_default_str();
  c_mask->add_option("--periods", mask.periods, "Supercell periods along the gradient axis")->capture_default_str();
  c_mask->add_option("--transverse-pitch-mm", mask.transverse_pitch_mm,
                     "Row pitch [mm] (default: from the design, else 30)");
  c_mask->add_option("-o,--out", mask.out, "SVG output path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*c_design) run_design(design);
    else if (*c_pattern) run_pattern(pattern);
    else if (*c_sweep) run_sweep(sweep);
    else if (*c_replica) run_replica(replica);
    else if (*c_coverage) run_coverage(coverage);
    else if (*c_mask) run_mask(mask);
  } catch (const UsageError& e) {
    fmt::print(stderr, "usage error: {}\n", e.what());
    return 2;
  } catch (const Error& e) {
    fmt::print(stderr, "error [{}]: {}\n", to_string(e.kind()), e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
