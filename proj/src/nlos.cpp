#include "irs/nlos.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "irs/error.hpp"
#include "json.hpp"

namespace irs {

double norm(Vec2 v) { return std::hypot(v.x, v.y); }

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

Vec2 unit(Vec2 v) {
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorKind::InvalidGeometry, "panel normal must be a nonzero vector");
  }
  return (1.0 / n) * v;
}

double watts_from_dbm(double dbm) { return from_db_power(dbm - 30.0); }
double dbm_from_watts(double w) { return to_db_power(w) + 30.0; }

}  // namespace

bool segments_intersect(const Segment& s, const Segment& t) {
  const int o1 = orientation(s.a, s.b, t.a);
  const int o2 = orientation(s.a, s.b, t.b);
  const int o3 = orientation(t.a, t.b, s.a);
  const int o4 = orientation(t.a, t.b, s.b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(s.a, s.b, t.a)) return true;
  if (o2 == 0 && on_segment(s.a, s.b, t.b)) return true;
  if (o3 == 0 && on_segment(t.a, t.b, s.a)) return true;
  if (o4 == 0 && on_segment(t.a, t.b, s.b)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// IrsPanel

IrsPanel::IrsPanel(Vec2 center, Vec2 normal, ApertureProfile profile,
                   double transverse_height)
    : center_(center), normal_(unit(normal)), profile_(std::move(profile)),
      height_(transverse_height) {
  if (!(height_ > 0.0)) {
    throw Error(ErrorKind::InvalidGeometry, "panel transverse height must be positive");
  }
}

IrsPanel IrsPanel::from_design(Vec2 center, Vec2 normal, const SupercellSpec& spec,
                               const PhaseCurve& curve, int tiles, double transverse_height) {
  return IrsPanel(center, normal, build_profile(spec, curve, tiles), transverse_height);
}

IrsPanel IrsPanel::uniform_plate(Vec2 center, Vec2 normal, double length, int elements,
                                 double transverse_height, cplx gamma) {
  if (!(length > 0.0) || elements < 1) {
    throw Error(ErrorKind::InvalidGeometry, "plate needs positive length and elements");
  }
  return IrsPanel(center, normal, ApertureProfile::uniform(elements, length / elements, gamma),
                  transverse_height);
}

IrsPanel IrsPanel::placed(Vec2 center, Vec2 normal) const {
  return IrsPanel(center, normal, profile_, height_);
}

Segment IrsPanel::aperture() const {
  const Vec2 half = (0.5 * aperture_length()) * tangent();
  return {center_ - half, center_ + half};
}

bool IrsPanel::in_front(Vec2 p) const { return dot(p - center_, normal_) > 0.0; }

Angle IrsPanel::position_angle(Vec2 p) const {
  const Vec2 d = p - center_;
  return Angle::radians(std::atan2(dot(d, tangent()), dot(d, normal_)));
}

double IrsPanel::reference_gain_db(Frequency f) const {
  const double lambda = wavelength(f);
  return to_db_power(4.0 * kPi * aperture_length() * height_ / (lambda * lambda));
}

double IrsPanel::pattern_gain_db(Angle theta_inc, Angle theta_dep, Frequency f) const {
  const cplx e = aperture_field(profile_, wavenumber(f).k0, theta_dep.sin() - theta_inc.sin());
  return 20.0 * std::log10(std::abs(e) / aperture_length());
}

// ---------------------------------------------------------------------------
// Scene

int RxGrid::nx() const {
  return std::max(1, static_cast<int>(std::lround(extent.x / resolution)));
}
int RxGrid::ny() const {
  return std::max(1, static_cast<int>(std::lround(extent.y / resolution)));
}
Vec2 RxGrid::point(int i, int j) const {
  return {origin.x + (i + 0.5) * resolution, origin.y + (j + 0.5) * resolution};
}

void Scene2D::validate() const {
  if (!(grid.resolution > 0.0) || !(grid.extent.x > 0.0) || !(grid.extent.y > 0.0)) {
    throw Error(ErrorKind::InvalidGeometry, "receiver grid needs positive extent and resolution");
  }
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const Segment ap = panels[p].aperture();
    for (std::size_t o = 0; o < obstacles.size(); ++o) {
      if (segments_intersect(ap, obstacles[o])) {
        throw Error(ErrorKind::InvalidGeometry,
                    fmt::format("panel {} aperture intersects obstacle {}", p, o));
      }
    }
  }
}

double friis_loss(Frequency f, double distance) {
  if (!(distance > 0.0)) {
    throw Error(ErrorKind::InvalidInput,
                fmt::format("link distance must be positive, got {} m", distance));
  }
  return 20.0 * std::log10(4.0 * kPi * distance / wavelength(f));
}

bool los_visible(const Scene2D& scene, Vec2 a, Vec2 b) {
  const Segment ray{a, b};
  return std::none_of(scene.obstacles.begin(), scene.obstacles.end(),
                      [&](const Segment& o) { return segments_intersect(ray, o); });
}

LinkResult direct_link(const Scene2D& scene, Vec2 rx) {
  LinkResult r;
  const double d = norm(rx - scene.tx.position);
  if (!(d > 0.0) || !los_visible(scene, scene.tx.position, rx)) return r;
  r.path = PathKind::Direct;
  r.power_dbm = scene.tx.power_dbm + scene.tx.gain_dbi + scene.rx_gain_dbi -
                friis_loss(scene.frequency, d);
  return r;
}

LinkResult panel_link(const Scene2D& scene, std::size_t panel_index, Vec2 rx) {
  const IrsPanel& panel = scene.panels.at(panel_index);
  LinkResult r;
  r.panel_index = static_cast<int>(panel_index);
  const Vec2 tx = scene.tx.position;
  const Vec2 c = panel.center();
  if (!panel.in_front(tx) || !panel.in_front(rx)) return r;
  if (!los_visible(scene, tx, c) || !los_visible(scene, c, rx)) return r;

  // The incident wave travels away from the Tx side, so its pattern-convention
  // angle is the negated position angle.
  r.theta_inc = -panel.position_angle(tx);
  r.theta_dep = panel.position_angle(rx);
  const Frequency f = scene.frequency;
  const double scatter =
      panel.reference_gain_db(f) + panel.pattern_gain_db(r.theta_inc, r.theta_dep, f);
  r.path = PathKind::ViaPanel;
  r.power_dbm = scene.tx.power_dbm + scene.tx.gain_dbi + scene.rx_gain_dbi -
                friis_loss(f, norm(c - tx)) - friis_loss(f, norm(rx - c)) + scatter;
  return r;
}

namespace {

std::optional<double> cell_power(const Scene2D& scene, Vec2 rx) {
  double watts = 0.0;
  bool any = false;
  auto add = [&](const LinkResult& l) {
    if (l.power_dbm) {
      watts += watts_from_dbm(*l.power_dbm);
      any = true;
    }
  };
  add(direct_link(scene, rx));
  for (std::size_t p = 0; p < scene.panels.size(); ++p) add(panel_link(scene, p, rx));
  if (!any) return std::nullopt;
  return dbm_from_watts(watts);
}

CoverageMap empty_map(const Scene2D& scene) {
  scene.validate();
  CoverageMap m{scene.grid, scene.grid.nx(), scene.grid.ny(), {}};
  m.power_dbm.resize(static_cast<std::size_t>(m.nx) * static_cast<std::size_t>(m.ny));
  return m;
}

}  // namespace

CoverageMap coverage_map(const Scene2D& scene) {
  CoverageMap m = empty_map(scene);
  const int total = m.nx * m.ny;
#pragma omp parallel for schedule(dynamic, 64)
  for (int k = 0; k < total; ++k) {
    m.power_dbm[static_cast<std::size_t>(k)] =
        cell_power(scene, scene.grid.point(k % m.nx, k / m.nx));
  }
  return m;
}

namespace reference {

CoverageMap coverage_map(const Scene2D& scene) {
  CoverageMap m = empty_map(scene);
  for (int j = 0; j < m.ny; ++j) {
    for (int i = 0; i < m.nx; ++i) {
      const Vec2 rx = scene.grid.point(i, j);
      double watts = 0.0;
      bool any = false;
      if (const auto d = direct_link(scene, rx).power_dbm) {
        watts += watts_from_dbm(*d);
        any = true;
      }
      for (std::size_t p = 0; p < scene.panels.size(); ++p) {
        if (const auto v = panel_link(scene, p, rx).power_dbm) {
          watts += watts_from_dbm(*v);
          any = true;
        }
      }
      m.power_dbm[static_cast<std::size_t>(j * m.nx + i)] =
          any ? std::optional<double>(dbm_from_watts(watts)) : std::nullopt;
    }
  }
  return m;
}

}  // namespace reference

std::vector<SweepRow> angle_sweep_replica(const IrsPanel& panel,
                                          std::span<const Frequency> band,
                                          std::span<const Angle> angles,
                                          const ReplicaOptions& options) {
  if (!(options.distance > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "replica distance must be positive");
  }
  const IrsPanel mounted = panel.placed({0.0, 0.0}, {0.0, 1.0});
  const double s = options.distance;
  // Tangent is +x, so position angle alpha maps to (sin alpha, cos alpha).
  const double alpha_tx = -options.incidence.rad();
  const Vec2 tx{s * std::sin(alpha_tx), s * std::cos(alpha_tx)};

  std::vector<SweepRow> rows;
  rows.reserve(band.size() * angles.size());
  for (const Frequency f : band) {
    Scene2D scene{f, {tx, options.pt_dbm, options.tx_gain_dbi}, options.rx_gain_dbi,
                  {}, {mounted}, {{-s, -s}, {2 * s, 2 * s}, s}};
    for (const Angle a : angles) {
      const Vec2 rx{s * a.sin(), s * a.cos()};
      rows.push_back({f, a, panel_link(scene, 0, rx).power_dbm});
    }
  }
  return rows;
}

std::vector<Frequency> frequency_band(double start_hz, double stop_hz, int points) {
  if (points < 1 || !(stop_hz >= start_hz)) {
    throw Error(ErrorKind::InvalidInput, "band needs points >= 1 and stop >= start");
  }
  std::vector<Frequency> out;
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? start_hz
                                 : (i == points - 1 ? stop_hz
                                                    : start_hz + (stop_hz - start_hz) * i /
                                                                     (points - 1));
    out.emplace_back(f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scene JSON

namespace {

Vec2 read_vec2(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw Error(ErrorKind::InvalidInput, "expected a 2-element [x, y] array");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

Scene2D load_scene(const std::filesystem::path& path, const PhaseSourceResolver& resolve) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, fmt::format("cannot open scene {}", path.string()));
  const auto base = path.parent_path();
  auto resolve_path = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };

  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    const Frequency f = Frequency::ghz(j.at("frequency_ghz").get<double>());
    const auto& jt = j.at("tx");
    Transmitter tx{read_vec2(jt.at("position_m")), jt.value("power_dbm", 14.0),
                   jt.value("gain_dbi", 0.0)};

    std::vector<Segment> obstacles;
    for (const auto& o : j.value("obstacles", nlohmann::json::array())) {
      if (!o.is_array() || o.size() != 2) {
        throw Error(ErrorKind::InvalidInput, "obstacle must be [[x, y], [x, y]]");
      }
      obstacles.push_back({read_vec2(o[0]), read_vec2(o[1])});
    }

    std::vector<IrsPanel> panels;
    for (const auto& p : j.value("panels", nlohmann::json::array())) {
      const std::string design = p.at("design").get<std::string>();
      const SupercellSpec spec =
          design == "paper-table2" ? table2_reference_spec() : load_design(resolve_path(design));
      const Vec2 center = read_vec2(p.at("center_m"));
      const Vec2 normal = read_vec2(p.at("normal"));
      const int tiles = p.value("tiles", 2);
      const double height = p.value("height_m", IrsPanel::kDefaultHeight);
      if (p.value("uniform", false)) {
        panels.push_back(IrsPanel::uniform_plate(center, normal, tiles * spec.period,
                                                 tiles * spec.n_cells, height));
        continue;
      }
      std::optional<std::filesystem::path> table;
      if (p.contains("phase_table")) table = resolve_path(p["phase_table"].get<std::string>());
      panels.push_back(IrsPanel::from_design(center, normal, spec, resolve(spec, table), tiles,
                                             height));
    }

    const auto& g = j.at("grid");
    RxGrid grid{read_vec2(g.at("origin_m")), read_vec2(g.at("extent_m")),
                g.at("resolution_m").get<double>()};
    Scene2D scene{f, tx, j.value("rx_gain_dbi", 0.0), std::move(obstacles), std::move(panels),
                  grid};
    scene.validate();
    return scene;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidInput, fmt::format("scene {}: {}", path.string(), e.what()));
  }
}

void write_coverage_csv(std::ostream& out, const CoverageMap& map) {
  out << "x_m, y_m, power_dbm\n";
  for (int j = 0; j < map.ny; ++j) {
    for (int i = 0; i < map.nx; ++i) {
      const Vec2 p = map.grid.point(i, j);
      if (const auto& v = map.at(i, j)) {
        fmt::print(out, "{:.4f}, {:.4f}, {:.4f}\n", p.x, p.y, *v);
      } else {
        fmt::print(out, "{:.4f}, {:.4f}, NOCOV\n", p.x, p.y);
      }
    }
  }
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "freq_ghz, rx_angle_deg, power_dbm\n";
  for (const auto& r : rows) {
    if (r.power_dbm) {
      fmt::print(out, "{:.6f}, {:.4f}, {:.4f}\n", r.frequency.ghz_value(), r.rx_angle.deg(),
                 *r.power_dbm);
    } else {
      fmt::print(out, "{:.6f}, {:.4f}, NOCOV\n", r.frequency.ghz_value(), r.rx_angle.deg());
    }
  }
}

}  // namespace irs
