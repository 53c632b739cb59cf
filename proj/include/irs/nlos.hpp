#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "irs/em_core.hpp"
#include "irs/far_field.hpp"
#include "irs/gradient_design.hpp"

namespace irs {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 v);

struct Segment {
  Vec2 a;
  Vec2 b;
};

/// Closed-segment test; touching or collinear overlap counts as intersecting.
bool segments_intersect(const Segment& s, const Segment& t);

/// A passive reflecting panel. The gradient axis (profile +x) runs along the
/// tangent (n.y, -n.x).
class IrsPanel {
 public:
  static constexpr double kDefaultHeight = 0.36;  // m

  IrsPanel(Vec2 center, Vec2 normal, ApertureProfile profile,
           double transverse_height = kDefaultHeight);

  static IrsPanel from_design(Vec2 center, Vec2 normal, const SupercellSpec& spec,
                              const PhaseCurve& curve, int tiles,
                              double transverse_height = kDefaultHeight);
  /// Flat plate of `elements` equal strips with reflection coefficient gamma.
  static IrsPanel uniform_plate(Vec2 center, Vec2 normal, double length, int elements,
                                double transverse_height = kDefaultHeight,
                                cplx gamma = -1.0);

  IrsPanel placed(Vec2 center, Vec2 normal) const;

  Vec2 center() const noexcept { return center_; }
  Vec2 normal() const noexcept { return normal_; }
  Vec2 tangent() const noexcept { return {normal_.y, -normal_.x}; }
  double aperture_length() const noexcept { return profile_.length(); }
  double transverse_height() const noexcept { return height_; }
  const ApertureProfile& profile() const noexcept { return profile_; }
  Segment aperture() const;

  bool in_front(Vec2 p) const;
  /// Signed angle of p from the normal, positive toward the tangent.
  Angle position_angle(Vec2 p) const;
  /// 10 log10(4 pi A / lambda^2) with A = aperture_length * transverse_height.
  double reference_gain_db(Frequency f) const;
  /// 20 log10(|E| / aperture_length): pattern relative to the equal-aperture
  /// PEC specular peak.
  double pattern_gain_db(Angle theta_inc, Angle theta_dep, Frequency f) const;

 private:
  Vec2 center_;
  Vec2 normal_;
  ApertureProfile profile_;
  double height_;
};

struct Transmitter {
  Vec2 position;
  double power_dbm = 14.0;
  double gain_dbi = 0.0;
};

/// Receiver sample points at cell centres origin + ((i + 1/2) r, (j + 1/2) r).
struct RxGrid {
  Vec2 origin;
  Vec2 extent;
  double resolution;

  int nx() const;
  int ny() const;
  Vec2 point(int i, int j) const;
};

struct Scene2D {
  Frequency frequency;
  Transmitter tx;
  double rx_gain_dbi = 0.0;
  std::vector<Segment> obstacles;
  std::vector<IrsPanel> panels;
  RxGrid grid;

  /// Throws Error{InvalidGeometry} for bad grids or panels crossing obstacles.
  void validate() const;
};

enum class PathKind { Direct, ViaPanel, Blocked };

struct LinkResult {
  PathKind path = PathKind::Blocked;
  int panel_index = -1;
  std::optional<double> power_dbm;
  /// Pattern-convention incidence angle (specular departure equals it).
  Angle theta_inc;
  Angle theta_dep;
};

/// 20 log10(4 pi d / lambda).
double friis_loss(Frequency f, double distance);

bool los_visible(const Scene2D& scene, Vec2 a, Vec2 b);

LinkResult direct_link(const Scene2D& scene, Vec2 rx);

/// Two-hop Tx -> panel -> Rx budget:
///   P_t + G_t + G_r - FSPL(d1) - FSPL(d2) + S_ref + 20 log10(|E| / L)
LinkResult panel_link(const Scene2D& scene, std::size_t panel_index, Vec2 rx);

struct CoverageMap {
  RxGrid grid;
  int nx;
  int ny;
  /// Row-major (j * nx + i); empty when no path reaches the cell.
  std::vector<std::optional<double>> power_dbm;

  const std::optional<double>& at(int i, int j) const {
    return power_dbm[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) +
                     static_cast<std::size_t>(i)];
  }
};

/// Incoherent power sum of every visible path per grid cell. OpenMP over cells.
CoverageMap coverage_map(const Scene2D& scene);

namespace reference {
CoverageMap coverage_map(const Scene2D& scene);
}  // namespace reference

struct ReplicaOptions {
  double distance = 1.5;  // m, Tx and Rx range from the panel centre
  double pt_dbm = 14.0;
  double tx_gain_dbi = 0.0;
  double rx_gain_dbi = 0.0;
  Angle incidence;  // 0 = Tx on the panel normal
};

struct SweepRow {
  Frequency frequency;
  Angle rx_angle;
  std::optional<double> power_dbm;
};

/// Chamber-style replica: Tx fixed at the incidence angle, Rx swept over
/// `angles` on a circle of the same radius, for every frequency.
std::vector<SweepRow> angle_sweep_replica(const IrsPanel& panel,
                                          std::span<const Frequency> band,
                                          std::span<const Angle> angles,
                                          const ReplicaOptions& options = {});

/// Evenly spaced frequencies including both ends.
std::vector<Frequency> frequency_band(double start_hz, double stop_hz, int points);

/// Resolves a panel's phase source: design plus optional table path.
using PhaseSourceResolver = std::function<PhaseCurve(
    const SupercellSpec& spec, const std::optional<std::filesystem::path>& table)>;

/// Scene JSON: frequency_ghz, tx {position_m, power_dbm, gain_dbi}, rx_gain_dbi,
/// obstacles [[[x, y], [x, y]], ...], panels [{design, center_m, normal, tiles,
/// height_m, phase_table, uniform}], grid {origin_m, extent_m, resolution_m}.
/// Relative paths resolve against the scene file's directory.
Scene2D load_scene(const std::filesystem::path& path, const PhaseSourceResolver& resolve);

/// "x_m, y_m, power_dbm" with NOCOV for uncovered cells.
void write_coverage_csv(std::ostream& out, const CoverageMap& map);
/// "freq_ghz, rx_angle_deg, power_dbm"
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace irs
