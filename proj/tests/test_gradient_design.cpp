#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "irs/error.hpp"
#include "irs/gradient_design.hpp"
#include "oracles.hpp"

using namespace irs;

namespace {

const Frequency f5 = Frequency::ghz(5.0);

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no irs::Error thrown");
  return ErrorKind::IoError;
}

}  // namespace

TEST_SUITE("gradient_design") {
  TEST_CASE("period for angle") {
    CHECK(period_for_angle(f5, Angle::degrees(30.0)) * 1e3 == doctest::Approx(119.917).epsilon(1e-5));
    CHECK(period_for_angle(f5, Angle::degrees(89.999)) ==
          doctest::Approx(wavelength(f5)).epsilon(1e-6));
    CHECK(period_for_angle(f5, Angle::degrees(14.48)) * 1e3 == doctest::Approx(239.8).epsilon(1e-3));
    CHECK(kind_of([] { period_for_angle(f5, Angle::degrees(0.0)); }) == ErrorKind::NoFinitePeriod);
    CHECK(kind_of([] { period_for_angle(f5, Angle::degrees(90.0)); }) == ErrorKind::InvalidAngle);
    CHECK(kind_of([] { period_for_angle(f5, Angle::degrees(-10.0)); }) == ErrorKind::InvalidAngle);
  }

  TEST_CASE("parallel wavevector ratio") {
    const double lambda = wavelength(f5);
    CHECK(parallel_wavevector_ratio(0.120, f5) == doctest::Approx(0.49965).epsilon(1e-4));
    CHECK(parallel_wavevector_ratio(lambda, f5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(parallel_wavevector_ratio(2.0 * lambda, f5) == doctest::Approx(0.5).epsilon(1e-15));
    const GradientLaw law{2.0 * kPi / 0.120, wavenumber(f5)};
    CHECK(law.ratio() == doctest::Approx(parallel_wavevector_ratio(0.120, f5)).epsilon(1e-14));
  }

  TEST_CASE("anomalous angle examples") {
    CHECK(anomalous_angle({}, 0.120, f5).deg() == doctest::Approx(30.0).epsilon(0.05 / 30.0));
    CHECK(std::abs(anomalous_angle(Angle::degrees(5), 0.120, f5).deg() - 36.0) <= 0.5);
    CHECK(std::abs(anomalous_angle(Angle::degrees(10), 0.120, f5).deg() - 42.0) <= 0.5);
    CHECK(std::abs(anomalous_angle(Angle::degrees(15), 0.120, f5).deg() - 49.0) <= 0.5);
    const Angle th = Angle::degrees(12.3);
    CHECK(anomalous_angle(th, 1e12, f5).rad() == doctest::Approx(th.rad()).epsilon(1e-9));
    CHECK(kind_of([] { anomalous_angle(Angle::degrees(40), 0.120, f5); }) ==
          ErrorKind::EvanescentOrder);
    CHECK(kind_of([] { anomalous_angle({}, 0.5 * wavelength(f5), f5); }) ==
          ErrorKind::EvanescentOrder);
  }

  TEST_CASE("normal incidence is arcsin(lambda / P)") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
      const Frequency f = Frequency::ghz(1.0 + 20.0 * u01(rng));
      const double p = wavelength(f) * (1.0 + 20.0 * u01(rng));
      CHECK(anomalous_angle({}, p, f).rad() == std::asin(wavelength(f) / p));
    }
  }

  TEST_CASE("anomalous angle increases with incidence") {
    for (double p : {0.07, 0.12, 0.24, 0.6}) {
      double prev = -10.0;
      for (double deg = -89.0; deg <= 89.0; deg += 0.5) {
        try {
          const double r = anomalous_angle(Angle::degrees(deg), p, f5).rad();
          CHECK(r > prev);
          prev = r;
        } catch (const Error& e) {
          CHECK(e.kind() == ErrorKind::EvanescentOrder);
          CHECK(std::sin(deg_to_rad(deg)) + wavelength(f5) / p > 1.0);
        }
      }
    }
  }

  TEST_CASE("grating equation equivalence for P = m lambda") {
    for (int m = 2; m <= 8; ++m) {
      const double lambda = oracle::c0 / 5e9;
      const double p = m * lambda;
      // First diffraction order of a grating with period P: sin(theta) = lambda / P.
      const double grating = std::asin(1.0 * lambda / p);
      CHECK(std::abs(anomalous_angle({}, p, f5).rad() - grating) < 1e-12);
      CHECK(std::abs(grating - std::asin(1.0 / m)) < 1e-12);
    }
  }

  TEST_CASE("phase profile increments") {
    for (int n : {2, 3, 4, 7, 10, 16}) {
      const double p = 0.12;
      const auto ph = phase_profile(n, p);
      REQUIRE(ph.size() == static_cast<std::size_t>(n));
      const double pitch = p / n;
      for (int i = 0; i < n; ++i) {
        const double x = (i + 0.5) * pitch;
        CHECK(std::abs(wrap_phase(ph[i] - (-2.0 * kPi / p * x))) < 1e-12);
        CHECK(ph[i] > -kPi);
        CHECK(ph[i] <= kPi);
      }
      for (int i = 1; i < n; ++i) {
        CHECK(std::abs(wrap_phase(ph[i] - ph[i - 1] + 2.0 * kPi / n)) < 1e-12);
      }
    }
    const auto two = phase_profile(2, 0.1);
    CHECK(std::abs(std::abs(wrap_phase(two[1] - two[0])) - kPi) < 1e-12);
    const auto four = phase_profile(4, 0.37);
    for (int i = 1; i < 4; ++i) {
      CHECK(std::abs(wrap_phase(four[i] - (four[0] - i * kPi / 2.0))) < 1e-12);
    }
    CHECK_THROWS_AS(phase_profile(1, 0.1), Error);
  }

  TEST_CASE("design_supercell end to end") {
    const auto curve = surrogate_phase_curve(f5);
    const auto spec = design_supercell(f5, Angle::degrees(30.0), 10, curve);
    spec.validate();
    CHECK(spec.n_cells == 10);
    CHECK(spec.period * 1e3 == doctest::Approx(119.917).epsilon(1e-5));
    CHECK(std::abs(spec.period - spec.n_cells * spec.pitch) < 1e-12);
    REQUIRE(spec.phases.has_value());
    REQUIRE(spec.phases->size() == 10);
    REQUIRE(spec.patch_sizes.size() == 10);
    for (int i = 1; i < 10; ++i) {
      CHECK(std::abs((*spec.phases)[i] - (*spec.phases)[i - 1] + deg_to_rad(36.0)) < 1e-12);
      CHECK(spec.patch_sizes[i] > spec.patch_sizes[i - 1]);
    }
    CHECK(spec.patch_width.value() == doctest::Approx(11e-3));
    CHECK(spec.transverse_pitch.value() == doctest::Approx(30e-3));

    const auto stack = LayerStack::paper_on_mdf();
    for (int i = 0; i < 10; ++i) {
      const PatchCell cell{CellGeometry::paper(), spec.patch_sizes[i], stack};
      const double got = std::arg(reflection_coefficient(cell, f5));
      CHECK(std::abs(wrap_phase(got - (*spec.phases)[i])) < deg_to_rad(1.0));
    }
  }

  TEST_CASE("design_supercell failure modes") {
    const auto curve = surrogate_phase_curve(f5);
    CHECK_THROWS_AS(design_supercell(f5, Angle::degrees(30.0), 1, curve), Error);
    const auto half = phase_curve(LayerStack::paper_on_mdf(), CellGeometry::paper(), 14e-3,
                                  21.2e-3, 200, f5);
    REQUIRE(half.phase_span() < 1.2 * kPi);
    try {
      design_supercell(f5, Angle::degrees(30.0), 10, half);
      FAIL("short curve accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::PhaseUnreachable);
      CHECK(std::string(e.what()).find("cell") != std::string::npos);
    }
  }

  TEST_CASE("published reference design") {
    const auto spec = table2_reference_spec();
    spec.validate();
    CHECK(spec.period == doctest::Approx(0.120));
    CHECK(spec.pitch == doctest::Approx(0.012));
    CHECK(spec.patch_sizes.size() == 10);
    CHECK_FALSE(spec.phases.has_value());
    const auto [lo, hi] = std::minmax_element(spec.patch_sizes.begin(), spec.patch_sizes.end());
    CHECK(*lo == doctest::Approx(16.4e-3));
    CHECK(*hi == doctest::Approx(21.3e-3));
    CHECK_FALSE(spec.mapping_note.empty());
  }

  TEST_CASE("design JSON round trip") {
    const auto curve = surrogate_phase_curve(f5);
    for (const auto& spec :
         {design_supercell(f5, Angle::degrees(30.0), 10, curve), table2_reference_spec()}) {
      const std::string text = to_design_json(spec);
      for (const char* key : {"frequency_hz", "n_cells", "pitch_mm", "period_mm", "phases_deg",
                              "patch_sizes_mm", "mapping_note"}) {
        CHECK(text.find(key) != std::string::npos);
      }
      const auto back = from_design_json(text);
      CHECK(to_design_json(back) == text);
      CHECK(back.n_cells == spec.n_cells);
      CHECK(back.phases.has_value() == spec.phases.has_value());
      for (std::size_t i = 0; i < spec.patch_sizes.size(); ++i) {
        CHECK(std::abs(back.patch_sizes[i] - spec.patch_sizes[i]) <= 1e-12);
      }
    }
    CHECK_THROWS_AS(from_design_json("{\"n_cells\": 3}"), Error);
    CHECK_THROWS_AS(from_design_json("not json"), Error);
    const auto dir = std::filesystem::temp_directory_path() / "irs_design_test";
    std::filesystem::create_directories(dir);
    save_design(table2_reference_spec(), dir / "d.json");
    CHECK(to_design_json(load_design(dir / "d.json")) == to_design_json(table2_reference_spec()));
  }
}
