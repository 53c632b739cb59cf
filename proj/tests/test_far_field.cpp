#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "irs/error.hpp"
#include "irs/far_field.hpp"
#include "oracles.hpp"

using namespace irs;

namespace {

const Frequency f5 = Frequency::ghz(5.0);

std::size_t grid_index(const AngleGrid& g, double deg) {
  const auto r = g.radians();
  const auto it = std::min_element(r.begin(), r.end(), [&](double a, double b) {
    return std::abs(a - deg_to_rad(deg)) < std::abs(b - deg_to_rad(deg));
  });
  return static_cast<std::size_t>(it - r.begin());
}

ApertureProfile random_profile(std::mt19937_64& rng, bool uniform_gamma) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 40);
  const int n = count(rng);
  const double w = 2e-3 + 30e-3 * u01(rng);
  const cplx g0 = std::polar(0.1 + 0.9 * u01(rng), 2.0 * kPi * u01(rng));
  std::vector<ApertureElement> el;
  double x = -0.3 * u01(rng);
  for (int i = 0; i < n; ++i) {
    const cplx g = uniform_gamma ? g0 : std::polar(0.1 + 0.9 * u01(rng), 2.0 * kPi * u01(rng));
    el.push_back({x + 0.5 * w, w, g});
    x += w + (uniform_gamma ? 0.0 : 5e-3 * u01(rng));
  }
  return ApertureProfile(el);
}

}  // namespace

TEST_SUITE("far_field") {
  TEST_CASE("profile validation") {
    CHECK_THROWS_AS(ApertureProfile({}), Error);
    CHECK_THROWS_AS(ApertureProfile({{0.0, 0.0, 1.0}}), Error);
    CHECK_THROWS_AS(ApertureProfile({{0.01, 0.01, 1.0}, {0.0, 0.01, 1.0}}), Error);
    CHECK_THROWS_AS(ApertureProfile({{0.0, 0.02, 1.0}, {0.015, 0.02, 1.0}}), Error);
    const auto u = ApertureProfile::uniform(4, 0.01, -1.0);
    CHECK(u.length() == doctest::Approx(0.04));
    CHECK(u.elements()[0].x == doctest::Approx(0.005));
  }

  TEST_CASE("angle grid") {
    const auto g = AngleGrid::standard();
    CHECK(g.size() == 1801);
    CHECK(g.radians().front() == doctest::Approx(-kPi / 2));
    CHECK(g.radians().back() == doctest::Approx(kPi / 2));
    CHECK_THROWS_AS(AngleGrid({0.1, 0.0}), Error);
    CHECK_THROWS_AS(AngleGrid({0.0, 2.0}), Error);
  }

  TEST_CASE("build_profile tiling") {
    const auto curve = surrogate_phase_curve(f5);
    const auto spec = table2_reference_spec();
    const auto one = build_profile(spec, curve, 1);
    CHECK(one.size() == 10);
    CHECK(one.length() == doctest::Approx(spec.period));
    const auto three = build_profile(spec, curve, 3);
    CHECK(three.size() == 30);
    CHECK(three.length() == doctest::Approx(0.360));
    CHECK(three.elements()[17].gamma == one.elements()[7].gamma);
    CHECK(three.elements()[17].x == doctest::Approx(one.elements()[7].x + spec.period));
    const auto pec = three.with_uniform_gamma(-1.0);
    for (const auto& e : pec.elements()) CHECK(e.gamma == cplx(-1.0));

    auto bad = spec;
    bad.patch_sizes[0] = 10e-3;
    try {
      build_profile(bad, curve, 1);
      FAIL("out of range size accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InterpolationOutOfRange);
    }
    CHECK_THROWS_AS(build_profile(spec, curve, 0), Error);
  }

  TEST_CASE("single element follows the sinc envelope") {
    const double w = 0.05;
    const ApertureProfile one({{0.0, w, cplx(0.3, -0.4)}});
    const auto p = scattered_pattern(one, Angle::degrees(20.0), f5);
    const double k0 = wavenumber(f5).k0;
    for (std::size_t i = 0; i < p.theta.size(); ++i) {
      const double u = std::sin(p.theta[i]) - std::sin(deg_to_rad(20.0));
      const double a = k0 * w * u / 2.0;
      const double sinc = a == 0.0 ? 1.0 : std::sin(a) / a;
      CHECK(std::abs(std::abs(p.amplitude[i]) - 0.5 * w * std::abs(sinc)) < 1e-15);
    }
  }

  TEST_CASE("kernel matches serial reference") {
    std::mt19937_64 rng(8);
    for (int k = 0; k < 20; ++k) {
      const auto prof = random_profile(rng, false);
      const Angle th = Angle::degrees(-60.0 + 120.0 * (k / 19.0));
      const auto fast = scattered_pattern(prof, th, f5);
      const auto slow = reference::scattered_pattern(prof, th, f5);
      REQUIRE(fast.amplitude.size() == slow.amplitude.size());
      double scale = 0.0;
      for (const auto& a : slow.amplitude) scale = std::max(scale, std::abs(a));
      for (std::size_t i = 0; i < fast.amplitude.size(); ++i) {
        CHECK(std::abs(fast.amplitude[i] - slow.amplitude[i]) <= 1e-12 * scale);
      }
    }
  }

  TEST_CASE("specular identity for random uniform profiles") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> ang(-80.0, 80.0);
    const auto grid = AngleGrid::standard();
    for (int k = 0; k < 100; ++k) {
      const auto prof = random_profile(rng, true);
      const Angle th = Angle::degrees(ang(rng));
      const auto p = scattered_pattern(prof, th, Frequency::ghz(1.0 + k * 0.1), grid);
      CHECK(std::abs(peak_angle(p).deg() - th.deg()) <= 0.1 + 1e-9);
    }
  }

  TEST_CASE("reciprocity") {
    const auto curve = surrogate_phase_curve(f5);
    const auto spec = design_supercell(f5, Angle::degrees(30.0), 10, curve);
    const auto prof = build_profile(spec, curve, 4);
    const auto grid = AngleGrid::standard();
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> pick(-800, 800);
    for (int k = 0; k < 40; ++k) {
      const double a = pick(rng) * 0.1;
      const auto pa = scattered_pattern(prof, Angle::degrees(a), f5, grid);
      const double b = pick(rng) * 0.1;
      const auto pb = scattered_pattern(prof, Angle::degrees(-b), f5, grid);
      const double ea = std::abs(pa.amplitude[grid_index(grid, b)]);
      const double eb = std::abs(pb.amplitude[grid_index(grid, -a)]);
      CHECK(std::abs(ea - eb) <= 1e-9 * std::max(ea, 1e-300));
    }
    // Mirror-symmetric profile: the plain swap also holds.
    const auto sym = ApertureProfile::uniform(24, 12e-3, cplx(-0.8, 0.1));
    for (int k = 0; k < 40; ++k) {
      const double a = pick(rng) * 0.1;
      const double b = pick(rng) * 0.1;
      const auto pa = scattered_pattern(sym, Angle::degrees(a), f5, grid);
      const auto pb = scattered_pattern(sym, Angle::degrees(b), f5, grid);
      const double ea = std::abs(pa.amplitude[grid_index(grid, b)]);
      const double eb = std::abs(pb.amplitude[grid_index(grid, a)]);
      CHECK(std::abs(ea - eb) <= 1e-9 * std::max(ea, 1e-300));
    }
  }

  TEST_CASE("unit phase factor leaves the magnitude unchanged") {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 20; ++k) {
      const auto prof = random_profile(rng, false);
      const cplx rot = std::polar(1.0, 0.7 * k);
      std::vector<ApertureElement> el(prof.elements().begin(), prof.elements().end());
      for (auto& e : el) e.gamma *= rot;
      const auto p1 = scattered_pattern(prof, Angle::degrees(7.0), f5);
      const auto p2 = scattered_pattern(ApertureProfile(el), Angle::degrees(7.0), f5);
      for (std::size_t i = 0; i < p1.amplitude.size(); ++i) {
        CHECK(std::abs(std::abs(p1.amplitude[i]) - std::abs(p2.amplitude[i])) <=
              1e-12 * std::max(std::abs(p1.amplitude[i]), 1e-3));
      }
    }
  }

  TEST_CASE("beam sharpens with tiles") {
    const auto curve = surrogate_phase_curve(f5);
    const auto spec = design_supercell(f5, Angle::degrees(30.0), 10, curve);
    double prev = 10.0;
    for (int tiles : {2, 4, 8, 16}) {
      const auto p = scattered_pattern(build_profile(spec, curve, tiles), {}, f5);
      const double bw = beam_width_3db(p);
      CHECK(bw < prev);
      prev = bw;
    }
  }

  TEST_CASE("gradient law peaks") {
    const auto curve = surrogate_phase_curve(f5);
    const auto spec = design_supercell(f5, Angle::degrees(30.0), 10, curve);
    const auto prof = build_profile(spec, curve, 10);
    for (double ti : {0.0, 5.0, 10.0, 15.0}) {
      const auto p = scattered_pattern(prof, Angle::degrees(ti), f5);
      const double want = anomalous_angle(Angle::degrees(ti), spec.period, f5).deg();
      CHECK(std::abs(peak_angle(p).deg() - want) <= 2.0);
    }
  }

  TEST_CASE("peak angle tie breaks toward broadside") {
    AperturePattern p{{-0.2, -0.1, 0.0, 0.1}, {1.0, 0.5, 0.2, cplx(0.0, 1.0)}, f5, {}, 1.0};
    CHECK(peak_angle(p).rad() == doctest::Approx(0.1));
    p.amplitude = {2.0, 0.0, 0.0, 2.0};
    p.theta = {-0.3, -0.1, 0.0, 0.2};
    CHECK(peak_angle(p).rad() == doctest::Approx(0.2));
  }

  TEST_CASE("directivity") {
    AperturePattern iso{{-1.0, -0.5, 0.0, 0.5, 1.0}, std::vector<cplx>(5, cplx(0.0, 2.0)), f5,
                        {}, 1.0};
    CHECK(peak_directivity(iso).linear == doctest::Approx(1.0));
    CHECK(peak_directivity(iso).db == doctest::Approx(0.0));
    iso.amplitude.assign(5, 0.0);
    try {
      peak_directivity(iso);
      FAIL("zero pattern accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::UndefinedDirectivity);
    }
    for (int tiles : {2, 4, 8}) {
      const auto d1 = peak_directivity(
          scattered_pattern(ApertureProfile::uniform(10 * tiles, 12e-3, -1.0), {}, f5));
      const auto d2 = peak_directivity(
          scattered_pattern(ApertureProfile::uniform(20 * tiles, 12e-3, -1.0), {}, f5));
      CHECK(std::abs(d2.db - d1.db - 3.0) <= 0.3);
    }
  }

  TEST_CASE("efficiency against the PEC plate") {
    const auto curve = surrogate_phase_curve(f5);
    const auto spec = design_supercell(f5, Angle::degrees(30.0), 10, curve);
    const std::vector<Frequency> band{Frequency::ghz(4.9), f5, Frequency::ghz(5.1)};
    const CellResponse pec = [](double, Frequency) { return cplx(-1.0); };
    for (double r : efficiency_vs_pec(spec, pec, {}, band, 10)) {
      CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
    }
    const auto lossless = surrogate_phase_curve(f5, true);
    const auto spec_l = design_supercell(f5, Angle::degrees(30.0), 10, lossless);
    const std::vector<Frequency> one{f5};
    const double r_lossless = efficiency_vs_pec(spec_l, lossless, {}, one, 10)[0];
    const double r_lossy = efficiency_vs_pec(spec, curve, {}, one, 10)[0];
    CHECK(std::abs(r_lossless - oracle::quantization_efficiency(10)) <= 0.01);
    CHECK(r_lossy < r_lossless);
    CHECK(r_lossless <= 1.0);
  }

  TEST_CASE("pattern and efficiency CSV") {
    const auto p = scattered_pattern(ApertureProfile::uniform(10, 12e-3, -1.0), {}, f5,
                                     AngleGrid::degrees(-10.0, 10.0, 5.0));
    std::ostringstream os;
    write_pattern_csv(os, p);
    const std::string s = os.str();
    CHECK(s.rfind("theta_deg, magnitude_db, phase_deg\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 6);
    CHECK(s.find("0.0000, 0.0000") != std::string::npos);
    std::ostringstream oe;
    const std::vector<Frequency> fs{f5};
    const std::vector<double> r{0.5};
    write_efficiency_csv(oe, fs, r);
    CHECK(oe.str().rfind("freq_ghz, ratio, ratio_db\n", 0) == 0);
    CHECK(oe.str().find("-3.01") != std::string::npos);
  }
}
