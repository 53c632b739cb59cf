#include <cmath>
#include <random>

#include "doctest.h"
#include "irs/em_core.hpp"
#include "irs/error.hpp"

using namespace irs;

TEST_SUITE("em_core") {
  TEST_CASE("wavelength examples") {
    CHECK(wavelength(Frequency::ghz(5.0)) == doctest::Approx(0.0599585).epsilon(1e-6));
    CHECK(wavelength(Frequency(1.0)) == 299792458.0);
    CHECK(wavelength(Frequency::ghz(10.0)) == doctest::Approx(0.0299792).epsilon(1e-6));
  }

  TEST_CASE("wavenumber examples") {
    CHECK(wavenumber(Frequency::ghz(5.0)).k0 == doctest::Approx(104.79).epsilon(1e-4));
    CHECK(wavenumber(Frequency::ghz(2.5)).k0 == doctest::Approx(52.40).epsilon(1e-4));
    const Frequency f(299792458.0);
    CHECK(wavenumber(f).k0 == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  }

  TEST_CASE("non-positive frequency is invalid input") {
    for (double hz : {0.0, -1.0, -5e9, std::nan("")}) {
      try {
        Frequency f(hz);
        FAIL("accepted " << hz);
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidInput);
      }
    }
  }

  TEST_CASE("wavelength times wavenumber is 2 pi") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> log_f(0.0, 12.0);
    for (int i = 0; i < 1000; ++i) {
      const Frequency f(std::pow(10.0, log_f(rng)));
      const double v = wavelength(f) * wavenumber(f).k0;
      CHECK(std::abs(v - 2.0 * kPi) / (2.0 * kPi) < 1e-12);
    }
  }

  TEST_CASE("doubling frequency halves wavelength exactly") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> g(0.1, 100.0);
    for (int i = 0; i < 200; ++i) {
      const double ghz = g(rng);
      CHECK(wavelength(Frequency::ghz(2.0 * ghz)) * 2.0 == wavelength(Frequency::ghz(ghz)));
    }
  }

  TEST_CASE("angle conversions and wrap") {
    CHECK(Angle::degrees(30.0).rad() == doctest::Approx(kPi / 6.0));
    CHECK(Angle::radians(kPi / 4.0).deg() == doctest::Approx(45.0));
    CHECK((-Angle::degrees(10.0)).deg() == doctest::Approx(-10.0));
    CHECK(wrap_phase(3.0 * kPi) == doctest::Approx(kPi));
    CHECK(wrap_phase(-kPi) == doctest::Approx(kPi));
    CHECK(wrap_phase(0.25) == 0.25);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    for (int i = 0; i < 500; ++i) {
      const double p = u(rng);
      const double w = wrap_phase(p);
      CHECK(w > -kPi);
      CHECK(w <= kPi);
      const double turns = (p - w) / (2.0 * kPi);
      CHECK(std::abs(turns - std::round(turns)) < 1e-9);
    }
  }

  TEST_CASE("dB helpers") {
    CHECK(to_db_power(100.0) == doctest::Approx(20.0));
    CHECK(from_db_power(-30.0) == doctest::Approx(1e-3));
    CHECK(from_db_power(to_db_power(0.37)) == doctest::Approx(0.37));
  }
}
