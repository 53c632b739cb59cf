#include <benchmark/benchmark.h>

#include "irs/far_field.hpp"
#include "irs/nlos.hpp"

using namespace irs;

namespace {

const Frequency f5 = Frequency::ghz(5.0);

const PhaseCurve& curve() {
  static const PhaseCurve c = surrogate_phase_curve(f5);
  return c;
}

const SupercellSpec& spec() {
  static const SupercellSpec s = design_supercell(f5, Angle::degrees(30.0), 10, curve());
  return s;
}

Scene2D scene(double resolution) {
  const Vec2 tx{-1.7207, 2.5425};
  Scene2D s{f5, {tx, 14.0, 0.0}, 0.0, {{{-0.9, 0.0}, {-0.9, 3.4}}, {{1.5, 1.0}, {2.5, 1.5}}}, {},
            {{-3.0, 0.0}, {6.0, 5.0}, resolution}};
  s.panels.push_back(IrsPanel::from_design({0.0, 5.0}, {0.0, -1.0}, spec(), curve(), 2));
  s.panels.push_back(IrsPanel::from_design({3.0, 5.0}, {0.0, -1.0}, spec(), curve(), 4));
  return s;
}

template <auto Fn>
void pattern(benchmark::State& st) {
  const auto prof = build_profile(spec(), curve(), static_cast<int>(st.range(0)));
  const auto grid = AngleGrid::standard();
  for (auto _ : st) {
    benchmark::DoNotOptimize(Fn(prof, Angle::degrees(10.0), f5, grid));
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(grid.size() * prof.size()));
}

template <auto Fn>
void coverage(benchmark::State& st) {
  const auto s = scene(1.0 / static_cast<double>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(Fn(s));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(s.grid.nx() * s.grid.ny()));
}

}  // namespace

BENCHMARK(pattern<&reference::scattered_pattern>)->Name("pattern/serial")->Arg(10)->Arg(100);
BENCHMARK(pattern<static_cast<AperturePattern (*)(const ApertureProfile&, Angle, Frequency,
                                                  const AngleGrid&)>(&scattered_pattern)>)
    ->Name("pattern/openmp")
    ->Arg(10)
    ->Arg(100);
BENCHMARK(coverage<&reference::coverage_map>)->Name("coverage/serial")->Arg(10)->Arg(40);
BENCHMARK(coverage<static_cast<CoverageMap (*)(const Scene2D&)>(&coverage_map)>)
    ->Name("coverage/openmp")
    ->Arg(10)
    ->Arg(40);

BENCHMARK_MAIN();
