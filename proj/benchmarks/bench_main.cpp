#include <benchmark/benchmark.h>

#include <numbers>

#include "sphereflow/flow.hpp"
#include "sphereflow/random_fields.hpp"
#include "sphereflow/resolvent.hpp"
#include "sphereflow/spectrum.hpp"

namespace {

using namespace sphereflow;

Domain square(std::size_t n) {
  const double L[] = {std::numbers::pi, std::numbers::pi};
  const std::size_t N[] = {n, n};
  return make_domain(2, L, N);
}

Field random_field(const Spectrum& s) {
  RandomFieldGenerator gen(s, 1);
  return gen.draw(FieldPopulation::low_pass, 1.0);
}

void BM_ApplyA(benchmark::State& state) {
  const Domain d = square(static_cast<std::size_t>(state.range(0)));
  const Spectrum s = compute_spectrum(d);
  const Field u = random_field(s);
  for (auto _ : state) benchmark::DoNotOptimize(apply_A(d, u));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d.total()));
}
BENCHMARK(BM_ApplyA)->Arg(63)->Arg(255)->Arg(511);

void BM_ResolventCg(benchmark::State& state) {
  const Domain d = square(static_cast<std::size_t>(state.range(0)));
  const Spectrum s = compute_spectrum(d);
  const Field u = random_field(s);
  const CgSettings cg{.rel_tol = 1e-10, .max_iterations = 0};
  for (auto _ : state) benchmark::DoNotOptimize(resolvent_solve(d, 1000.0, u, cg));
}
BENCHMARK(BM_ResolventCg)->Arg(63)->Arg(255);

void BM_SineTransformRoundTrip(benchmark::State& state) {
  const Domain d = square(static_cast<std::size_t>(state.range(0)));
  const Spectrum s = compute_spectrum(d);
  const Field u = random_field(s);
  for (auto _ : state) benchmark::DoNotOptimize(s.from_coefficients(s.to_coefficients(u)));
}
BENCHMARK(BM_SineTransformRoundTrip)->Arg(63)->Arg(255)->Arg(511);

void BM_ImexStep(benchmark::State& state) {
  const Domain d = square(static_cast<std::size_t>(state.range(0)));
  const Spectrum s = compute_spectrum(d);
  const Field u = random_field(s);
  FlowConfig c;
  c.p = 4.0;
  c.dt = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(step_imex(d, u, c, c.linear_solver));
}
BENCHMARK(BM_ImexStep)->Arg(63)->Arg(255);

void BM_EtdStep(benchmark::State& state) {
  const Domain d = square(static_cast<std::size_t>(state.range(0)));
  const Spectrum s = compute_spectrum(d);
  const Field u = random_field(s);
  FlowConfig c;
  c.p = 4.0;
  c.dt = 1e-3;
  const EtdPropagator prop(s, c.dt);
  for (auto _ : state) benchmark::DoNotOptimize(prop.propagate(u, explicit_part(d, u, c)));
}
BENCHMARK(BM_EtdStep)->Arg(63)->Arg(255);

}  // namespace

BENCHMARK_MAIN();
