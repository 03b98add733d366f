// Benchmark: reference box scan vs the solving kernel, serial and sharded.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "detcount/enumerate.hpp"

using namespace detcount;

namespace {

double run_ms(const std::function<size_t()>& body, size_t& n) {
  auto t0 = std::chrono::steady_clock::now();
  n = body();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"point enumeration benchmark"};
  long B = 24;
  int threads = 4;
  bool skip_reference = false;
  std::string fixture = "cubic-curve";
  app.add_option("--B", B, "height bound");
  app.add_option("--threads", threads, "shard count for the parallel kernel");
  app.add_option("--fixture", fixture, "cubic-curve | quartic-surface | cone");
  app.add_flag("--skip-reference", skip_reference, "only time the kernels");
  CLI11_PARSE(app, argc, argv);

  std::vector<Poly<mpz_class>> gens;
  if (fixture == "cubic-curve") {
    for (const auto* s : {"x0*x2 - x1^2", "x0*x3 - x1*x2", "x1*x3 - x2^2"})
      gens.push_back(poly_q_to_z_primitive(parse_poly(s, 4)));
  } else if (fixture == "quartic-surface") {
    gens.push_back(poly_q_to_z_primitive(parse_poly("x0^3*x3 - x1^4 + x2^4", 4)));
  } else if (fixture == "cone") {
    gens.push_back(poly_q_to_z_primitive(parse_poly("x0*x2 - x1^2", 4)));
  } else {
    std::fprintf(stderr, "unknown fixture: %s\n", fixture.c_str());
    return 1;
  }

  std::printf("fixture %s, B = %ld\n", fixture.c_str(), B);
  std::printf("%-22s %12s %10s\n", "variant", "time ms", "points");

  size_t n_ref = 0, n_ser = 0, n_par = 0;
  if (!skip_reference) {
    double t = run_ms([&] { return projective_points_reference(gens, B).size(); }, n_ref);
    std::printf("%-22s %12.1f %10zu\n", "reference box scan", t, n_ref);
  }
  EnumOptions ser;
  ser.B = B;
  double ts = run_ms([&] { return projective_points(gens, ser).points.size(); }, n_ser);
  std::printf("%-22s %12.1f %10zu\n", "kernel serial", ts, n_ser);

  EnumOptions par;
  par.B = B;
  par.threads = threads;
  double tp = run_ms([&] { return projective_points(gens, par).points.size(); }, n_par);
  std::printf("kernel %-2d shards       %12.1f %10zu\n", threads, tp, n_par);

  if (!skip_reference && (n_ref != n_ser || n_ref != n_par)) {
    std::fprintf(stderr, "MISMATCH between variants\n");
    return 1;
  }
  if (n_ser != n_par) {
    std::fprintf(stderr, "MISMATCH between serial and sharded kernels\n");
    return 1;
  }
  std::printf("agreement verified across variants\n");
  return 0;
}
