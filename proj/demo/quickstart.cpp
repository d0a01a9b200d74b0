// Library tour: queues, the stationary multiclass sampler, horizon lines and a speed estimate.

#include <iostream>

#include "tasep/verify.hpp"

using namespace tasep;

int main() {
  // A single queue: arrivals a, services s.
  auto a = BinarySeq::from_string("1100101");
  auto s = BinarySeq::from_string("0110111");
  auto q = serve(a, s);
  std::cout << "departures " << q.departures.to_string() << "  duals " << q.duals.to_string()
            << "  final queue " << q.q_final << "\n";

  // Three-class stationary configuration (left jumps) on 40 sites.
  auto fm = sample_fm(DensityVector({0.3, 0.2, 0.1}), Window(0, 39), 7);
  std::cout << "stationary sample ";
  for (Label l : fm.v.labels()) std::cout << (l == kHole ? '.' : static_cast<char>('0' + l));
  std::cout << "\n";

  // Two horizon lines and their increment difference over [-1, 1].
  Grid g{-1, 1, 1.0 / 256};
  auto sh = sample_sh(std::vector<double>{0.0, 1.0}, g, 11);
  double d = increment_difference(sh.lines[0], sh.lines[1], 1);
  std::cout << "increment difference " << d << "  P(D <= d) = " << diff_cdf(d, 1, 1) << "\n";

  // Speed estimates of the first particles of the fully labelled start.
  auto u = speed_process_estimate(5, 200, 3);
  std::cout << "speeds";
  for (const auto& e : u) std::cout << " " << e.u;
  std::cout << "\n";

  // Burke check at a small size.
  auto rs = burke_suite(0.3, 0.2, 5000, 10, 1);
  std::cout << "burke checks passed: " << (all_passed(rs) ? "yes" : "no") << "\n";
}
