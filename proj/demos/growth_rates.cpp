// Growth rates of the four linearized models around a shear flow with a
// non-degenerate critical point, k = 8 .. 512.
//
//   demo_growth_rates [amplitude] [n]

#include <cstdio>
#include <cstdlib>

#include "mhdbl/energy.hpp"
#include "mhdbl/stability.hpp"

using namespace mhdbl;

int main(int argc, char** argv) {
  const double a = argc > 1 ? std::atof(argv[1]) : 1024.0;
  const int n = argc > 2 ? std::atoi(argv[2]) : 240;
  const ShearFlow U = builtin_profile(ProfileKind::CriticalBump, a);
  const Grid g(n, 20.0, Stretching::tanh_cluster(2.0));
  const std::vector<int> ks{8, 16, 32, 64, 128, 256, 512};
  const ShearNorms norms = weighted_norms(U, g.z_max(), 4000);

  ScanCoefficients c;
  c.kappa = 1.0;
  std::printf("profile %s, amplitude %g, N = %d\n\n", U.name().c_str(), a, n);
  std::printf("%6s", "k");
  const ScanModel models[] = {ScanModel::LP, ScanModel::DampedLP, ScanModel::LSP, ScanModel::LMHDBL};
  std::vector<SpectrumScan> scans;
  for (ScanModel m : models) {
    std::printf("%14s", std::string(to_string(m)).c_str());
    scans.push_back(scan(m, U, ks, g, c));
  }
  std::printf("\n");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    std::printf("%6d", ks[i]);
    for (const auto& s : scans) std::printf("%14.4f", s.rates[i]);
    std::printf("\n");
  }
  const double bounds[] = {INFINITY, INFINITY, constants_lsp(norms, c.nu).c_prime,
                           constants_lmhdbl(norms, c.s, c.eta).c_prime};
  std::printf("\n%-10s %10s %12s  %s\n", "model", "exponent", "bound", "verdict");
  for (std::size_t m = 0; m < scans.size(); ++m)
    std::printf("%-10s %10.4f %12.4g  %s\n", std::string(to_string(models[m])).c_str(), scans[m].fit.p, bounds[m],
                std::string(to_string(verdict(scans[m], bounds[m]))).c_str());
}
