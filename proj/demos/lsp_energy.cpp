// Energy budget of the linearized Shercliff-Prandtl system along one
// trajectory: the vorticity inequality per record and the fitted Gronwall
// constants.
//
//   demo_lsp_energy [seed] [amplitude]

#include <cstdio>
#include <cstdlib>

#include "mhdbl/energy.hpp"

using namespace mhdbl;

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  const double a = argc > 2 ? std::atof(argv[2]) : 64.0;
  auto g = std::make_shared<const Grid>(200, 20.0, Stretching::tanh_cluster(2.0), 8);
  const ShearFlow U = builtin_profile(ProfileKind::CriticalBump, a);
  const double nu = 1.0;

  SimState st = make_state(EvolveModel::LSP, g, random_smooth_initial(*g, EvolveModel::LSP, seed), {}, {}, U);
  EnergyRecorder rec(20);
  rec.start(st);
  DtPolicy pol;
  pol.dt_max = 5e-4;
  pol.fixed = true;
  run(st, 1.0, pol, {std::ref(rec)});
  rec.finish(st);

  const LspConstants k = constants_lsp(weighted_norms(U, g->z_max(), 4000), nu);
  const auto checks = check_ineq_omega(rec.records(), nu, k.c);
  std::printf("C = %.4g, alpha = %.4g, C' = %.4g\n\n", k.c, k.alpha, k.c_prime);
  std::printf("%6s %12s %12s %14s %14s %5s\n", "t", "|u|^2", "|w|^2", "lhs", "rhs", "ok");
  for (std::size_t i = 0; i < checks.size(); i += 5) {
    const auto& r = rec.records()[i];
    std::printf("%6.2f %12.5e %12.5e %14.6e %14.6e %5s\n", r.t, r.get("u"), r.get("omega"), checks[i].lhs,
                checks[i].rhs, checks[i].pass ? "yes" : "NO");
  }
  for (auto f : {GronwallForm::LspVorticity, GronwallForm::LspTimeDerivative}) {
    const GronwallResult gr = check_gronwall(rec.records(), f, std::nullopt, nu);
    std::printf("%-22s M = %.4g\n", std::string(to_string(f)).c_str(), gr.m_used);
  }
}
