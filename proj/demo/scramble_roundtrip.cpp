// Scrambles the standard rays by a Haar-random unitary and random phases,
// then recovers the standard form and prints the recovery residual.
#include <complex>
#include <iostream>
#include <vector>

#include <ksv/ksv.hpp>

int main(int argc, char** argv) {
  std::uint64_t seed = argc > 1 ? std::stoull(argv[1]) : 1;
  ksv::Rng rng(seed);
  auto u = ksv::haar_unitary(3, rng);

  ksv::RaySet standard = ksv::yu_oh_13();
  ksv::RaySet scrambled("scrambled", 3);
  for (const auto& ray : standard.rays()) {
    std::vector<ksv::Scalar> comps;
    double angle = 6.283185307179586 * rng.uniform01();
    std::complex<double> phase(std::cos(angle), std::sin(angle));
    for (int r = 0; r < 3; ++r) {
      std::complex<double> value = 0;
      for (int c = 0; c < 3; ++c) value += u[r][c] * ray.comps[c].to_complex();
      value *= phase;
      comps.push_back(ksv::Scalar::floating(value.real(), value.imag()));
    }
    scrambled.add(ksv::canonicalize_ray(std::move(comps), 3, ray.label));
  }

  ksv::Realization realization{scrambled, {}};
  for (int i = 0; i < 13; ++i) realization.iso.push_back(i);
  ksv::CanonicalizationResult result = ksv::canonicalize_realization(realization);
  std::cout << "seed " << seed << ": residual " << result.residual
            << (result.conjugated ? " (conjugated branch)" : "") << "\n";
  return result.residual <= 1e-9 ? 0 : 1;
}
