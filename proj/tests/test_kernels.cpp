#include <cmath>

#include "doctest.h"
#include "matmoment/kernels.hpp"
#include "support.hpp"

using namespace matmoment;
using mmtest::Gen;

TEST_CASE("psd projection kernels agree") {
  Gen g(101);
  for (std::size_t q : {1u, 2u, 3u}) {
    std::size_t blocks = 257;
    std::vector<double> y(blocks * q * q);
    for (auto& v : y) v = g.normal();
    std::vector<double> a = y, b = y;
    kernels::serial::psd_project_blocks(a.data(), blocks, q);
    kernels::parallel::psd_project_blocks(b.data(), blocks, q);
    CHECK(a == b);
    for (std::size_t k = 0; k < blocks; ++k) CHECK(min_eigenvalue(from_hjk_coords(q, a.data() + k * q * q)) >= -1e-12);
  }
}

TEST_CASE("affine map kernels agree") {
  Gen g(102);
  RMatrix p(300, 40);
  for (auto& v : p.data) v = g.normal();
  std::vector<double> x(40), off(300), a(300), b(300);
  for (auto& v : x) v = g.normal();
  for (auto& v : off) v = g.normal();
  kernels::serial::affine_map(p, x.data(), off.data(), a.data());
  kernels::parallel::affine_map(p, x.data(), off.data(), b.data());
  CHECK(a == b);
  double r0 = off[0];
  for (std::size_t j = 0; j < 40; ++j) r0 += p(0, j) * x[j];
  CHECK(a[0] == doctest::Approx(r0));
}

TEST_CASE("moment accumulation and block flattening agree") {
  Gen g(103);
  kernels::MomentJob job;
  job.d = 2;
  for (int i = 0; i < 40; ++i) {
    job.coords.push_back({g.normal(), g.normal()});
    job.masses.push_back(g.psd(2));
  }
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; a + b <= 4; ++b) job.alphas.push_back({a, b});
  auto s = kernels::serial::accumulate_moments(job, 2);
  auto p = kernels::parallel::accumulate_moments(job, 2);
  REQUIRE(s.size() == p.size());
  for (std::size_t i = 0; i < s.size(); ++i) CHECK((s[i] - p[i]).frobenius_norm() <= 1e-12 * (1 + s[i].frobenius_norm()));

  std::size_t nb = 6;
  std::vector<std::size_t> index(nb * nb);
  for (std::size_t k = 0; k < nb; ++k)
    for (std::size_t l = 0; l < nb; ++l) index[k * nb + l] = (k + l) % s.size();
  CMatrix fs = kernels::serial::flatten_blocks(s, index, nb, 2);
  CMatrix fp = kernels::parallel::flatten_blocks(s, index, nb, 2);
  CHECK((fs - fp).frobenius_norm() == 0.0);
  CHECK(kernels::max_threads() >= 1);
}
