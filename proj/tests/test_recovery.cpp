#include <doctest.h>

#include <cmath>
#include <numbers>

#include "framesub/fourier.hpp"
#include "framesub/recovery.hpp"
#include "test_support.hpp"

using namespace framesub;
using namespace framesub::testing;

namespace {

BasisSpec fourier_1d(int k_abs) {
  // frequencies -k_abs..k_abs on [0,1)
  return fourier_basis(full_grid_frequencies(1, -k_abs, k_abs));
}

BasisSpec cosine_basis(Index m) {
  // eta_0 = 1, eta_k = sqrt(2) cos(2 pi k x): orthonormal in L2([0,1))
  BasisSpec basis;
  basis.size = m;
  basis.domain = Domain::unit_box(1);
  basis.evaluate = [](Index k, const RVector& x) {
    if (k == 0) return Complex(1.0, 0.0);
    return Complex(std::sqrt(2.0) * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) * x[0]), 0.0);
  };
  return basis;
}

SpectralModel cosine_model(Index truncation) {
  SpectralModel model;
  model.truncation = truncation;
  model.singular_values = RVector(truncation);
  for (Index k = 0; k < truncation; ++k)
    model.singular_values[k] = std::pow(2.0, -static_cast<double>(k) / 2.0);
  const BasisSpec basis = cosine_basis(truncation);
  const RVector sigma = model.singular_values;
  auto evaluate = basis.evaluate;
  model.right_singular = [evaluate, sigma](Index k, const RVector& x) {
    return sigma[k] * evaluate(k, x);
  };
  model.kernel_diagonal = [evaluate, sigma, truncation](const RVector& x) {
    double total = 0.0;
    for (Index k = 0; k < truncation; ++k) total += sigma[k] * sigma[k] * std::norm(evaluate(k, x));
    return total;
  };
  model.trace = sigma.squaredNorm();  // integral of K(x,x): |eta_k| has unit L2 norm
  return model;
}

}  // namespace

TEST_CASE("density_finite is one for unimodular bases and >= 1/2 always") {
  const BasisSpec fourier = fourier_1d(6);
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    RVector x(1);
    x << rng.uniform();
    CHECK(density_finite(fourier, x) == doctest::Approx(1.0).epsilon(1e-12));
  }

  const BasisSpec cosine = cosine_basis(5);
  for (int trial = 0; trial < 50; ++trial) {
    RVector x(1);
    x << rng.uniform();
    CHECK(density_finite(cosine, x) >= 0.5);
  }

  // m = 1 with eta_1 = sqrt(2) cos: phi(x) = 1/2 + cos^2(2 pi x)
  BasisSpec single = cosine_basis(2);
  single.size = 1;
  auto base_eval = single.evaluate;
  single.evaluate = [base_eval](Index, const RVector& x) { return base_eval(1, x); };
  RVector x(1);
  x << 0.37;
  const double expected = 0.5 + std::pow(std::cos(2.0 * std::numbers::pi * 0.37), 2);
  CHECK(density_finite(single, x) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("rkhs density: brute-force oracle on the cosine model") {
  const SpectralModel model = cosine_model(8);
  const Index m = 4;
  Rng rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    RVector x(1);
    x << rng.uniform();
    // oracle straight from the definition
    double head = 0.0, head_energy = 0.0, sigma_sq = 0.0;
    for (Index k = 0; k < m; ++k) {
      const Complex e = model.right_singular(k, x);
      head += std::norm(e) / (model.singular_values[k] * model.singular_values[k]);
      head_energy += std::norm(e);
      sigma_sq += model.singular_values[k] * model.singular_values[k];
    }
    const double tail = model.kernel_diagonal(x) - head_energy;
    const double oracle =
        0.5 * (head / static_cast<double>(m) + tail / (model.trace - sigma_sq));
    CHECK(rkhs_density(model, m, x) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(rkhs_density(model, m, x) >= 0.0);
    // weight relation
    const double rho = rkhs_density(model, m, x);
    CHECK(rkhs_weight(model, m, x) == doctest::Approx(1.0 / std::sqrt(rho)));
  }
}

TEST_CASE("rkhs density integrates to one") {
  const SpectralModel model = cosine_model(8);
  const Index m = 3;
  // trapezoid-free: plain Riemann sum on a fine grid is exact enough for
  // trigonometric polynomials of bounded degree
  const Index grid = 4096;
  double integral = 0.0;
  for (Index i = 0; i < grid; ++i) {
    RVector x(1);
    x << static_cast<double>(i) / static_cast<double>(grid);
    integral += rkhs_density(model, m, x);
  }
  integral /= static_cast<double>(grid);
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("rkhs density tail vanishes when the head carries all energy") {
  // m = N-1 and x where the last basis function vanishes
  const SpectralModel model = cosine_model(3);
  const Index m = 2;
  RVector x(1);
  x << 0.125;  // cos(2 pi * 2 * 0.125) = cos(pi/2) = 0
  const double expected_head_only =
      0.5 * ((std::norm(model.right_singular(0, x)) /
                  (model.singular_values[0] * model.singular_values[0]) +
              std::norm(model.right_singular(1, x)) /
                  (model.singular_values[1] * model.singular_values[1])) /
             2.0);
  CHECK(rkhs_density(model, m, x) ==
        doctest::Approx(expected_head_only + 0.0).epsilon(1e-10));
}

TEST_CASE("rkhs density rejects broken models") {
  SpectralModel model = cosine_model(4);
  model.trace = 0.1;  // below the partial sums
  RVector x(1);
  x << 0.2;
  CHECK_THROWS_AS(rkhs_density(model, 2, x), Error);

  SpectralModel negative = cosine_model(4);
  auto diag = negative.kernel_diagonal;
  negative.kernel_diagonal = [diag](const RVector& x) { return diag(x) - 0.5; };
  bool threw = false;
  for (int i = 0; i < 20 && !threw; ++i) {
    RVector probe(1);
    probe << static_cast<double>(i) / 20.0;
    try {
      rkhs_density(negative, 3, probe);
    } catch (const Error&) {
      threw = true;
    }
  }
  CHECK(threw);
}

TEST_CASE("MZ node generation on a Fourier basis") {
  const BasisSpec basis = fourier_1d(5);  // m = 11
  MzNodeConfig cfg;
  cfg.b = 1.5;
  cfg.p = 0.5;
  cfg.t = 2.0 / 3.0;
  cfg.seed = 13;
  const MzNodeResult result = generate_mz_nodes(basis, cfg);

  const Index m = basis.size;
  CHECK(result.initial_count ==
        ceil_count(4.0 / (cfg.t * cfg.t) * static_cast<double>(m) *
                   std::log(static_cast<double>(m) / cfg.p)));
  CHECK(result.nodes.size() <= ceil_count(cfg.b * static_cast<double>(m)));
  CHECK(result.nodes.size() >= m);
  CHECK(mz_lambda_min(basis, result.nodes) > 0.0);
  // unimodular basis: phi = 1, so the initial draw is uniform and lambda_min
  // concentrates near 1
  CHECK(result.initial_lambda_min > 0.3);
}

TEST_CASE("MZ node generation redraw mode") {
  const BasisSpec basis = fourier_1d(5);
  MzNodeConfig cfg;
  cfg.b = 1.5;
  cfg.p = 0.5;
  cfg.t = 2.0 / 3.0;
  cfg.seed = 17;
  cfg.redraw_until_valid = true;
  const MzNodeResult result = generate_mz_nodes(basis, cfg);
  CHECK(result.initial_lambda_min >= 1.0 - cfg.t);
}

TEST_CASE("least squares: exact reconstruction on V_m and interpolation") {
  Rng rng(23);
  const BasisSpec basis = fourier_1d(4);  // m = 9
  const Index m = basis.size;

  // interpolation: n = m distinct nodes
  NodeSet nodes;
  for (Index i = 0; i < m; ++i) {
    RVector x(1);
    x << (static_cast<double>(i) + 0.13) / static_cast<double>(m);
    nodes.nodes.push_back(x);
  }
  CVector truth = random_complex_vector(m, rng);
  const CMatrix design = design_matrix(basis, nodes);
  const CVector samples = design * truth;
  const CVector fitted = least_squares_recover(basis, nodes, samples, false);
  CHECK((fitted - truth).norm() <= 1e-8 * truth.norm());
  CHECK((design * fitted - samples).norm() <= 1e-8 * samples.norm());

  // overdetermined: more nodes, still exact on V_m
  NodeSet more;
  for (Index i = 0; i < 3 * m; ++i) {
    RVector x(1);
    x << rng.uniform();
    more.nodes.push_back(x);
  }
  const CVector more_samples = design_matrix(basis, more) * truth;
  const CVector refit = least_squares_recover(basis, more, more_samples, false);
  CHECK((refit - truth).norm() <= 1e-8 * truth.norm());
}

TEST_CASE("least squares propagates rank errors with sigma_min") {
  const BasisSpec basis = fourier_1d(3);  // m = 7
  NodeSet nodes;
  RVector x(1);
  x << 0.25;
  for (Index i = 0; i < basis.size; ++i) nodes.nodes.push_back(x);  // identical nodes
  const CVector samples = CVector::Ones(basis.size);
  try {
    least_squares_recover(basis, nodes, samples, false);
    FAIL("expected a rank error");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::rank_deficient);
    REQUIRE(err.sigma_min.has_value());
    CHECK(*err.sigma_min >= 0.0);
  }
}

TEST_CASE("pseudo-inverse norm equals the reciprocal smallest singular value") {
  Rng rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const Index m = 2 + static_cast<Index>(rng.uniform_index(5));
    const Index n = m + static_cast<Index>(rng.uniform_index(12));
    const CMatrix a = random_complex_matrix(n, m, rng);
    const Eigen::JacobiSVD<CMatrix> svd(a);
    const double tau_min = svd.singularValues()[m - 1];
    if (tau_min < 1e-8) continue;
    const CMatrix pinv = (a.adjoint() * a).inverse() * a.adjoint();
    const Eigen::JacobiSVD<CMatrix> pinv_svd(pinv);
    CHECK(pinv_svd.singularValues()[0] ==
          doctest::Approx(1.0 / tau_min).epsilon(1e-10));
  }
}

TEST_CASE("weighted least squares uses the node weights") {
  Rng rng(31);
  const BasisSpec basis = fourier_1d(2);  // m = 5
  const Index m = basis.size;
  NodeSet nodes;
  for (Index i = 0; i < 2 * m; ++i) {
    RVector x(1);
    x << rng.uniform();
    nodes.nodes.push_back(x);
  }
  nodes.weights = RVector::Ones(2 * m);
  nodes.weights[0] = 1e-12;  // effectively drops the first sample

  CVector samples = design_matrix(basis, nodes) * random_complex_vector(m, rng);
  CVector corrupted = samples;
  corrupted[0] += Complex(100.0, -50.0);

  const CVector plain = least_squares_recover(basis, nodes, corrupted, false);
  const CVector weighted = least_squares_recover(basis, nodes, corrupted, true);
  const CVector truth = least_squares_recover(basis, nodes, samples, false);
  CHECK((weighted - truth).norm() <= 1e-4 * truth.norm());
  CHECK((plain - truth).norm() > 1.0e-3 * truth.norm());
}

TEST_CASE("recovery report: in-space functions recover exactly") {
  const BasisSpec basis = fourier_1d(5);  // m = 11
  MzNodeConfig cfg;
  cfg.b = 1.6;
  cfg.p = 0.5;
  cfg.seed = 37;
  const MzNodeResult mz = generate_mz_nodes(basis, cfg);

  const auto f = [](const RVector& x) {
    const double phase = 2.0 * std::numbers::pi * 3.0 * x[0];
    return Complex(std::cos(phase), std::sin(phase));  // frequency 3 lies in V_m
  };
  const Quadrature quad = tensor_grid_quadrature(basis.domain, 512);
  const RecoveryReport report = recovery_error_report(basis, mz.nodes, f, quad, cfg.b);
  CHECK(report.l2_error <= 1e-8);
  CHECK(report.mz_lambda_min > 0.0);
  CHECK(report.n == mz.nodes.size());
}

TEST_CASE("error decomposition for out-of-space trigonometric functions") {
  const BasisSpec basis = fourier_1d(5);  // |k| <= 5
  MzNodeConfig cfg;
  cfg.b = 1.8;
  cfg.p = 0.5;
  cfg.seed = 41;
  const MzNodeResult mz = generate_mz_nodes(basis, cfg);

  const auto f = [](const RVector& x) {
    const double inside = 2.0 * std::numbers::pi * 2.0 * x[0];
    const double outside = 2.0 * std::numbers::pi * 9.0 * x[0];
    return Complex(std::cos(inside) + 0.4 * std::cos(outside),
                   std::sin(inside) + 0.4 * std::sin(outside));
  };
  const Quadrature quad = tensor_grid_quadrature(basis.domain, 512);

  // fit on the nodes
  CVector samples(mz.nodes.size());
  for (Index i = 0; i < mz.nodes.size(); ++i)
    samples[i] = f(mz.nodes.nodes[static_cast<std::size_t>(i)]);
  const CVector fitted = least_squares_recover(basis, mz.nodes, samples, false);

  // projection via quadrature
  NodeSet grid_nodes;
  grid_nodes.nodes = quad.nodes;
  const CMatrix grid_design = design_matrix(basis, grid_nodes);
  CVector f_grid(static_cast<Index>(quad.nodes.size()));
  for (Index i = 0; i < f_grid.size(); ++i) f_grid[i] = f(quad.nodes[static_cast<std::size_t>(i)]);
  const CMatrix weighted_design = quad.weights.asDiagonal() * grid_design;
  const CVector projected =
      (grid_design.adjoint() * weighted_design).ldlt().solve(weighted_design.adjoint() * f_grid);

  const CVector s_f = grid_design * fitted;
  const CVector p_f = grid_design * projected;
  const auto weighted_norm_sq = [&](const CVector& v) {
    return (quad.weights.array() * v.cwiseAbs2().array()).sum();
  };
  const double total = weighted_norm_sq(f_grid - s_f);
  const double projection_part = weighted_norm_sq(f_grid - p_f);
  const double sampling_part = weighted_norm_sq(s_f - p_f);  // S(f - P_m f)
  CHECK(total == doctest::Approx(projection_part + sampling_part).epsilon(1e-8));

  const RecoveryReport report = recovery_error_report(basis, mz.nodes, f, quad, cfg.b);
  CHECK(report.l2_error > 0.0);
  CHECK(report.linf_best_proxy > 0.0);
  CHECK(std::isfinite(report.ratio));
}

TEST_CASE("projection idempotence of the least squares fit") {
  Rng rng(43);
  const BasisSpec basis = fourier_1d(3);
  NodeSet nodes;
  for (Index i = 0; i < 20; ++i) {
    RVector x(1);
    x << rng.uniform();
    nodes.nodes.push_back(x);
  }
  const auto f = [](const RVector& x) {
    return Complex(std::cos(2.0 * std::numbers::pi * 11.0 * x[0]), 0.0);  // out of space
  };
  CVector samples(nodes.size());
  for (Index i = 0; i < nodes.size(); ++i) samples[i] = f(nodes.nodes[static_cast<std::size_t>(i)]);
  const CVector first = least_squares_recover(basis, nodes, samples, false);
  const CVector resampled = design_matrix(basis, nodes) * first;
  const CVector second = least_squares_recover(basis, nodes, resampled, false);
  CHECK((second - first).norm() <= 1e-10 * std::max(1.0, first.norm()));
}

TEST_CASE("discrete-domain density sampler") {
  BasisSpec basis = cosine_basis(3);
  basis.domain.points.clear();
  for (Index i = 0; i < 50; ++i) {
    RVector x(1);
    x << static_cast<double>(i) / 50.0;
    basis.domain.points.push_back(x);
  }
  const NodeSampler sampler = make_density_sampler(basis);
  Rng rng(47);
  for (int i = 0; i < 40; ++i) {
    const RVector x = sampler(rng);
    CHECK(x.size() == 1);
    CHECK(x[0] >= 0.0);
    CHECK(x[0] < 1.0);
  }
}

TEST_CASE("rkhs weight vanishes exactly where the density vanishes") {
  // sine system: every eta_k vanishes at x = 0, so rho_m(0) = 0
  SpectralModel model;
  model.truncation = 4;
  model.singular_values = RVector(4);
  for (Index k = 0; k < 4; ++k) model.singular_values[k] = std::pow(0.5, static_cast<double>(k));
  const RVector sigma = model.singular_values;
  model.right_singular = [sigma](Index k, const RVector& x) {
    return Complex(sigma[k] * std::sqrt(2.0) *
                       std::sin(2.0 * std::numbers::pi * static_cast<double>(k + 1) * x[0]),
                   0.0);
  };
  model.kernel_diagonal = [sigma](const RVector& x) {
    double total = 0.0;
    for (Index k = 0; k < 4; ++k)
      total += sigma[k] * sigma[k] * 2.0 *
               std::pow(std::sin(2.0 * std::numbers::pi * static_cast<double>(k + 1) * x[0]), 2);
    return total;
  };
  model.trace = sigma.squaredNorm();

  RVector zero(1);
  zero << 0.0;
  CHECK(rkhs_density(model, 2, zero) == 0.0);
  CHECK(rkhs_weight(model, 2, zero) == 0.0);

  RVector inside(1);
  inside << 0.2;
  CHECK(rkhs_density(model, 2, inside) > 0.0);
  CHECK(rkhs_weight(model, 2, inside) > 0.0);
}
