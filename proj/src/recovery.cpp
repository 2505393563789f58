#include "framesub/recovery.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <memory>

namespace framesub {

namespace {

void validate_basis(const BasisSpec& basis) {
  if (basis.size < 1) throw_invalid_input("basis must have at least one function");
  if (!basis.evaluate) throw_invalid_input("basis has no evaluator");
}

void validate_nodes(const NodeSet& nodes) {
  if (nodes.nodes.empty()) throw_invalid_input("node set is empty");
  if (nodes.weights.size() != 0 && nodes.weights.size() != nodes.size())
    throw_invalid_input("node weights do not match the node count");
  for (Index i = 0; i < nodes.weights.size(); ++i)
    if (!(nodes.weights[i] >= 0.0)) throw_invalid_input("node weights must be nonnegative");
}

}  // namespace

void validate_model(const SpectralModel& model) {
  if (model.truncation < 1) throw Error(ErrorCode::invalid_model, "empty spectral model");
  if (model.singular_values.size() != model.truncation)
    throw Error(ErrorCode::invalid_model, "singular value count does not match truncation");
  for (Index k = 0; k < model.truncation; ++k) {
    if (!(model.singular_values[k] > 0.0))
      throw Error(ErrorCode::invalid_model, "singular values must be strictly positive");
    if (k > 0 && model.singular_values[k] > model.singular_values[k - 1])
      throw Error(ErrorCode::invalid_model, "singular values must be nonincreasing");
  }
  if (!model.right_singular || !model.kernel_diagonal)
    throw Error(ErrorCode::invalid_model, "spectral model misses callables");
}

double density_finite(const BasisSpec& basis, const RVector& x) {
  validate_basis(basis);
  double energy = 0.0;
  for (Index k = 0; k < basis.size; ++k) energy += std::norm(basis.evaluate(k, x));
  return 0.5 + 0.5 * energy / static_cast<double>(basis.size);
}

double rkhs_density(const SpectralModel& model, Index m, const RVector& x) {
  validate_model(model);
  if (m < 1 || m >= model.truncation)
    throw Error(ErrorCode::invalid_model, "rkhs_density requires 1 <= m < truncation");

  double head = 0.0;       // sum_{k<=m} |eta_k(x)|^2
  double head_sq = 0.0;    // sum_{k<=m} |e_k(x)|^2
  double sigma_sq = 0.0;   // sum_{k<=m} sigma_k^2
  for (Index k = 0; k < m; ++k) {
    const double e_abs2 = std::norm(model.right_singular(k, x));
    const double s2 = model.singular_values[k] * model.singular_values[k];
    head += e_abs2 / s2;
    head_sq += e_abs2;
    sigma_sq += s2;
  }
  const double tail_mass = model.trace - sigma_sq;
  if (!(tail_mass > 0.0))
    throw Error(ErrorCode::invalid_model, "kernel trace does not exceed the partial sum");

  const double kxx = model.kernel_diagonal(x);
  double tail = kxx - head_sq;
  if (tail < 0.0) {
    if (tail < -1e-10 * std::max(1.0, std::abs(kxx)))
      throw Error(ErrorCode::invalid_model, "kernel diagonal is below the partial energy sum");
    tail = 0.0;
  }
  return 0.5 * (head / static_cast<double>(m) + tail / tail_mass);
}

double rkhs_weight(const SpectralModel& model, Index m, const RVector& x) {
  const double rho = rkhs_density(model, m, x);
  return rho > 0.0 ? 1.0 / std::sqrt(rho) : 0.0;
}

NodeSampler make_density_sampler(const BasisSpec& basis, Index envelope_grid_per_axis) {
  validate_basis(basis);
  const Domain& domain = basis.domain;

  if (domain.discrete()) {
    RVector mass(static_cast<Index>(domain.points.size()));
    for (std::size_t i = 0; i < domain.points.size(); ++i)
      mass[static_cast<Index>(i)] = density_finite(basis, domain.points[i]);
    auto sampler = std::make_shared<DiscreteSampler>(mass);
    auto points = domain.points;
    return [sampler, points](Rng& rng) { return points[static_cast<std::size_t>(sampler->sample(rng))]; };
  }

  const Index d = domain.dimension();
  if (d < 1) throw_invalid_input("domain has no dimension");

  // Envelope (1 + max_k sup |eta_k|^2)/2, with the sup taken over a grid.
  double peak = 0.0;
  const Index per_axis = std::max<Index>(envelope_grid_per_axis, 2);
  std::vector<Index> digits(static_cast<std::size_t>(d), 0);
  RVector x(d);
  bool carry_done = false;
  while (!carry_done) {
    for (Index j = 0; j < d; ++j)
      x[j] = domain.lower[j] + (domain.upper[j] - domain.lower[j]) *
                                   (static_cast<double>(digits[static_cast<std::size_t>(j)]) +
                                    0.5) /
                                   static_cast<double>(per_axis);
    for (Index k = 0; k < basis.size; ++k)
      peak = std::max(peak, std::norm(basis.evaluate(k, x)));
    Index j = 0;
    for (; j < d; ++j) {
      if (++digits[static_cast<std::size_t>(j)] < per_axis) break;
      digits[static_cast<std::size_t>(j)] = 0;
    }
    carry_done = (j == d);
  }
  const double envelope = 1.05 * 0.5 * (1.0 + peak);

  Domain box = domain;
  Index size = basis.size;
  auto evaluate = basis.evaluate;
  return [box, size, evaluate, envelope](Rng& rng) {
    const Index d = box.lower.size();
    RVector x(d);
    for (;;) {
      for (Index j = 0; j < d; ++j) x[j] = rng.uniform(box.lower[j], box.upper[j]);
      double energy = 0.0;
      for (Index k = 0; k < size; ++k) energy += std::norm(evaluate(k, x));
      const double phi = 0.5 + 0.5 * energy / static_cast<double>(size);
      if (rng.uniform() * envelope < phi) return x;
    }
  };
}

CMatrix design_matrix(const BasisSpec& basis, const NodeSet& nodes) {
  validate_basis(basis);
  validate_nodes(nodes);
  CMatrix design(nodes.size(), basis.size);
  for (Index i = 0; i < nodes.size(); ++i)
    for (Index k = 0; k < basis.size; ++k)
      design(i, k) = basis.evaluate(k, nodes.nodes[static_cast<std::size_t>(i)]);
  return design;
}

double mz_lambda_min(const BasisSpec& basis, const NodeSet& nodes) {
  const CMatrix design = design_matrix(basis, nodes);
  const CMatrix gram = design.adjoint() * design / static_cast<double>(nodes.size());
  return gram_bounds(gram).lower;
}

MzNodeResult generate_mz_nodes(const BasisSpec& basis, const NodeSampler& sampler,
                               const MzNodeConfig& cfg) {
  validate_basis(basis);
  if (!sampler) throw_invalid_input("node sampler is empty");
  if (!(cfg.p > 0.0 && cfg.p < 1.0)) throw_invalid_config("p must lie in (0,1)");
  if (!(cfg.t > 0.0 && cfg.t < 1.0)) throw_invalid_config("t must lie in (0,1)");
  const Index m = basis.size;
  const Index draw_total = ceil_count(4.0 / (cfg.t * cfg.t) * static_cast<double>(m) *
                                      std::log(static_cast<double>(m) / cfg.p));

  Rng rng(cfg.seed);
  MzNodeResult result;
  for (Index attempt = 0;; ++attempt) {
    std::vector<RVector> drawn;
    drawn.reserve(static_cast<std::size_t>(draw_total));
    CMatrix normalized(draw_total, m);
    for (Index i = 0; i < draw_total; ++i) {
      RVector x = sampler(rng);
      double energy = 0.0;
      CVector row(m);
      for (Index k = 0; k < m; ++k) {
        row[k] = basis.evaluate(k, x);
        energy += std::norm(row[k]);
      }
      const double phi = 0.5 + 0.5 * energy / static_cast<double>(m);
      normalized.row(i) = row.transpose() / std::sqrt(phi);
      drawn.push_back(std::move(x));
    }

    const CMatrix gram = normalized.adjoint() * normalized / static_cast<double>(draw_total);
    result.initial_lambda_min = gram_bounds(gram).lower;
    if (cfg.redraw_until_valid && result.initial_lambda_min < 1.0 - cfg.t) {
      if (attempt + 1 >= cfg.max_redraws)
        throw Error(ErrorCode::selection_failure,
                    "initial node draws kept failing the frame condition");
      result.redraws = attempt + 1;
      continue;
    }

    SubsampleOptions opts;
    opts.seed = rng.fork(0x6e0de5).seed();
    opts.traversal = cfg.traversal;
    result.plain = plain_bss(normalized, cfg.b, cfg.delta, opts);
    result.initial_count = draw_total;
    result.nodes.nodes.reserve(result.plain.indices.size());
    for (Index i : result.plain.indices)
      result.nodes.nodes.push_back(drawn[static_cast<std::size_t>(i)]);
    return result;
  }
}

MzNodeResult generate_mz_nodes(const BasisSpec& basis, const MzNodeConfig& cfg) {
  return generate_mz_nodes(basis, make_density_sampler(basis), cfg);
}

CVector least_squares_recover(const BasisSpec& basis, const NodeSet& nodes,
                              const CVector& samples, bool weighted) {
  validate_basis(basis);
  validate_nodes(nodes);
  if (samples.size() != nodes.size())
    throw_invalid_input("sample count does not match the node count");
  if (nodes.size() < basis.size)
    throw_invalid_input("least squares requires n >= m nodes");

  CMatrix design = design_matrix(basis, nodes);
  CVector rhs = samples;
  if (weighted && nodes.weights.size() == nodes.size()) {
    const RVector scale = nodes.weights.cwiseSqrt();
    design = scale.asDiagonal() * design;
    rhs = scale.asDiagonal() * rhs;
  }

  Eigen::JacobiSVD<CMatrix> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& tau = svd.singularValues();
  const double tau_min = tau[tau.size() - 1];
  if (!(tau_min > 1e-12 * tau[0])) {
    Error err(ErrorCode::rank_deficient, "design matrix is rank deficient");
    err.sigma_min = tau_min;
    throw err;
  }
  return svd.solve(rhs);
}

Quadrature tensor_grid_quadrature(const Domain& box, Index per_axis) {
  if (box.discrete()) throw_invalid_input("tensor quadrature needs a box domain");
  const Index d = box.dimension();
  if (d < 1 || per_axis < 1) throw_invalid_input("empty quadrature request");
  double total = 1.0;
  for (Index j = 0; j < d; ++j) total *= static_cast<double>(per_axis);
  if (total > 2e7) throw_invalid_input("tensor quadrature grid too large");

  Quadrature quad;
  const auto count = static_cast<Index>(total);
  quad.nodes.reserve(static_cast<std::size_t>(count));
  quad.weights = RVector::Constant(count, 1.0 / total);
  std::vector<Index> digits(static_cast<std::size_t>(d), 0);
  for (Index i = 0; i < count; ++i) {
    RVector x(d);
    for (Index j = 0; j < d; ++j)
      x[j] = box.lower[j] + (box.upper[j] - box.lower[j]) *
                                static_cast<double>(digits[static_cast<std::size_t>(j)]) /
                                static_cast<double>(per_axis);
    quad.nodes.push_back(std::move(x));
    for (Index j = 0; j < d; ++j) {
      if (++digits[static_cast<std::size_t>(j)] < per_axis) break;
      digits[static_cast<std::size_t>(j)] = 0;
    }
  }
  return quad;
}

RecoveryReport recovery_error_report(const BasisSpec& basis, const NodeSet& nodes,
                                     const std::function<Complex(const RVector&)>& f,
                                     const Quadrature& reference, double b) {
  validate_basis(basis);
  validate_nodes(nodes);
  if (reference.nodes.empty() ||
      reference.weights.size() != static_cast<Index>(reference.nodes.size()))
    throw_invalid_input("reference quadrature is inconsistent");

  // Plain least squares fit from the node samples.
  CVector samples(nodes.size());
  for (Index i = 0; i < nodes.size(); ++i) samples[i] = f(nodes.nodes[static_cast<std::size_t>(i)]);
  const CVector fitted = least_squares_recover(basis, nodes, samples, false);

  // Evaluate everything on the reference grid.
  const Index q = static_cast<Index>(reference.nodes.size());
  NodeSet grid_nodes;
  grid_nodes.nodes = reference.nodes;
  const CMatrix grid_design = design_matrix(basis, grid_nodes);
  CVector f_grid(q);
  for (Index i = 0; i < q; ++i) f_grid[i] = f(reference.nodes[static_cast<std::size_t>(i)]);

  const CVector recovered_grid = grid_design * fitted;

  // L2 projection of f onto V_m through the quadrature Gram system.
  const CMatrix weighted_design = reference.weights.asDiagonal() * grid_design;
  const CMatrix gram = grid_design.adjoint() * weighted_design;
  const CVector moments = weighted_design.adjoint() * f_grid;
  const CVector projected = gram.ldlt().solve(moments);
  const CVector projection_grid = grid_design * projected;

  RecoveryReport report;
  report.n = nodes.size();
  report.m = basis.size;
  report.b = b;
  report.mz_lambda_min = mz_lambda_min(basis, nodes);
  report.grid_size = q;
  report.l2_error = std::sqrt(
      (reference.weights.array() * (f_grid - recovered_grid).cwiseAbs2().array()).sum());
  report.linf_best_proxy = (f_grid - projection_grid).cwiseAbs().maxCoeff();
  report.ratio = report.linf_best_proxy > 0.0 ? report.l2_error / report.linf_best_proxy : 0.0;
  return report;
}

}  // namespace framesub
