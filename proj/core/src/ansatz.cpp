// Copyright 2026 The nqslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nqslab/ansatz.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nqslab/errors.hpp"
#include "nqslab/rng.hpp"

namespace nqslab {

namespace {

// det * inv is unreliable below this determinant magnitude; switch to minors.
constexpr double kSingularDetThreshold = 1e-12;

Eigen::VectorXd encode_one(const Configuration& c) {
  Eigen::VectorXd x(c.length);
  for (int i = 0; i < c.length; ++i) x[i] = c.spin(i);
  return x;
}

Eigen::MatrixXd encode_states(const std::vector<std::uint32_t>& states, int L) {
  Eigen::MatrixXd x(static_cast<std::int64_t>(states.size()), L);
  for (std::size_t s = 0; s < states.size(); ++s) {
    for (int i = 0; i < L; ++i) {
      x(static_cast<std::int64_t>(s), i) = ((states[s] >> i) & 1u) ? 1.0 : -1.0;
    }
  }
  return x;
}

void check_length(int expected, const Configuration& c, const char* what) {
  if (c.length != expected) {
    throw ContractViolation(std::string(what) + ": configuration has " +
                            std::to_string(c.length) + " sites, spec expects " +
                            std::to_string(expected));
  }
}

/// Writes a matrix row-major into `flat` starting at `offset`.
void pack(const Eigen::MatrixXd& m, Eigen::VectorXd& flat, Eigen::Index& offset) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) flat[offset++] = m(r, c);
  }
}

void pack(const Eigen::VectorXd& v, Eigen::VectorXd& flat, Eigen::Index& offset) {
  flat.segment(offset, v.size()) = v;
  offset += v.size();
}

Eigen::MatrixXd unpack_matrix(const Eigen::VectorXd& flat, Eigen::Index& offset,
                              Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat[offset++];
  }
  return m;
}

Eigen::VectorXd unpack_vector(const Eigen::VectorXd& flat, Eigen::Index& offset,
                              Eigen::Index size) {
  Eigen::VectorXd v = flat.segment(offset, size);
  offset += size;
  return v;
}

/// Collects the occupied sites of `c` in increasing order.
std::vector<int> occupied_sites(const Configuration& c) {
  std::vector<int> sites;
  sites.reserve(static_cast<std::size_t>(c.popcount()));
  for (int i = 0; i < c.length; ++i) {
    if (c.occupied(i)) sites.push_back(i);
  }
  return sites;
}

/// Fixes each row's sign: first component of largest magnitude positive would
/// be unstable under degeneracy, so use the first nonzero entry instead.
void fix_row_signs(Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (m(r, c) != 0.0) {
        if (m(r, c) < 0.0) m.row(r) = -m.row(r);
        break;
      }
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Perceptron
// ---------------------------------------------------------------------------

int MlpSpec::hidden() const {
  const auto m = static_cast<int>(std::llround(alpha * L));
  return m < 1 ? 1 : m;
}

long long MlpSpec::parameter_count() const {
  const long long m = hidden();
  return m * (L + 2LL) + 1;
}

Eigen::VectorXd MlpParameters::to_flat() const {
  Eigen::VectorXd flat(W1.size() + b1.size() + w2.size() + 1);
  Eigen::Index offset = 0;
  pack(W1, flat, offset);
  pack(b1, flat, offset);
  pack(w2, flat, offset);
  flat[offset] = b2;
  return flat;
}

MlpParameters MlpParameters::from_flat(const MlpSpec& spec, const Eigen::VectorXd& flat) {
  if (flat.size() != spec.parameter_count()) {
    throw ContractViolation("mlp: flat vector has " + std::to_string(flat.size()) +
                            " entries, spec needs " + std::to_string(spec.parameter_count()));
  }
  const int m = spec.hidden();
  MlpParameters p;
  Eigen::Index offset = 0;
  p.W1 = unpack_matrix(flat, offset, m, spec.L);
  p.b1 = unpack_vector(flat, offset, m);
  p.w2 = unpack_vector(flat, offset, m);
  p.b2 = flat[offset];
  return p;
}

double mlp_amplitude(const MlpParameters& p, const Configuration& c) {
  check_length(static_cast<int>(p.W1.cols()), c, "mlp_amplitude");
  const Eigen::VectorXd t = (p.W1 * encode_one(c) + p.b1).array().tanh();
  return p.w2.dot(t) + p.b2;
}

Eigen::VectorXd mlp_gradient(const MlpParameters& p, const Configuration& c) {
  check_length(static_cast<int>(p.W1.cols()), c, "mlp_gradient");
  const Eigen::VectorXd x = encode_one(c);
  const Eigen::VectorXd t = (p.W1 * x + p.b1).array().tanh();
  // d psi / d pre-activation = w2 * (1 - t^2)
  const Eigen::VectorXd g_pre = p.w2.array() * (1.0 - t.array().square());
  Eigen::VectorXd grad(p.W1.size() + p.b1.size() + p.w2.size() + 1);
  Eigen::Index offset = 0;
  pack(Eigen::MatrixXd(g_pre * x.transpose()), grad, offset);
  pack(g_pre, grad, offset);
  pack(t, grad, offset);
  grad[offset] = 1.0;
  return grad;
}

// ---------------------------------------------------------------------------
// Neural backflow
// ---------------------------------------------------------------------------

long long BackflowSpec::parameter_count() const {
  const long long m = hidden;
  const long long nl = static_cast<long long>(N) * L;
  return m * L + m + nl * m + nl;
}

Eigen::VectorXd BackflowParameters::to_flat() const {
  Eigen::VectorXd flat(W1.size() + b1.size() + W2.size() + b2.size());
  Eigen::Index offset = 0;
  pack(W1, flat, offset);
  pack(b1, flat, offset);
  pack(W2, flat, offset);
  pack(b2, flat, offset);
  return flat;
}

BackflowParameters BackflowParameters::from_flat(const BackflowSpec& spec,
                                                 const Eigen::VectorXd& flat) {
  if (flat.size() != spec.parameter_count()) {
    throw ContractViolation("backflow: flat vector has " + std::to_string(flat.size()) +
                            " entries, spec needs " + std::to_string(spec.parameter_count()));
  }
  const int m = spec.hidden;
  const Eigen::Index nl = static_cast<Eigen::Index>(spec.N) * spec.L;
  BackflowParameters p;
  Eigen::Index offset = 0;
  p.W1 = unpack_matrix(flat, offset, m, spec.L);
  p.b1 = unpack_vector(flat, offset, m);
  p.W2 = unpack_matrix(flat, offset, nl, m);
  p.b2 = unpack_vector(flat, offset, nl);
  return p;
}

Eigen::MatrixXd determinant_gradient(const Eigen::MatrixXd& m, double* det_out) {
  const Eigen::Index n = m.rows();
  if (n != m.cols()) throw ContractViolation("determinant_gradient requires a square matrix");
  if (n == 1) {
    if (det_out) *det_out = m(0, 0);
    return Eigen::MatrixXd::Ones(1, 1);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const double det = lu.determinant();
  if (det_out) *det_out = det;
  if (std::abs(det) > kSingularDetThreshold) {
    return det * lu.inverse().transpose();
  }
  // Cofactor expansion by minors; finite even for exactly singular input.
  Eigen::MatrixXd cof(n, n);
  Eigen::MatrixXd minor(n - 1, n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index r = 0; r < n - 1; ++r) {
        const Eigen::Index rr = r < i ? r : r + 1;
        for (Eigen::Index c = 0; c < n - 1; ++c) {
          const Eigen::Index cc = c < j ? c : c + 1;
          minor(r, c) = m(rr, cc);
        }
      }
      const double dm = (n == 2) ? minor(0, 0) : minor.partialPivLu().determinant();
      cof(i, j) = (((i + j) & 1) ? -1.0 : 1.0) * dm;
    }
  }
  return cof;
}

namespace {

/// Selected-column matrix M~: orbital a, occupied site sites[b].
Eigen::MatrixXd backflow_matrix(const BackflowSpec& spec, const Eigen::VectorXd& y,
                                const std::vector<int>& sites) {
  const int n = spec.N;
  Eigen::MatrixXd mt(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      mt(a, b) = spec.reference_orbitals(a, sites[static_cast<std::size_t>(b)]) +
                 y[static_cast<Eigen::Index>(a) * spec.L + sites[static_cast<std::size_t>(b)]];
    }
  }
  return mt;
}

void check_backflow_args(const BackflowParameters& p, const BackflowSpec& spec,
                         const Configuration& c, const char* what) {
  check_length(spec.L, c, what);
  if (c.popcount() != spec.N) {
    throw ContractViolation(std::string(what) + ": configuration has " +
                            std::to_string(c.popcount()) + " particles, spec expects " +
                            std::to_string(spec.N));
  }
  if (p.W1.cols() != spec.L || p.W2.rows() != static_cast<Eigen::Index>(spec.N) * spec.L) {
    throw ContractViolation(std::string(what) + ": parameter shapes do not match spec");
  }
}

}  // namespace

double backflow_amplitude(const BackflowParameters& p, const BackflowSpec& spec,
                          const Configuration& c) {
  check_backflow_args(p, spec, c, "backflow_amplitude");
  const Eigen::VectorXd t = (p.W1 * encode_one(c) + p.b1).array().tanh();
  const Eigen::VectorXd y = p.W2 * t + p.b2;
  const Eigen::MatrixXd mt = backflow_matrix(spec, y, occupied_sites(c));
  if (spec.N == 1) return mt(0, 0);
  return mt.partialPivLu().determinant();
}

Eigen::VectorXd backflow_gradient(const BackflowParameters& p, const BackflowSpec& spec,
                                  const Configuration& c) {
  check_backflow_args(p, spec, c, "backflow_gradient");
  const Eigen::VectorXd x = encode_one(c);
  const Eigen::VectorXd t = (p.W1 * x + p.b1).array().tanh();
  const Eigen::VectorXd y = p.W2 * t + p.b2;
  const std::vector<int> sites = occupied_sites(c);
  const Eigen::MatrixXd cof = determinant_gradient(backflow_matrix(spec, y, sites));

  // Scatter d det / d M~ back to the N x L output head.
  Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.N) * spec.L);
  for (int b = 0; b < spec.N; ++b) {
    const int site = sites[static_cast<std::size_t>(b)];
    for (int a = 0; a < spec.N; ++a) {
      d[static_cast<Eigen::Index>(a) * spec.L + site] = cof(a, b);
    }
  }
  const Eigen::VectorXd g_pre =
      (p.W2.transpose() * d).array() * (1.0 - t.array().square());

  Eigen::VectorXd grad(spec.parameter_count());
  Eigen::Index offset = 0;
  pack(Eigen::MatrixXd(g_pre * x.transpose()), grad, offset);
  pack(g_pre, grad, offset);
  pack(Eigen::MatrixXd(d * t.transpose()), grad, offset);
  pack(d, grad, offset);
  return grad;
}

// ---------------------------------------------------------------------------
// Spec-level helpers
// ---------------------------------------------------------------------------

long long parameter_count(const MlpSpec& spec) { return spec.parameter_count(); }
long long parameter_count(const BackflowSpec& spec) { return spec.parameter_count(); }

Eigen::VectorXd init_parameters(const MlpSpec& spec, std::uint64_t seed, double scale) {
  if (!(scale > 0.0)) throw ContractViolation("init_parameters requires scale > 0");
  const int m = spec.hidden();
  GaussianSampler gauss(seed);
  const double s1 = scale / std::sqrt(static_cast<double>(spec.L));
  const double s2 = scale / std::sqrt(static_cast<double>(m));
  Eigen::VectorXd flat(spec.parameter_count());
  Eigen::Index k = 0;
  for (int i = 0; i < m * spec.L; ++i) flat[k++] = s1 * gauss();  // W1
  for (int i = 0; i < m; ++i) flat[k++] = s1 * gauss();           // b1
  for (int i = 0; i < m; ++i) flat[k++] = s2 * gauss();           // w2
  flat[k] = s2 * gauss();                                         // b2
  return flat;
}

Eigen::VectorXd init_parameters(const BackflowSpec& spec, std::uint64_t seed, double scale) {
  if (!(scale > 0.0)) throw ContractViolation("init_parameters requires scale > 0");
  const int m = spec.hidden;
  const Eigen::Index nl = static_cast<Eigen::Index>(spec.N) * spec.L;
  GaussianSampler gauss(seed);
  const double s1 = scale / std::sqrt(static_cast<double>(spec.L));
  const double s2 = scale / std::sqrt(static_cast<double>(m));
  Eigen::VectorXd flat(spec.parameter_count());
  Eigen::Index k = 0;
  for (int i = 0; i < m * spec.L; ++i) flat[k++] = s1 * gauss();  // W1
  for (int i = 0; i < m; ++i) flat[k++] = s1 * gauss();           // b1
  for (Eigen::Index i = 0; i < nl * m; ++i) flat[k++] = s2 * gauss();  // W2
  flat.segment(k, nl).setZero();                                  // b2: anchor at M0
  return flat;
}

Eigen::MatrixXd hartree_fock_orbitals(const Eigen::MatrixXd& hopping, int n_particles) {
  if (hopping.rows() != hopping.cols()) {
    throw ContractViolation("hartree_fock_orbitals requires a square hopping matrix");
  }
  if (n_particles < 1 || n_particles > hopping.rows()) {
    throw DomainError("hartree_fock_orbitals: bad particle number");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hopping);
  Eigen::MatrixXd orbitals = solver.eigenvectors().leftCols(n_particles).transpose();
  fix_row_signs(orbitals);
  return orbitals;
}

Eigen::MatrixXd random_orthonormal_rows(int n_rows, int n_cols, std::uint64_t seed) {
  if (n_rows < 1 || n_rows > n_cols) {
    throw DomainError("random_orthonormal_rows requires 1 <= n_rows <= n_cols");
  }
  GaussianSampler gauss(seed);
  Eigen::MatrixXd a(n_cols, n_rows);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = gauss();
  }
  const Eigen::MatrixXd q =
      Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ() *
      Eigen::MatrixXd::Identity(n_cols, n_rows);
  Eigen::MatrixXd rows = q.transpose();
  fix_row_signs(rows);
  return rows;
}

// ---------------------------------------------------------------------------
// Batched models
// ---------------------------------------------------------------------------

MlpModel::MlpModel(const MlpSpec& spec, const SpinBasis& basis)
    : spec_(spec), encoded_(encode_states(basis.states, basis.L)) {
  if (spec.L != basis.L) throw ContractViolation("MlpModel: spec and basis disagree on L");
}

MlpModel::MlpModel(const MlpSpec& spec, const FermionSector& sector)
    : spec_(spec), encoded_(encode_states(sector.states, sector.L)) {
  if (spec.L != sector.L) throw ContractViolation("MlpModel: spec and sector disagree on L");
}

Eigen::VectorXd MlpModel::amplitudes(const Eigen::VectorXd& theta) const {
  const MlpParameters p = MlpParameters::from_flat(spec_, theta);
  const Eigen::MatrixXd t =
      ((encoded_ * p.W1.transpose()).rowwise() + p.b1.transpose()).array().tanh();
  return (t * p.w2).array() + p.b2;
}

Eigen::VectorXd MlpModel::weighted_gradient_sum(const Eigen::VectorXd& theta,
                                                const Eigen::VectorXd& weights) const {
  if (weights.size() != dimension()) {
    throw ContractViolation("weighted_gradient_sum: weight length != basis size");
  }
  const MlpParameters p = MlpParameters::from_flat(spec_, theta);
  const Eigen::MatrixXd t =
      ((encoded_ * p.W1.transpose()).rowwise() + p.b1.transpose()).array().tanh();
  // B_{s,k} = w_s * (1 - t_{s,k}^2) * w2_k collapses every per-state
  // backpropagation into three dense contractions.
  const Eigen::MatrixXd b =
      (1.0 - t.array().square()) * (weights * p.w2.transpose()).array();
  Eigen::VectorXd grad(spec_.parameter_count());
  Eigen::Index offset = 0;
  pack(Eigen::MatrixXd(b.transpose() * encoded_), grad, offset);  // W1
  pack(Eigen::VectorXd(b.colwise().sum()), grad, offset);         // b1
  pack(Eigen::VectorXd(t.transpose() * weights), grad, offset);   // w2
  grad[offset] = weights.sum();                                   // b2
  return grad;
}

Eigen::VectorXd MlpModel::init_parameters(std::uint64_t seed, double scale) const {
  return nqslab::init_parameters(spec_, seed, scale);
}

BackflowModel::BackflowModel(BackflowSpec spec, const FermionSector& sector)
    : spec_(std::move(spec)), encoded_(encode_states(sector.states, sector.L)) {
  if (spec_.L != sector.L || spec_.N != sector.N) {
    throw ContractViolation("BackflowModel: spec and sector disagree on (L, N)");
  }
  if (spec_.N < 1) throw DomainError("BackflowModel requires N >= 1");
  if (spec_.reference_orbitals.rows() != spec_.N ||
      spec_.reference_orbitals.cols() != spec_.L) {
    throw ContractViolation("BackflowModel: reference orbitals must be N x L");
  }
  occupied_.resize(sector.size(), spec_.N);
  for (std::int64_t s = 0; s < sector.size(); ++s) {
    const auto sites = occupied_sites(sector.config(s));
    for (int b = 0; b < spec_.N; ++b) occupied_(s, b) = sites[static_cast<std::size_t>(b)];
  }
}

Eigen::VectorXd BackflowModel::amplitudes(const Eigen::VectorXd& theta) const {
  const BackflowParameters p = BackflowParameters::from_flat(spec_, theta);
  const Eigen::MatrixXd t =
      ((encoded_ * p.W1.transpose()).rowwise() + p.b1.transpose()).array().tanh();
  const Eigen::MatrixXd y = (t * p.W2.transpose()).rowwise() + p.b2.transpose();
  const int n = spec_.N;
  Eigen::VectorXd psi(dimension());
  Eigen::MatrixXd mt(n, n);
  for (std::int64_t s = 0; s < dimension(); ++s) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const int site = occupied_(s, b);
        mt(a, b) = spec_.reference_orbitals(a, site) +
                   y(s, static_cast<Eigen::Index>(a) * spec_.L + site);
      }
    }
    psi[s] = (n == 1) ? mt(0, 0) : mt.partialPivLu().determinant();
  }
  return psi;
}

Eigen::VectorXd BackflowModel::weighted_gradient_sum(const Eigen::VectorXd& theta,
                                                     const Eigen::VectorXd& weights) const {
  if (weights.size() != dimension()) {
    throw ContractViolation("weighted_gradient_sum: weight length != sector size");
  }
  const BackflowParameters p = BackflowParameters::from_flat(spec_, theta);
  const Eigen::MatrixXd t =
      ((encoded_ * p.W1.transpose()).rowwise() + p.b1.transpose()).array().tanh();
  const Eigen::MatrixXd y = (t * p.W2.transpose()).rowwise() + p.b2.transpose();
  const int n = spec_.N;
  const Eigen::Index nl = static_cast<Eigen::Index>(n) * spec_.L;

  // Column s holds w_s * dpsi_s/dy; determinant cofactors scattered to the
  // occupied columns of the output head.
  Eigen::MatrixXd dw = Eigen::MatrixXd::Zero(nl, dimension());
  Eigen::MatrixXd mt(n, n);
  for (std::int64_t s = 0; s < dimension(); ++s) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const int site = occupied_(s, b);
        mt(a, b) = spec_.reference_orbitals(a, site) +
                   y(s, static_cast<Eigen::Index>(a) * spec_.L + site);
      }
    }
    const Eigen::MatrixXd cof = determinant_gradient(mt);
    for (int b = 0; b < n; ++b) {
      const int site = occupied_(s, b);
      for (int a = 0; a < n; ++a) {
        dw(static_cast<Eigen::Index>(a) * spec_.L + site, s) = weights[s] * cof(a, b);
      }
    }
  }

  const Eigen::MatrixXd e = p.W2.transpose() * dw;  // m x dim
  const Eigen::MatrixXd e_pre = e.array() * (1.0 - t.array().square()).transpose();
  Eigen::VectorXd grad(spec_.parameter_count());
  Eigen::Index offset = 0;
  pack(Eigen::MatrixXd(e_pre * encoded_), grad, offset);   // W1
  pack(Eigen::VectorXd(e_pre.rowwise().sum()), grad, offset);  // b1
  pack(Eigen::MatrixXd(dw * t), grad, offset);             // W2
  pack(Eigen::VectorXd(dw.rowwise().sum()), grad, offset);     // b2
  return grad;
}

Eigen::VectorXd BackflowModel::init_parameters(std::uint64_t seed, double scale) const {
  return nqslab::init_parameters(spec_, seed, scale);
}

}  // namespace nqslab
