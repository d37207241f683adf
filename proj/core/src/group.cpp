#include "substrat/group.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "substrat/error.hpp"

namespace substrat {

StratifiedGroup StratifiedGroup::build(StructureTensor structure, std::string label) {
  const int d2 = static_cast<int>(structure.size());
  if (d2 < 1) fail(ErrorKind::InvalidInput, "second layer must be nonzero");
  const int d1 = static_cast<int>(structure.front().rows());
  if (d1 < 1) fail(ErrorKind::InvalidInput, "first layer must be nonzero");

  double scale = 0.0;
  for (const Mat& c : structure) {
    if (c.rows() != d1 || c.cols() != d1) {
      fail(ErrorKind::InvalidInput, "structure tensor must have shape (d2, d1, d1)");
    }
    if (!c.allFinite()) fail(ErrorKind::InvalidInput, "structure constants must be finite");
    scale = std::max(scale, c.cwiseAbs().maxCoeff());
  }
  const double tol = 1e-12 * std::max(1.0, scale);
  for (int l = 0; l < d2; ++l) {
    const double asym = (structure[l] + structure[l].transpose()).cwiseAbs().maxCoeff();
    if (asym > tol) {
      std::ostringstream msg;
      msg << "c[" << l << "] is not antisymmetric (|c + c^T| = " << asym << ")";
      fail(ErrorKind::NotAntisymmetric, msg.str());
    }
  }

  StratifiedGroup g;
  g.d1_ = d1;
  g.d2_ = d2;
  g.label_ = std::move(label);
  // Store the exactly antisymmetric part.
  for (Mat& c : structure) c = 0.5 * (c - c.transpose()).eval();
  g.structure_ = std::move(structure);

  g.gram_.resize(d2, d2);
  for (int k = 0; k < d2; ++k) {
    for (int l = 0; l < d2; ++l) {
      g.gram_(k, l) = (g.structure_[k].transpose() * g.structure_[l]).trace();
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(g.gram_);
  const Vec& lam = eig.eigenvalues();
  const double lam_max = lam.maxCoeff();
  if (!(lam_max > 0.0) || lam.minCoeff() <= 1e-10 * lam_max) {
    fail(ErrorKind::SecondLayerDegenerate,
         "the J matrices of the raw dual basis are linearly dependent");
  }
  const Mat& U = eig.eigenvectors();
  g.raw_to_orth_ = U * lam.cwiseSqrt().asDiagonal() * U.transpose();
  g.orth_to_raw_ = U * lam.cwiseSqrt().cwiseInverse().asDiagonal() * U.transpose();

  g.basis_.assign(d2, Mat::Zero(d1, d1));
  for (int k = 0; k < d2; ++k) {
    for (int l = 0; l < d2; ++l) g.basis_[k] += g.orth_to_raw_(l, k) * g.structure_[l];
  }
  return g;
}

Mat StratifiedGroup::j_matrix(const DualVector& mu) const {
  if (mu.size() != d2_) fail(ErrorKind::InvalidInput, "dual vector has wrong length");
  Mat J = Mat::Zero(d1_, d1_);
  for (int k = 0; k < d2_; ++k) J += mu.coords[k] * basis_[k];
  return J;
}

Mat StratifiedGroup::j_matrix_raw(const Vec& raw) const {
  if (raw.size() != d2_) fail(ErrorKind::InvalidInput, "dual vector has wrong length");
  Mat J = Mat::Zero(d1_, d1_);
  for (int l = 0; l < d2_; ++l) J += raw[l] * structure_[l];
  return J;
}

double StratifiedGroup::dual_inner(const DualVector& mu, const DualVector& nu) const {
  return (j_matrix(mu).transpose() * j_matrix(nu)).trace();
}

StratifiedGroup heisenberg(int n) {
  if (n < 1) fail(ErrorKind::UnsupportedDimensions, "heisenberg needs n >= 1");
  Mat c = Mat::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    c(2 * k, 2 * k + 1) = 1.0;
    c(2 * k + 1, 2 * k) = -1.0;
  }
  return StratifiedGroup::build({c}, "heisenberg:" + std::to_string(n));
}

namespace {

// Left multiplication by the imaginary units of the quaternions (d = 4) or
// octonions (d = 8) on the algebra itself, basis e_0 = 1, e_1, ..., e_{d-1}.
std::vector<Mat> left_multiplications(int d) {
  // Oriented triples e_a e_b = e_c.
  std::vector<std::array<int, 3>> triples;
  if (d == 4) {
    triples = {{1, 2, 3}};
  } else {
    triples = {{1, 2, 3}, {1, 4, 5}, {1, 7, 6}, {2, 4, 6}, {2, 5, 7}, {3, 4, 7}, {3, 6, 5}};
  }
  // table[a][b] = signed index of e_a e_b.
  std::vector<std::vector<std::pair<int, int>>> table(
      d, std::vector<std::pair<int, int>>(d, {0, 0}));
  for (int a = 0; a < d; ++a) {
    table[0][a] = {a, 1};
    table[a][0] = {a, 1};
  }
  for (int a = 1; a < d; ++a) table[a][a] = {0, -1};
  for (const auto& t : triples) {
    const int a = t[0], b = t[1], c = t[2];
    table[a][b] = {c, 1};
    table[b][a] = {c, -1};
    table[b][c] = {a, 1};
    table[c][b] = {a, -1};
    table[c][a] = {b, 1};
    table[a][c] = {b, -1};
  }
  std::vector<Mat> out;
  for (int a = 1; a < d; ++a) {
    Mat L = Mat::Zero(d, d);
    for (int b = 0; b < d; ++b) {
      const auto [idx, sign] = table[a][b];
      L(idx, b) = sign;
    }
    out.push_back(L);
  }
  return out;
}

}  // namespace

StratifiedGroup htype(int d1, int d2) {
  int base = 0;
  if (d2 == 1 && d1 >= 2 && d1 % 2 == 0) {
    base = 2;
  } else if (d2 >= 1 && d2 <= 3 && d1 >= 4 && d1 % 4 == 0) {
    base = 4;
  } else if (d2 >= 4 && d2 <= 7 && d1 >= 8 && d1 % 8 == 0) {
    base = 8;
  } else {
    fail(ErrorKind::UnsupportedDimensions,
         "no builtin Clifford module for (d1, d2) = (" + std::to_string(d1) + ", " +
             std::to_string(d2) + ")");
  }
  std::vector<Mat> units;
  if (base == 2) {
    Mat rot(2, 2);
    rot << 0.0, 1.0, -1.0, 0.0;
    units.push_back(rot);
  } else {
    units = left_multiplications(base);
  }
  StructureTensor c(d2, Mat::Zero(d1, d1));
  for (int l = 0; l < d2; ++l) {
    for (int block = 0; block < d1 / base; ++block) {
      c[l].block(block * base, block * base, base, base) = units[l];
    }
  }
  return StratifiedGroup::build(std::move(c),
                                "htype:" + std::to_string(d1) + "," + std::to_string(d2));
}

StratifiedGroup free2step(int d1) {
  if (d1 < 2) fail(ErrorKind::UnsupportedDimensions, "free2step needs d1 >= 2");
  const int d2 = d1 * (d1 - 1) / 2;
  StructureTensor c(d2, Mat::Zero(d1, d1));
  int l = 0;
  for (int i = 0; i < d1; ++i) {
    for (int j = i + 1; j < d1; ++j, ++l) {
      c[l](i, j) = 1.0;
      c[l](j, i) = -1.0;
    }
  }
  return StratifiedGroup::build(std::move(c), "free2step:" + std::to_string(d1));
}

StratifiedGroup rotation_family(const std::vector<double>& frequencies) {
  if (frequencies.empty()) fail(ErrorKind::UnsupportedDimensions, "rotfam needs a frequency");
  const int n = static_cast<int>(frequencies.size());
  Mat c = Mat::Zero(2 * n, 2 * n);
  std::ostringstream label;
  label << "rotfam:";
  for (int k = 0; k < n; ++k) {
    c(2 * k, 2 * k + 1) = frequencies[k];
    c(2 * k + 1, 2 * k) = -frequencies[k];
    label << (k ? "," : "") << frequencies[k];
  }
  return StratifiedGroup::build({c}, label.str());
}

}  // namespace substrat
