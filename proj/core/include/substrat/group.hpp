#pragma once

#include <string>
#include <vector>

#include "substrat/linalg.hpp"

namespace substrat {

/// Raw structure constants: entry [l](i, j) is c[l][i][j], i.e.
/// [X_i, X_j] = sum_l c[l][i][j] U_l.
using StructureTensor = std::vector<Mat>;

/// Element of the dual of the second layer, in the Gram-orthonormalized
/// coordinates. Its Euclidean norm is the Hilbert–Schmidt pull-back norm.
struct DualVector {
  Vec coords;

  DualVector() = default;
  explicit DualVector(Vec c) : coords(std::move(c)) {}

  static DualVector zero(int d2) { return DualVector(Vec::Zero(d2)); }
  int size() const { return static_cast<int>(coords.size()); }
  double norm() const { return coords.norm(); }
};

/// Point of G in exponential coordinates; u is orthonormal for the inner
/// product dual to the one on the dual second layer.
struct GroupPoint {
  Vec x;
  Vec u;
};

struct Dimensions {
  int d1;
  int d2;
  int d;
  int Q;
};

/// A 2-step stratified group given by structure constants. Immutable after
/// construction. The basis X_1..X_d1 of the first layer is treated as
/// orthonormal as given; callers wanting another metric re-orthonormalize
/// before building.
class StratifiedGroup {
 public:
  /// Validates antisymmetry and surjectivity onto the second layer and
  /// computes the symmetric Gram orthonormalization of {J_raw_l}.
  /// Throws NotAntisymmetric or SecondLayerDegenerate.
  static StratifiedGroup build(StructureTensor structure, std::string label = "custom");

  int d1() const { return d1_; }
  int d2() const { return d2_; }
  Dimensions dimensions() const { return {d1_, d2_, d1_ + d2_, d1_ + 2 * d2_}; }
  const std::string& label() const { return label_; }

  const StructureTensor& structure() const { return structure_; }

  /// G^{1/2}: raw dual coordinates -> orthonormal dual coordinates.
  const Mat& dual_basis_transform() const { return raw_to_orth_; }
  /// G^{-1/2}: orthonormal dual coordinates -> raw dual coordinates.
  const Mat& orthonormal_to_raw() const { return orth_to_raw_; }
  /// Hilbert–Schmidt Gram matrix of the raw J matrices.
  const Mat& gram() const { return gram_; }

  /// J over the orthonormal dual basis; an HS-orthonormal family.
  const std::vector<Mat>& basis() const { return basis_; }

  /// Matrix with (i, j) entry mu([X_i, X_j]), so x^T J x' = mu([x, x']).
  Mat j_matrix(const DualVector& mu) const;
  Mat j_matrix_raw(const Vec& raw) const;

  DualVector from_raw(const Vec& raw) const { return DualVector(raw_to_orth_ * raw); }
  Vec to_raw(const DualVector& mu) const { return orth_to_raw_ * mu.coords; }

  /// Second-layer coordinates: u_orth = G^{-1/2} u_raw keeps <mu, u> invariant.
  Vec center_from_raw(const Vec& u_raw) const { return orth_to_raw_ * u_raw; }
  Vec center_to_raw(const Vec& u) const { return raw_to_orth_ * u; }

  /// <J_mu, J_nu>_HS.
  double dual_inner(const DualVector& mu, const DualVector& nu) const;

 private:
  StratifiedGroup() = default;

  int d1_ = 0;
  int d2_ = 0;
  std::string label_;
  StructureTensor structure_;
  Mat gram_;
  Mat raw_to_orth_;
  Mat orth_to_raw_;
  std::vector<Mat> basis_;
};

inline StratifiedGroup build_group(StructureTensor structure) {
  return StratifiedGroup::build(std::move(structure));
}
inline Dimensions group_dimensions(const StratifiedGroup& g) { return g.dimensions(); }
inline Mat j_matrix(const StratifiedGroup& g, const DualVector& mu) { return g.j_matrix(mu); }
inline double dual_inner(const StratifiedGroup& g, const DualVector& mu, const DualVector& nu) {
  return g.dual_inner(mu, nu);
}

// Builtin corpus.

/// Heisenberg group H_n: d1 = 2n, d2 = 1, [X_{2k}, X_{2k+1}] = U.
StratifiedGroup heisenberg(int n);

/// Heisenberg-type group from a Clifford module: d2 <= 3 needs d1 a multiple
/// of 4 (quaternions; d2 = 1 also allows any even d1), 4 <= d2 <= 7 needs d1 a
/// multiple of 8 (octonions). Other pairs throw UnsupportedDimensions.
StratifiedGroup htype(int d1, int d2);

/// Free 2-step nilpotent group on d1 generators, d2 = d1 (d1 - 1) / 2.
StratifiedGroup free2step(int d1);

/// d2 = 1, J_tau = tau * blockdiag(f_k * rot), rot = [[0, 1], [-1, 0]].
StratifiedGroup rotation_family(const std::vector<double>& frequencies);

}  // namespace substrat
