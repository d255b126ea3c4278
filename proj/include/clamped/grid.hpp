#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clamped {

/// Lattice coordinates; the node sits at (i h, j h).
struct GridIndex {
  int i = 0;
  int j = 0;
};

/// Interior node with at least one exterior 4-neighbour. The normal is the
/// normalised Sobel gradient of the exterior indicator.
struct RingNode {
  int node = 0;
  double nx = 0.0;
  double ny = 0.0;
  int component = 0;
};

/// Unit pixel edge between an interior node and an exterior 4-neighbour.
/// Summing h * F(midpoint) . (di, dj) over all faces is the exact flux of F
/// through the boundary of the union of pixels centred on interior nodes.
struct BoundaryFace {
  int ring = 0;  // position in GridDomain::ring()
  int di = 0;
  int dj = 0;
};

/// Boolean interior mask on the uniform lattice h Z^2. The stored box always
/// keeps two exterior layers around the interior, so 13-point stencils never
/// leave it.
class GridDomain {
 public:
  using Predicate = std::function<bool(double, double)>;

  /// Nodes whose centre satisfies `inside` within [xmin, xmax] x [ymin, ymax].
  static GridDomain from_predicate(const Predicate& inside, double xmin, double xmax, double ymin, double ymax,
                                   double h);

  /// rows[j][i] != 0 marks node (i0 + i, j0 + j) interior.
  static GridDomain from_mask(const std::vector<std::vector<int>>& rows, double h, int i0 = 0, int j0 = 0);

  double h() const { return h_; }
  int interior_count() const { return static_cast<int>(nodes_.size()); }
  double area() const { return h_ * h_ * interior_count(); }

  /// Interior index of lattice node (i, j), or -1.
  int index_of(int i, int j) const;
  bool is_interior(int i, int j) const { return index_of(i, j) >= 0; }

  GridIndex node(int k) const { return nodes_[k]; }
  double x(int k) const { return h_ * nodes_[k].i; }
  double y(int k) const { return h_ * nodes_[k].j; }

  std::span<const RingNode> ring() const { return ring_; }
  std::span<const BoundaryFace> faces() const { return faces_; }
  /// Connected components of the complement; component 0 is unbounded.
  int component_count() const { return component_count_; }
  /// Position of an interior node in ring(), or -1.
  int ring_position(int k) const { return ring_pos_[k]; }

  /// Same mask on the lattice (factor h) Z^2, i.e. the dilated domain.
  GridDomain rescaled(double factor) const;

  /// Lattice bounding box of the interior.
  GridIndex lower() const { return lower_; }
  GridIndex upper() const { return upper_; }

 private:
  GridDomain() = default;
  void build(std::vector<char> box_mask, int i0, int j0, int nx, int ny, double h);

  double h_ = 1.0;
  int i0_ = 0, j0_ = 0, nx_ = 0, ny_ = 0;
  std::vector<int> box_index_;
  std::vector<GridIndex> nodes_;
  std::vector<RingNode> ring_;
  std::vector<int> ring_pos_;
  std::vector<BoundaryFace> faces_;
  int component_count_ = 0;
  GridIndex lower_, upper_;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

/// Values on the interior nodes of a domain; zero outside.
struct ScalarField {
  DomainPtr domain;
  Eigen::VectorXd values;

  ScalarField() = default;
  ScalarField(DomainPtr d, Eigen::VectorXd v);
  static ScalarField zeros(DomainPtr d);
  static ScalarField from_function(DomainPtr d, const std::function<double(double, double)>& f);

  /// h^2 sum of values.
  double integral() const;
  /// sqrt(h^2 sum of squares).
  double l2_norm() const;
  double min() const { return values.minCoeff(); }
  double max() const { return values.maxCoeff(); }
};

/// Per-ring-node data, aligned with GridDomain::ring().
using RingValues = Eigen::VectorXd;

}  // namespace clamped
