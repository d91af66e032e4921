#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace biot {

class MeshError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Side of the bounding box a boundary entity lies on.  In 1D only Left
/// (x = 0) and Right (x = length) occur.
enum class Side { Bottom = 0, Right = 1, Top = 2, Left = 3 };

inline constexpr std::array<Side, 4> kAllSides = {Side::Bottom, Side::Right, Side::Top, Side::Left};

std::string to_string(Side side);

/// Conforming simplicial mesh in 1 or 2 space dimensions.  Cells store d+1
/// vertex indices; vertex coordinates are stored interleaved.
class SimplexMesh {
 public:
  SimplexMesh() = default;
  virtual ~SimplexMesh() = default;
  SimplexMesh(const SimplexMesh&) = default;
  SimplexMesh(SimplexMesh&&) = default;
  SimplexMesh& operator=(const SimplexMesh&) = default;
  SimplexMesh& operator=(SimplexMesh&&) = default;

  int dim() const { return dim_; }
  int vertices_per_cell() const { return dim_ + 1; }
  std::size_t num_vertices() const { return coords_.size() / static_cast<std::size_t>(dim_); }
  std::size_t num_cells() const { return cells_.size() / static_cast<std::size_t>(dim_ + 1); }

  std::span<const int> cell(std::size_t c) const {
    return {cells_.data() + c * static_cast<std::size_t>(dim_ + 1), static_cast<std::size_t>(dim_ + 1)};
  }
  std::span<const double> vertex(std::size_t v) const {
    return {coords_.data() + v * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  /// Longest edge of cell c (the cell length in 1D).
  double cell_diameter(std::size_t c) const { return diameters_[c]; }
  /// Length (1D) or area (2D) of cell c.
  double cell_measure(std::size_t c) const { return measures_[c]; }
  double total_measure() const;

  /// Coordinates of cell c's vertices, gathered as d+1 points.
  std::vector<std::array<double, 2>> cell_points(std::size_t c) const;

  /// Vertices lying on the given side, in increasing order of index.
  const std::vector<int>& side_vertices(Side side) const { return side_vertices_[static_cast<int>(side)]; }

 protected:
  void finalize_geometry();

  int dim_ = 1;
  std::vector<double> coords_;
  std::vector<int> cells_;
  std::vector<double> diameters_;
  std::vector<double> measures_;
  std::array<std::vector<int>, 4> side_vertices_;
};

/// Partition 0 = x_0 < x_1 < ... < x_n = length of an interval.
class IntervalMesh : public SimplexMesh {
 public:
  const std::vector<double>& node_coords() const { return coords_; }
  const std::vector<double>& element_sizes() const { return diameters_; }
  double length() const { return coords_.back(); }

  friend IntervalMesh build_interval_mesh(int n, double length, std::optional<std::vector<double>> grading);
};

/// Uniform mesh with n cells when grading is absent; otherwise the element
/// sizes are taken from grading (n positive entries summing to length).
IntervalMesh build_interval_mesh(int n, double length, std::optional<std::vector<double>> grading = std::nullopt);

struct BoundaryEdge {
  std::array<int, 2> vertices;
  int triangle;
  Side side;
};

/// Structured triangulation of [0, width] x [0, height]: each of the nx*ny
/// rectangles is split along its bottom-left to top-right diagonal.
class TriMesh : public SimplexMesh {
 public:
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double width() const { return width_; }
  double height() const { return height_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }
  /// Vertex index of grid node (i, j), 0 <= i <= nx, 0 <= j <= ny.
  int grid_vertex(int i, int j) const { return j * (nx_ + 1) + i; }
  /// Signed area of triangle t computed from its vertex ordering.
  double signed_area(std::size_t t) const;

  friend TriMesh build_structured_tri_mesh(int nx, int ny, double width, double height);

 private:
  int nx_ = 0;
  int ny_ = 0;
  double width_ = 0.0;
  double height_ = 0.0;
  std::vector<BoundaryEdge> boundary_edges_;
};

TriMesh build_structured_tri_mesh(int nx, int ny, double width, double height);

/// Writes `<prefix>vertices.csv` (index,x,y) and `<prefix>triangles.csv`
/// (index,v0,v1,v2,h).
void write_mesh_csv(const SimplexMesh& mesh, const std::string& prefix);

}  // namespace biot
