#include "biot/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "biot/csv.hpp"

namespace biot {

std::string to_string(Side side) {
  switch (side) {
    case Side::Bottom: return "bottom";
    case Side::Right: return "right";
    case Side::Top: return "top";
    case Side::Left: return "left";
  }
  return "unknown";
}

double SimplexMesh::total_measure() const {
  return std::accumulate(measures_.begin(), measures_.end(), 0.0);
}

std::vector<std::array<double, 2>> SimplexMesh::cell_points(std::size_t c) const {
  std::vector<std::array<double, 2>> pts;
  pts.reserve(static_cast<std::size_t>(dim_ + 1));
  for (int v : cell(c)) {
    auto x = vertex(static_cast<std::size_t>(v));
    pts.push_back({x[0], dim_ > 1 ? x[1] : 0.0});
  }
  return pts;
}

void SimplexMesh::finalize_geometry() {
  const std::size_t nc = num_cells();
  diameters_.assign(nc, 0.0);
  measures_.assign(nc, 0.0);
  for (std::size_t c = 0; c < nc; ++c) {
    const auto pts = cell_points(c);
    if (dim_ == 1) {
      diameters_[c] = pts[1][0] - pts[0][0];
      measures_[c] = diameters_[c];
      continue;
    }
    double longest = 0.0;
    for (int a = 0; a < 3; ++a) {
      const auto& p = pts[static_cast<std::size_t>(a)];
      const auto& q = pts[static_cast<std::size_t>((a + 1) % 3)];
      longest = std::max(longest, std::hypot(q[0] - p[0], q[1] - p[1]));
    }
    diameters_[c] = longest;
    const double cross = (pts[1][0] - pts[0][0]) * (pts[2][1] - pts[0][1]) -
                         (pts[2][0] - pts[0][0]) * (pts[1][1] - pts[0][1]);
    measures_[c] = 0.5 * std::abs(cross);
  }
}

IntervalMesh build_interval_mesh(int n, double length, std::optional<std::vector<double>> grading) {
  if (n <= 0) throw MeshError("interval mesh needs a positive element count, got " + std::to_string(n));
  if (!(length > 0.0)) throw MeshError("interval mesh needs a positive length");

  std::vector<double> sizes;
  if (grading) {
    sizes = std::move(*grading);
    if (sizes.size() != static_cast<std::size_t>(n)) {
      throw MeshError("grading has " + std::to_string(sizes.size()) + " entries, expected " + std::to_string(n));
    }
    if (std::any_of(sizes.begin(), sizes.end(), [](double h) { return !(h > 0.0); })) {
      throw MeshError("grading entries must be positive");
    }
    const double sum = std::accumulate(sizes.begin(), sizes.end(), 0.0);
    if (std::abs(sum - length) > 1e-12 * length) throw MeshError("grading does not sum to the domain length");
  } else {
    sizes.assign(static_cast<std::size_t>(n), length / n);
  }

  IntervalMesh mesh;
  mesh.dim_ = 1;
  mesh.coords_.resize(static_cast<std::size_t>(n) + 1);
  mesh.coords_[0] = 0.0;
  for (int i = 0; i < n; ++i) mesh.coords_[static_cast<std::size_t>(i) + 1] = mesh.coords_[static_cast<std::size_t>(i)] + sizes[static_cast<std::size_t>(i)];
  // Pin the last node so that x_n == length exactly.
  mesh.coords_.back() = length;
  mesh.cells_.resize(2 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    mesh.cells_[2 * static_cast<std::size_t>(i)] = i;
    mesh.cells_[2 * static_cast<std::size_t>(i) + 1] = i + 1;
  }
  mesh.side_vertices_[static_cast<int>(Side::Left)] = {0};
  mesh.side_vertices_[static_cast<int>(Side::Right)] = {n};
  mesh.finalize_geometry();
  return mesh;
}

double TriMesh::signed_area(std::size_t t) const {
  const auto pts = cell_points(t);
  return 0.5 * ((pts[1][0] - pts[0][0]) * (pts[2][1] - pts[0][1]) - (pts[2][0] - pts[0][0]) * (pts[1][1] - pts[0][1]));
}

TriMesh build_structured_tri_mesh(int nx, int ny, double width, double height) {
  if (nx < 1 || ny < 1) throw MeshError("structured mesh needs nx, ny >= 1");
  if (!(width > 0.0) || !(height > 0.0)) throw MeshError("structured mesh needs positive width and height");

  TriMesh mesh;
  mesh.dim_ = 2;
  mesh.nx_ = nx;
  mesh.ny_ = ny;
  mesh.width_ = width;
  mesh.height_ = height;

  mesh.coords_.reserve(2 * static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      mesh.coords_.push_back(i == nx ? width : width * i / nx);
      mesh.coords_.push_back(j == ny ? height : height * j / ny);
    }
  }

  // Triangle 2*(j*nx+i) is the lower-right half of cell (i, j), the next one
  // the upper-left half.
  mesh.cells_.reserve(6 * static_cast<std::size_t>(nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = mesh.grid_vertex(i, j);
      const int v10 = mesh.grid_vertex(i + 1, j);
      const int v11 = mesh.grid_vertex(i + 1, j + 1);
      const int v01 = mesh.grid_vertex(i, j + 1);
      mesh.cells_.insert(mesh.cells_.end(), {v00, v10, v11, v00, v11, v01});
    }
  }

  auto lower = [nx](int i, int j) { return 2 * (j * nx + i); };
  for (int i = 0; i < nx; ++i) {
    mesh.boundary_edges_.push_back({{mesh.grid_vertex(i, 0), mesh.grid_vertex(i + 1, 0)}, lower(i, 0), Side::Bottom});
  }
  for (int j = 0; j < ny; ++j) {
    mesh.boundary_edges_.push_back({{mesh.grid_vertex(nx, j), mesh.grid_vertex(nx, j + 1)}, lower(nx - 1, j), Side::Right});
  }
  for (int i = nx - 1; i >= 0; --i) {
    mesh.boundary_edges_.push_back({{mesh.grid_vertex(i + 1, ny), mesh.grid_vertex(i, ny)}, lower(i, ny - 1) + 1, Side::Top});
  }
  for (int j = ny - 1; j >= 0; --j) {
    mesh.boundary_edges_.push_back({{mesh.grid_vertex(0, j + 1), mesh.grid_vertex(0, j)}, lower(0, j) + 1, Side::Left});
  }

  for (int i = 0; i <= nx; ++i) {
    mesh.side_vertices_[static_cast<int>(Side::Bottom)].push_back(mesh.grid_vertex(i, 0));
    mesh.side_vertices_[static_cast<int>(Side::Top)].push_back(mesh.grid_vertex(i, ny));
  }
  for (int j = 0; j <= ny; ++j) {
    mesh.side_vertices_[static_cast<int>(Side::Left)].push_back(mesh.grid_vertex(0, j));
    mesh.side_vertices_[static_cast<int>(Side::Right)].push_back(mesh.grid_vertex(nx, j));
  }
  mesh.finalize_geometry();
  return mesh;
}

void write_mesh_csv(const SimplexMesh& mesh, const std::string& prefix) {
  {
    CsvWriter out(prefix + "vertices.csv");
    out.header(mesh.dim() == 1 ? std::vector<std::string>{"index", "x"} : std::vector<std::string>{"index", "x", "y"});
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
      std::vector<double> row{static_cast<double>(v)};
      for (double x : mesh.vertex(v)) row.push_back(x);
      out.row(row);
    }
  }
  CsvWriter out(prefix + (mesh.dim() == 1 ? "cells.csv" : "triangles.csv"));
  if (mesh.dim() == 1) {
    out.header({"index", "v0", "v1", "h"});
  } else {
    out.header({"index", "v0", "v1", "v2", "h"});
  }
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    std::vector<double> row{static_cast<double>(c)};
    for (int v : mesh.cell(c)) row.push_back(v);
    row.push_back(mesh.cell_diameter(c));
    out.row(row);
  }
}

}  // namespace biot
