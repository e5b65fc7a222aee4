#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/Sparse>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace atmesh {

using Scalar = double;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using VecXi = Eigen::VectorXi;
using MatX2 = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;
using MatX3 = Eigen::Matrix<Scalar, Eigen::Dynamic, 3>;
using MatX2i = Eigen::Matrix<int, Eigen::Dynamic, 2>;
using MatX3i = Eigen::Matrix<int, Eigen::Dynamic, 3>;

// Row-major sparse = CSR; keeps assembly order and products deterministic.
using SpMat = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<Scalar>;

/// Scalar field sampled on vertices; the feature field v lives here.
using Primal0Form = VecX;
/// One 3-vector per face, stored row-wise; normal fields u and g live here.
using Dual0Field3 = MatX3;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File-format violation, annotated with path and line.
struct ParseError : Error {
  ParseError(const std::string& path, int line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line(line) {}
  int line;
};

/// Mesh fails a structural invariant (non-manifold edge, degenerate face, ...).
struct MeshError : Error {
  explicit MeshError(const std::string& what) : Error(what) {}
  MeshError(const std::string& what, std::vector<std::pair<int, int>> edges)
      : Error(what), offending_edges(std::move(edges)) {}
  std::vector<std::pair<int, int>> offending_edges;
};

/// Linear solve did not meet its contract; carries the last residual seen.
struct SolverError : Error {
  SolverError(const std::string& what, Scalar residual = 0, int iterations = 0)
      : Error(what), residual(residual), iterations(iterations) {}
  Scalar residual;
  int iterations;
};

}  // namespace atmesh
