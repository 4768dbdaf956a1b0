#pragma once

// Structured P1 finite elements on the unit square with homogeneous
// Dirichlet conditions on the whole boundary.
//
// Both the displacement components and the pressure use continuous P1
// elements. Every cell of the uniform n x n grid is split along the diagonal
// from its lower-left to its upper-right corner.

#include "poroph/numkit.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

namespace poroph::fem {

using Point = std::array<double, 2>;
using Triangle = std::array<int, 3>;
using TriangleCoords = std::array<Point, 3>;

struct Mesh2D {
    int n = 0;                        ///< subdivisions per side
    std::vector<Point> nodes;         ///< node (i, j) has index j * (n + 1) + i
    std::vector<Triangle> triangles;  ///< counterclockwise
    std::vector<int> boundary_nodes;  ///< sorted

    [[nodiscard]] TriangleCoords coords(std::size_t tri) const;
    [[nodiscard]] bool is_boundary(int node) const;
    [[nodiscard]] int interior_count() const { return static_cast<int>(nodes.size() - boundary_nodes.size()); }
};

Mesh2D build_unit_square_mesh(int n);

/// Signed area, positive for counterclockwise vertices.
double signed_area(const TriangleCoords& t);

/// Plain-text dump: a "nodes <count>" section followed by "triangles <count>".
void write_mesh(std::ostream& os, const Mesh2D& mesh);
void write_mesh_file(const std::filesystem::path& path, const Mesh2D& mesh);

enum class SpaceKind { scalar_p1, vector_p1 };

/// P1 space over the interior nodes of a mesh.
///
/// Vector spaces order their free dofs component-blocked: all x-components
/// (in interior node order) followed by all y-components.
class FeSpace {
public:
    FeSpace(std::shared_ptr<const Mesh2D> mesh, SpaceKind kind);

    [[nodiscard]] SpaceKind kind() const { return kind_; }
    [[nodiscard]] const Mesh2D& mesh() const { return *mesh_; }
    [[nodiscard]] const std::shared_ptr<const Mesh2D>& mesh_ptr() const { return mesh_; }
    [[nodiscard]] int dim() const;
    [[nodiscard]] int components() const { return kind_ == SpaceKind::vector_p1 ? 2 : 1; }
    [[nodiscard]] int interior_count() const { return static_cast<int>(interior_nodes_.size()); }
    [[nodiscard]] const std::vector<int>& interior_nodes() const { return interior_nodes_; }

    /// Free dof of (node, component), or -1 for Dirichlet nodes.
    [[nodiscard]] int dof(int node, int component = 0) const;
    /// Global node index of each free dof, in dof order.
    [[nodiscard]] std::vector<int> free_dofs() const;

    /// Values of a function at the free dofs (nodal interpolation).
    [[nodiscard]] Vec interpolate(const std::function<double(double, double)>& f) const;
    [[nodiscard]] Vec interpolate(const std::function<Point(double, double)>& f) const;

private:
    std::shared_ptr<const Mesh2D> mesh_;
    SpaceKind kind_;
    std::vector<int> node_to_interior_;
    std::vector<int> interior_nodes_;
};

struct PoroMaterial {
    double rho = 1.0;     ///< density, 0 means quasi-static
    double mu = 1.0;      ///< Lamé shear modulus
    double lambda = 1.0;  ///< Lamé first parameter
    double alpha = 1.0;   ///< Biot–Willis coupling coefficient
    double biot_M = 1.0;  ///< Biot modulus
    double kappa = 1.0;   ///< permeability
    double nu = 1.0;      ///< fluid viscosity

    /// Throws ConfigError when a coefficient is non-finite or out of range.
    void validate() const;
};

/// Bounded coefficient law κ(ξ) with the bounds the caller guarantees.
struct KappaLaw {
    std::function<double(double)> kappa;
    double lower = 0.0;
    double upper = 0.0;

    static KappaLaw constant(double value);
    /// κ(ξ) = κ₀ (1 + ξ²) / (2 + ξ²), bounded in [κ₀/2, κ₀].
    static KappaLaw kozeny_carman(double kappa0);
};

// Element matrices on a single triangle.
Eigen::Matrix3d local_mass(const TriangleCoords& t, double coeff);
Eigen::Matrix3d local_stiffness(const TriangleCoords& t, double coeff);
/// Local elasticity matrix, dofs ordered (x0, x1, x2, y0, y1, y2).
Eigen::Matrix<double, 6, 6> local_elasticity(const TriangleCoords& t, double mu, double lambda);
/// Row i: pressure basis i; column (c * 3 + k): displacement component c of vertex k.
Eigen::Matrix<double, 3, 6> local_divergence(const TriangleCoords& t, double alpha);
/// Constant gradients of the three barycentric basis functions (rows).
Eigen::Matrix<double, 3, 2> p1_gradients(const TriangleCoords& t);

Mat assemble_mass(const FeSpace& space, double coeff);
Mat assemble_laplace(const FeSpace& space, double coeff);
/// Laplace-type stiffness with one coefficient per triangle.
Mat assemble_laplace_elementwise(const FeSpace& space, const std::vector<double>& coeffs);
Mat assemble_elasticity(const FeSpace& vspace, double mu, double lambda);
/// Shape (qspace.dim x vspace.dim): D_ij = α ∫ (∇·φ_j) ψ_i.
Mat assemble_divergence_coupling(const FeSpace& vspace, const FeSpace& qspace, double alpha);
Vec assemble_load(const FeSpace& space, const std::function<double(double, double)>& density);
Vec assemble_load(const FeSpace& vspace, const std::function<Point(double, double)>& density);

/// Elementwise ∇·u_h of a displacement given at the free dofs.
std::vector<double> elementwise_divergence(const FeSpace& vspace, const Vec& u);

/// Stiffness with coefficient κ(∇·u_h)/ν per triangle. Throws
/// BoundViolationError when a sampled κ leaves [law.lower, law.upper] or is
/// not positive.
Mat assemble_nonlinear_permeability(const FeSpace& qspace, const FeSpace& vspace, const Vec& u,
                                    const KappaLaw& law, double nu);

}  // namespace poroph::fem
