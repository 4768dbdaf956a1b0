#include "poroph/fem.hpp"

#include "poroph/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>

namespace poroph::fem {

namespace {

// Edge-midpoint rule: weights A/3, exact for quadratics. Barycentric
// coordinates of the three quadrature points.
constexpr std::array<std::array<double, 3>, 3> kMidpointBary{{
    {0.5, 0.5, 0.0},
    {0.0, 0.5, 0.5},
    {0.5, 0.0, 0.5},
}};

Point quad_point(const TriangleCoords& t, const std::array<double, 3>& bary) {
    return {bary[0] * t[0][0] + bary[1] * t[1][0] + bary[2] * t[2][0],
            bary[0] * t[0][1] + bary[1] * t[1][1] + bary[2] * t[2][1]};
}

double checked_area(const TriangleCoords& t) {
    const double a = signed_area(t);
    if (!(a > 0.0)) throw Error("degenerate or clockwise triangle");
    return a;
}

template <int N>
void mirror_upper(Eigen::Matrix<double, N, N>& m) {
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < i; ++j) m(i, j) = m(j, i);
}

void require_kind(const FeSpace& s, SpaceKind kind, const char* what) {
    if (s.kind() != kind) {
        throw DimensionError(std::string(what) +
                             (kind == SpaceKind::scalar_p1 ? ": scalar P1 space required"
                                                           : ": vector P1 space required"));
    }
}

}  // namespace

TriangleCoords Mesh2D::coords(std::size_t tri) const {
    const auto& t = triangles.at(tri);
    return {nodes[t[0]], nodes[t[1]], nodes[t[2]]};
}

bool Mesh2D::is_boundary(int node) const {
    return std::binary_search(boundary_nodes.begin(), boundary_nodes.end(), node);
}

double signed_area(const TriangleCoords& t) {
    return 0.5 * ((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) -
                  (t[2][0] - t[0][0]) * (t[1][1] - t[0][1]));
}

Mesh2D build_unit_square_mesh(int n) {
    if (n < 1) throw ConfigError("mesh resolution must be at least 1");
    Mesh2D mesh;
    mesh.n = n;
    const int side = n + 1;
    mesh.nodes.reserve(static_cast<std::size_t>(side) * side);
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            mesh.nodes.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
            if (i == 0 || i == n || j == 0 || j == n) mesh.boundary_nodes.push_back(j * side + i);
        }
    }
    mesh.triangles.reserve(2 * static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int v00 = j * side + i;
            const int v10 = v00 + 1;
            const int v01 = v00 + side;
            const int v11 = v01 + 1;
            mesh.triangles.push_back({v00, v10, v11});
            mesh.triangles.push_back({v00, v11, v01});
        }
    }
    return mesh;
}

void write_mesh(std::ostream& os, const Mesh2D& mesh) {
    os << std::setprecision(17);
    os << "nodes " << mesh.nodes.size() << '\n';
    for (std::size_t k = 0; k < mesh.nodes.size(); ++k) {
        os << k << ' ' << mesh.nodes[k][0] << ' ' << mesh.nodes[k][1] << ' '
           << (mesh.is_boundary(static_cast<int>(k)) ? 1 : 0) << '\n';
    }
    os << "triangles " << mesh.triangles.size() << '\n';
    for (std::size_t k = 0; k < mesh.triangles.size(); ++k) {
        const auto& t = mesh.triangles[k];
        os << k << ' ' << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
}

void write_mesh_file(const std::filesystem::path& path, const Mesh2D& mesh) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    write_mesh(os, mesh);
}

FeSpace::FeSpace(std::shared_ptr<const Mesh2D> mesh, SpaceKind kind)
    : mesh_(std::move(mesh)), kind_(kind) {
    if (!mesh_) throw Error("FeSpace: null mesh");
    node_to_interior_.assign(mesh_->nodes.size(), -1);
    for (std::size_t k = 0; k < mesh_->nodes.size(); ++k) {
        if (!mesh_->is_boundary(static_cast<int>(k))) {
            node_to_interior_[k] = static_cast<int>(interior_nodes_.size());
            interior_nodes_.push_back(static_cast<int>(k));
        }
    }
}

int FeSpace::dim() const { return components() * interior_count(); }

int FeSpace::dof(int node, int component) const {
    const int local = node_to_interior_.at(static_cast<std::size_t>(node));
    if (local < 0) return -1;
    return component * interior_count() + local;
}

std::vector<int> FeSpace::free_dofs() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(dim()));
    for (int c = 0; c < components(); ++c) out.insert(out.end(), interior_nodes_.begin(), interior_nodes_.end());
    return out;
}

Vec FeSpace::interpolate(const std::function<double(double, double)>& f) const {
    require_kind(*this, SpaceKind::scalar_p1, "interpolate");
    Vec out(dim());
    for (int k = 0; k < interior_count(); ++k) {
        const auto& p = mesh_->nodes[interior_nodes_[k]];
        out(k) = f(p[0], p[1]);
    }
    return out;
}

Vec FeSpace::interpolate(const std::function<Point(double, double)>& f) const {
    require_kind(*this, SpaceKind::vector_p1, "interpolate");
    Vec out(dim());
    const int ni = interior_count();
    for (int k = 0; k < ni; ++k) {
        const auto& p = mesh_->nodes[interior_nodes_[k]];
        const Point v = f(p[0], p[1]);
        out(k) = v[0];
        out(ni + k) = v[1];
    }
    return out;
}

void PoroMaterial::validate() const {
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!(finite(rho) && finite(mu) && finite(lambda) && finite(alpha) && finite(biot_M) &&
          finite(kappa) && finite(nu))) {
        throw ConfigError("material: all coefficients must be finite");
    }
    if (rho < 0.0) throw ConfigError("material: rho must be >= 0");
    if (mu <= 0.0) throw ConfigError("material: mu must be > 0");
    if (lambda < 0.0) throw ConfigError("material: lambda must be >= 0");
    if (alpha < 0.0) throw ConfigError("material: alpha must be >= 0");
    if (biot_M <= 0.0) throw ConfigError("material: biot_M must be > 0");
    if (kappa <= 0.0) throw ConfigError("material: kappa must be > 0");
    if (nu <= 0.0) throw ConfigError("material: nu must be > 0");
}

KappaLaw KappaLaw::constant(double value) {
    return {[value](double) { return value; }, value, value};
}

KappaLaw KappaLaw::kozeny_carman(double kappa0) {
    return {[kappa0](double xi) { return kappa0 * (1.0 + xi * xi) / (2.0 + xi * xi); }, 0.5 * kappa0, kappa0};
}

Eigen::Matrix<double, 3, 2> p1_gradients(const TriangleCoords& t) {
    const double two_a = 2.0 * checked_area(t);
    Eigen::Matrix<double, 3, 2> g;
    for (int i = 0; i < 3; ++i) {
        const Point& b = t[(i + 1) % 3];
        const Point& c = t[(i + 2) % 3];
        g(i, 0) = (b[1] - c[1]) / two_a;
        g(i, 1) = (c[0] - b[0]) / two_a;
    }
    return g;
}

Eigen::Matrix3d local_mass(const TriangleCoords& t, double coeff) {
    const double w = checked_area(t) / 3.0;
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    for (const auto& bary : kMidpointBary) {
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) m(i, j) += w * bary[i] * bary[j];
    }
    mirror_upper(m);
    return coeff * m;
}

Eigen::Matrix3d local_stiffness(const TriangleCoords& t, double coeff) {
    const double area = checked_area(t);
    const auto g = p1_gradients(t);
    Eigen::Matrix3d k;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) k(i, j) = coeff * area * (g(i, 0) * g(j, 0) + g(i, 1) * g(j, 1));
    mirror_upper(k);
    return k;
}

Eigen::Matrix<double, 6, 6> local_elasticity(const TriangleCoords& t, double mu, double lambda) {
    const double area = checked_area(t);
    const auto g = p1_gradients(t);
    Eigen::Matrix<double, 6, 6> k;
    for (int a = 0; a < 6; ++a) {
        const int c = a / 3;
        const int ka = a % 3;
        for (int b = a; b < 6; ++b) {
            const int d = b / 3;
            const int kb = b % 3;
            const double grad_dot = g(ka, 0) * g(kb, 0) + g(ka, 1) * g(kb, 1);
            // 2μ ε(a):ε(b) = μ (δ_cd ∇ψ_a·∇ψ_b + ∂_d ψ_a ∂_c ψ_b)
            const double strain = (c == d ? grad_dot : 0.0) + g(ka, d) * g(kb, c);
            k(a, b) = area * (mu * strain + lambda * g(ka, c) * g(kb, d));
        }
    }
    mirror_upper(k);
    return k;
}

Eigen::Matrix<double, 3, 6> local_divergence(const TriangleCoords& t, double alpha) {
    const double w = checked_area(t) / 3.0;
    const auto g = p1_gradients(t);
    Eigen::Matrix<double, 3, 6> d = Eigen::Matrix<double, 3, 6>::Zero();
    for (const auto& bary : kMidpointBary) {
        for (int i = 0; i < 3; ++i) {
            for (int c = 0; c < 2; ++c)
                for (int k = 0; k < 3; ++k) d(i, c * 3 + k) += w * bary[i] * g(k, c);
        }
    }
    return alpha * d;
}

Mat assemble_mass(const FeSpace& space, double coeff) {
    if (!(coeff >= 0.0)) throw ConfigError("assemble_mass: coefficient must be >= 0");
    const Mesh2D& mesh = space.mesh();
    Mat m = Mat::Zero(space.dim(), space.dim());
    for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
        const auto local = local_mass(mesh.coords(e), coeff);
        const auto& tri = mesh.triangles[e];
        for (int c = 0; c < space.components(); ++c) {
            for (int i = 0; i < 3; ++i) {
                const int gi = space.dof(tri[i], c);
                if (gi < 0) continue;
                for (int j = 0; j < 3; ++j) {
                    const int gj = space.dof(tri[j], c);
                    if (gj >= 0) m(gi, gj) += local(i, j);
                }
            }
        }
    }
    return m;
}

Mat assemble_laplace_elementwise(const FeSpace& space, const std::vector<double>& coeffs) {
    require_kind(space, SpaceKind::scalar_p1, "assemble_laplace");
    const Mesh2D& mesh = space.mesh();
    if (coeffs.size() != mesh.triangles.size()) {
        throw DimensionError("assemble_laplace: one coefficient per triangle required");
    }
    Mat k = Mat::Zero(space.dim(), space.dim());
    for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
        const auto local = local_stiffness(mesh.coords(e), coeffs[e]);
        const auto& tri = mesh.triangles[e];
        for (int i = 0; i < 3; ++i) {
            const int gi = space.dof(tri[i]);
            if (gi < 0) continue;
            for (int j = 0; j < 3; ++j) {
                const int gj = space.dof(tri[j]);
                if (gj >= 0) k(gi, gj) += local(i, j);
            }
        }
    }
    return k;
}

Mat assemble_laplace(const FeSpace& space, double coeff) {
    require_kind(space, SpaceKind::scalar_p1, "assemble_laplace");
    if (!(coeff > 0.0)) throw ConfigError("assemble_laplace: coefficient must be > 0");
    return assemble_laplace_elementwise(space, std::vector<double>(space.mesh().triangles.size(), coeff));
}

Mat assemble_elasticity(const FeSpace& vspace, double mu, double lambda) {
    require_kind(vspace, SpaceKind::vector_p1, "assemble_elasticity");
    if (!(mu > 0.0) || !(lambda >= 0.0)) {
        throw ConfigError("assemble_elasticity: need mu > 0 and lambda >= 0");
    }
    const Mesh2D& mesh = vspace.mesh();
    Mat k = Mat::Zero(vspace.dim(), vspace.dim());
    for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
        const auto local = local_elasticity(mesh.coords(e), mu, lambda);
        const auto& tri = mesh.triangles[e];
        for (int a = 0; a < 6; ++a) {
            const int ga = vspace.dof(tri[a % 3], a / 3);
            if (ga < 0) continue;
            for (int b = 0; b < 6; ++b) {
                const int gb = vspace.dof(tri[b % 3], b / 3);
                if (gb >= 0) k(ga, gb) += local(a, b);
            }
        }
    }
    return k;
}

Mat assemble_divergence_coupling(const FeSpace& vspace, const FeSpace& qspace, double alpha) {
    require_kind(vspace, SpaceKind::vector_p1, "assemble_divergence_coupling");
    require_kind(qspace, SpaceKind::scalar_p1, "assemble_divergence_coupling");
    if (vspace.mesh_ptr() != qspace.mesh_ptr()) {
        throw DimensionError("assemble_divergence_coupling: spaces live on different meshes");
    }
    const Mesh2D& mesh = vspace.mesh();
    Mat d = Mat::Zero(qspace.dim(), vspace.dim());
    for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
        const auto local = local_divergence(mesh.coords(e), alpha);
        const auto& tri = mesh.triangles[e];
        for (int i = 0; i < 3; ++i) {
            const int gi = qspace.dof(tri[i]);
            if (gi < 0) continue;
            for (int b = 0; b < 6; ++b) {
                const int gb = vspace.dof(tri[b % 3], b / 3);
                if (gb >= 0) d(gi, gb) += local(i, b);
            }
        }
    }
    return d;
}

Vec assemble_load(const FeSpace& space, const std::function<double(double, double)>& density) {
    require_kind(space, SpaceKind::scalar_p1, "assemble_load");
    const Mesh2D& mesh = space.mesh();
    Vec f = Vec::Zero(space.dim());
    for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
        const auto t = mesh.coords(e);
        const double w = checked_area(t) / 3.0;
        const auto& tri = mesh.triangles[e];
        for (const auto& bary : kMidpointBary) {
            const Point q = quad_point(t, bary);
            const double value = density(q[0], q[1]);
            for (int i = 0; i < 3; ++i) {
                const int gi = space.dof(tri[i]);
                if (gi >= 0) f(gi) += w * value * bary[i];
            }
        }
    }
    return f;
}

Vec assemble_load(const FeSpace& vspace, const std::function<Point(double, double)>& density) {
    require_kind(vspace, SpaceKind::vector_p1, "assemble_load");
    const Mesh2D& mesh = vspace.mesh();
    Vec f = Vec::Zero(vspace.dim());
    for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
        const auto t = mesh.coords(e);
        const double w = checked_area(t) / 3.0;
        const auto& tri = mesh.triangles[e];
        for (const auto& bary : kMidpointBary) {
            const Point q = quad_point(t, bary);
            const Point value = density(q[0], q[1]);
            for (int c = 0; c < 2; ++c) {
                for (int i = 0; i < 3; ++i) {
                    const int gi = vspace.dof(tri[i], c);
                    if (gi >= 0) f(gi) += w * value[c] * bary[i];
                }
            }
        }
    }
    return f;
}

std::vector<double> elementwise_divergence(const FeSpace& vspace, const Vec& u) {
    require_kind(vspace, SpaceKind::vector_p1, "elementwise_divergence");
    if (u.size() != vspace.dim()) throw DimensionError("elementwise_divergence: length mismatch");
    const Mesh2D& mesh = vspace.mesh();
    std::vector<double> div(mesh.triangles.size(), 0.0);
    for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
        const auto g = p1_gradients(mesh.coords(e));
        const auto& tri = mesh.triangles[e];
        double sum = 0.0;
        for (int c = 0; c < 2; ++c) {
            for (int k = 0; k < 3; ++k) {
                const int gk = vspace.dof(tri[k], c);
                if (gk >= 0) sum += u(gk) * g(k, c);
            }
        }
        div[e] = sum;
    }
    return div;
}

Mat assemble_nonlinear_permeability(const FeSpace& qspace, const FeSpace& vspace, const Vec& u,
                                    const KappaLaw& law, double nu) {
    if (!(nu > 0.0)) throw ConfigError("nonlinear permeability: viscosity must be > 0");
    if (!law.kappa) throw ConfigError("nonlinear permeability: missing kappa law");
    if (!(law.lower > 0.0) || law.upper < law.lower) {
        throw ConfigError("nonlinear permeability: need 0 < lower <= upper");
    }
    if (qspace.mesh_ptr() != vspace.mesh_ptr()) {
        throw DimensionError("nonlinear permeability: spaces live on different meshes");
    }
    const auto div = elementwise_divergence(vspace, u);
    std::vector<double> coeffs(div.size());
    for (std::size_t e = 0; e < div.size(); ++e) {
        const double k = law.kappa(div[e]);
        if (!(k > 0.0) || k < law.lower || k > law.upper) {
            throw BoundViolationError("nonlinear permeability: kappa(" + std::to_string(div[e]) +
                                      ") = " + std::to_string(k) + " outside its declared bounds");
        }
        coeffs[e] = k / nu;
    }
    return assemble_laplace_elementwise(qspace, coeffs);
}

}  // namespace poroph::fem
