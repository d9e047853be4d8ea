#include "bn6/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <fmt/format.h>

#include "bn6/errors.hpp"

namespace bn6 {

ChebMesh::ChebMesh(std::vector<double> breaks, int degree) : breaks_(std::move(breaks)), degree_(degree) {
    if (degree_ < 2) throw DomainError("ChebMesh: degree must be >= 2");
    if (breaks_.size() < 2 || breaks_.front() != 0.0) throw DomainError("ChebMesh: breaks must start at 0");
    for (std::size_t i = 1; i < breaks_.size(); ++i)
        if (!(breaks_[i] > breaks_[i - 1])) throw DomainError("ChebMesh: breaks must increase");
    const int n = degree_ + 1;
    ref_.resize(static_cast<std::size_t>(n));
    bary_.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        ref_[static_cast<std::size_t>(j)] = -std::cos(std::numbers::pi * j / degree_);
        bary_[static_cast<std::size_t>(j)] = (j % 2 == 0 ? 1.0 : -1.0) * ((j == 0 || j == degree_) ? 0.5 : 1.0);
    }
    ref_[static_cast<std::size_t>(degree_ / 2)] = (degree_ % 2 == 0) ? 0.0 : ref_[static_cast<std::size_t>(degree_ / 2)];
    diff_.assign(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double v = (bary_[static_cast<std::size_t>(j)] / bary_[static_cast<std::size_t>(i)]) /
                             (ref_[static_cast<std::size_t>(i)] - ref_[static_cast<std::size_t>(j)]);
            diff_[static_cast<std::size_t>(i * n + j)] = v;
            row += v;
        }
        diff_[static_cast<std::size_t>(i * n + i)] = -row;
    }
}

double ChebMesh::node(std::size_t e, int j) const noexcept {
    const double a = breaks_[e];
    const double b = breaks_[e + 1];
    if (j == 0) return a;
    if (j == degree_) return b;
    return 0.5 * (a + b) + 0.5 * (b - a) * ref_[static_cast<std::size_t>(j)];
}

std::vector<double> ChebMesh::all_nodes() const {
    std::vector<double> out;
    out.reserve(unknowns());
    for (std::size_t e = 0; e < elements(); ++e)
        for (int j = 0; j <= degree_; ++j) out.push_back(node(e, j));
    return out;
}

std::size_t ChebMesh::element_of(double r) const {
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), r);
    if (it == breaks_.begin()) return 0;
    return std::min(static_cast<std::size_t>(it - breaks_.begin()) - 1, elements() - 1);
}

ChebMesh graded_mesh(double radius, double core, int degree, double ratio, double max_len_frac) {
    if (!(radius > 0.0)) throw DomainError("graded_mesh: radius must be positive");
    if (!(ratio > 1.0)) throw DomainError("graded_mesh: ratio must exceed 1");
    const double max_len = max_len_frac * radius;
    core = std::clamp(core, 1e-300, max_len);
    std::vector<double> b{0.0, core};
    while (b.back() < radius) {
        const double step = std::min(b.back() * (ratio - 1.0), max_len);
        b.push_back(b.back() + step);
    }
    // fold a sliver last element into its neighbour
    if (b.size() > 3 && radius - b[b.size() - 2] < 0.3 * (b[b.size() - 2] - b[b.size() - 3])) b.erase(b.end() - 2);
    b.back() = radius;
    return ChebMesh(std::move(b), degree);
}

namespace {

// Applies the reference derivative matrix to element values, scaled to length h.
void element_derivative(const ChebMesh& m, std::span<const double> u, std::span<double> du, double h) {
    const int n = m.degree() + 1;
    const auto D = m.reference_diff();
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += D[static_cast<std::size_t>(i * n + j)] * u[static_cast<std::size_t>(j)];
        du[static_cast<std::size_t>(i)] = s * 2.0 / h;
    }
}

}  // namespace

PiecewiseCheb::PiecewiseCheb(ChebMesh mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (values_.size() != mesh_.unknowns()) throw DomainError("PiecewiseCheb: value count does not match mesh");
    const std::size_t n = static_cast<std::size_t>(mesh_.degree() + 1);
    d1_.resize(values_.size());
    d2_.resize(values_.size());
    for (std::size_t e = 0; e < mesh_.elements(); ++e) {
        const double h = mesh_.breaks()[e + 1] - mesh_.breaks()[e];
        std::span<const double> u(values_.data() + e * n, n);
        std::span<double> du(d1_.data() + e * n, n);
        std::span<double> d2u(d2_.data() + e * n, n);
        element_derivative(mesh_, u, du, h);
        element_derivative(mesh_, du, d2u, h);
    }
}

double PiecewiseCheb::eval(double r, int order) const {
    const double R = mesh_.radius();
    if (r < 0.0 || r > R) {
        if (r < 0.0 && r > -1e-12 * R) r = 0.0;
        else if (r > R && r < R * (1.0 + 1e-12)) r = R;
        else throw DomainError(fmt::format("PiecewiseCheb: r = {} outside [0, {}]", r, R));
    }
    if (order < 0 || order > 2) throw DomainError("PiecewiseCheb: order must be 0, 1 or 2");
    const auto& col = order == 0 ? values_ : (order == 1 ? d1_ : d2_);
    const std::size_t e = mesh_.element_of(r);
    const std::size_t n = static_cast<std::size_t>(mesh_.degree() + 1);
    const double a = mesh_.breaks()[e];
    const double b = mesh_.breaks()[e + 1];
    const double t = 2.0 * (r - a) / (b - a) - 1.0;
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double dx = t - mesh_.ref_[j];
        if (dx == 0.0) return col[e * n + j];
        const double w = mesh_.bary_[j] / dx;
        num += w * col[e * n + j];
        den += w;
    }
    return num / den;
}

double PiecewiseCheb::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

int PiecewiseCheb::sign_changes(double zero_tol) const noexcept {
    const double floor = zero_tol * max_abs();
    const std::size_t n = static_cast<std::size_t>(mesh_.degree() + 1);
    int changes = 0, last = 0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i + 1 == values_.size()) break;  // u(R) = 0
        if (i % n == 0 && i > 0) continue;   // shared element end
        const double v = values_[i];
        if (std::abs(v) <= floor) continue;
        const int s = v > 0 ? 1 : -1;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

RadialProfile PiecewiseCheb::to_profile(std::span<const double> nodes) const {
    return sample_profile(nodes, [&](double r, double& u, double& du, double& d2u) {
        u = eval(r, 0);
        du = eval(r, 1);
        d2u = eval(r, 2);
    });
}

std::vector<double> sample_on_mesh(const ChebMesh& mesh, const std::function<double(double)>& f) {
    std::vector<double> out;
    out.reserve(mesh.unknowns());
    for (std::size_t e = 0; e < mesh.elements(); ++e)
        for (int j = 0; j <= mesh.degree(); ++j) out.push_back(f(mesh.node(e, j)));
    return out;
}

namespace {

struct Assembly {
    Eigen::VectorXd residual;
    Eigen::SparseMatrix<double> jacobian;
};

// Rows: per element the interior collocation points, then u and u' continuity at
// each interface, then u'(0) = 0 and u(R) = 0. Collocation rows carry a factor h^2.
// With a border the multiplier sits after the nodal values and u(0) = 0 is the last row.
Assembly assemble(const ChebMesh& m, const RadialProblem& pb, const std::vector<double>& u) {
    const int p = m.degree();
    const std::size_t n = static_cast<std::size_t>(p + 1);
    const std::size_t E = m.elements();
    const std::size_t N = m.unknowns();
    const bool bordered = static_cast<bool>(pb.border);
    const std::size_t Nt = N + (bordered ? 1 : 0);
    const double mult = bordered ? u[N] : 0.0;
    const auto D = m.reference_diff();
    Eigen::VectorXd F(static_cast<Eigen::Index>(Nt));
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(E * n * n * 2 + 8 * E);

    // D2 = D * D on the reference element
    std::vector<double> D2(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double dik = D[i * n + k];
            for (std::size_t j = 0; j < n; ++j) D2[i * n + j] += dik * D[k * n + j];
        }

    std::size_t row = 0;
    for (std::size_t e = 0; e < E; ++e) {
        const double h = m.breaks()[e + 1] - m.breaks()[e];
        const double s1 = 2.0 / h;
        const std::size_t off = e * n;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double r = m.node(e, static_cast<int>(i));
            const double k_r = pb.first_order_coeff / r;
            double val = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double c = h * h * (D2[i * n + j] * s1 * s1 + k_r * D[i * n + j] * s1);
                val += c * u[off + j];
                trip.emplace_back(static_cast<int>(row), static_cast<int>(off + j), c);
            }
            double f = 0.0, df = 0.0;
            pb.reaction(r, u[off + i], f, df);
            val += h * h * f;
            trip.emplace_back(static_cast<int>(row), static_cast<int>(off + i), h * h * df);
            if (bordered) {
                const double z = h * h * pb.border(r);
                val += mult * z;
                trip.emplace_back(static_cast<int>(row), static_cast<int>(N), z);
            }
            F[static_cast<Eigen::Index>(row++)] = val;
        }
    }
    for (std::size_t e = 0; e + 1 < E; ++e) {
        const std::size_t a = e * n;
        const std::size_t b = (e + 1) * n;
        trip.emplace_back(static_cast<int>(row), static_cast<int>(a + n - 1), 1.0);
        trip.emplace_back(static_cast<int>(row), static_cast<int>(b), -1.0);
        F[static_cast<Eigen::Index>(row++)] = u[a + n - 1] - u[b];

        const double ha = m.breaks()[e + 1] - m.breaks()[e];
        const double hb = m.breaks()[e + 2] - m.breaks()[e + 1];
        const double w = 0.5 * (ha + hb);
        double val = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double ca = w * D[(n - 1) * n + j] * 2.0 / ha;
            const double cb = -w * D[j] * 2.0 / hb;
            val += ca * u[a + j] + cb * u[b + j];
            trip.emplace_back(static_cast<int>(row), static_cast<int>(a + j), ca);
            trip.emplace_back(static_cast<int>(row), static_cast<int>(b + j), cb);
        }
        F[static_cast<Eigen::Index>(row++)] = val;
    }
    {
        const double h0 = m.breaks()[1];
        double val = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double c = D[j] * 2.0;  // h0 * (2/h0)
            val += c * u[j];
            trip.emplace_back(static_cast<int>(row), static_cast<int>(j), c);
        }
        (void)h0;
        F[static_cast<Eigen::Index>(row++)] = val;
    }
    trip.emplace_back(static_cast<int>(row), static_cast<int>(N - 1), 1.0);
    F[static_cast<Eigen::Index>(row++)] = u[N - 1];
    if (bordered) {
        trip.emplace_back(static_cast<int>(row), 0, 1.0);
        F[static_cast<Eigen::Index>(row++)] = u[0];
    }

    Assembly out;
    out.residual = std::move(F);
    out.jacobian.resize(static_cast<Eigen::Index>(Nt), static_cast<Eigen::Index>(Nt));
    out.jacobian.setFromTriplets(trip.begin(), trip.end());
    return out;
}

// Per-element magnitude of the iterate, used to scale unknowns.
std::vector<double> element_scales(const ChebMesh& m, const std::vector<double>& u) {
    const std::size_t n = static_cast<std::size_t>(m.degree() + 1);
    const std::size_t N = m.unknowns();
    double global = 0.0;
    for (std::size_t i = 0; i < N; ++i) global = std::max(global, std::abs(u[i]));
    if (global == 0.0) global = 1.0;
    std::vector<double> s(u.size());
    for (std::size_t e = 0; e < m.elements(); ++e) {
        double mx = 0.0;
        for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, std::abs(u[e * n + j]));
        mx = std::max(mx, 1e-14 * global);
        for (std::size_t j = 0; j < n; ++j) s[e * n + j] = mx;
    }
    if (u.size() > N) s[N] = std::max(std::abs(u[N]), 1.0);  // multiplier
    return s;
}

}  // namespace

CollocationResult solve_collocation(const ChebMesh& mesh, const RadialProblem& problem, std::vector<double> u,
                                    const CollocationOptions& opt) {
    if (u.size() != mesh.unknowns()) throw DomainError("solve_collocation: initial guess size mismatch");
    if (!problem.reaction) throw DomainError("solve_collocation: reaction term missing");
    if (problem.border) u.push_back(0.0);
    CollocationResult res;
    const auto N = static_cast<Eigen::Index>(u.size());

    for (int it = 0; it < opt.max_iter; ++it) {
        const std::vector<double> scale = element_scales(mesh, u);
        Assembly A = assemble(mesh, problem, u);
        Eigen::SparseMatrix<double> J = A.jacobian;
        for (int k = 0; k < J.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator itr(J, k); itr; ++itr)
                itr.valueRef() *= scale[static_cast<std::size_t>(itr.col())];
        Eigen::VectorXd rs = Eigen::VectorXd::Zero(N);
        for (int k = 0; k < J.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator itr(J, k); itr; ++itr)
                rs[itr.row()] = std::max(rs[itr.row()], std::abs(itr.value()));
        for (Eigen::Index i = 0; i < N; ++i)
            if (rs[i] == 0.0) rs[i] = 1.0;
        const Eigen::VectorXd rinv = rs.cwiseInverse();
        J = rinv.asDiagonal() * J;
        const Eigen::VectorXd F = rinv.cwiseProduct(A.residual);
        const double fnorm = F.norm();
        res.residual_history.push_back(fnorm);
        if (!std::isfinite(fnorm)) break;
        if (fnorm <= opt.residual_tol) {
            res.converged = true;
            break;
        }

        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        J.makeCompressed();
        lu.analyzePattern(J);
        lu.factorize(J);
        if (lu.info() != Eigen::Success) break;
        const Eigen::VectorXd dz = lu.solve(-F);
        if (lu.info() != Eigen::Success || !dz.allFinite()) break;
        const double step = dz.cwiseAbs().maxCoeff();

        // backtracking on the equilibrated residual
        double t = 1.0;
        std::vector<double> trial(u.size());
        bool accepted = false;
        double trial_norm = fnorm;
        for (int ls = 0; ls < 12; ++ls) {
            for (std::size_t i = 0; i < u.size(); ++i)
                trial[i] = u[i] + t * scale[i] * dz[static_cast<Eigen::Index>(i)];
            const Assembly At = assemble(mesh, problem, trial);
            const double tn = rinv.cwiseProduct(At.residual).norm();
            if (std::isfinite(tn) && (tn <= (1.0 - 1e-4 * t) * fnorm || step * t < 1e3 * opt.step_tol)) {
                accepted = true;
                trial_norm = tn;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
        u.swap(trial);
        res.iterations = it + 1;
        if (step * t <= opt.step_tol || trial_norm <= opt.residual_tol) {
            res.converged = true;
            break;
        }
    }
    {
        const std::vector<double> scale = element_scales(mesh, u);
        Assembly A = assemble(mesh, problem, u);
        double worst = 0.0;
        const Eigen::SparseMatrix<double>& J = A.jacobian;
        Eigen::VectorXd rs = Eigen::VectorXd::Zero(N);
        for (int k = 0; k < J.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator itr(J, k); itr; ++itr)
                rs[itr.row()] =
                    std::max(rs[itr.row()], std::abs(itr.value()) * scale[static_cast<std::size_t>(itr.col())]);
        for (Eigen::Index i = 0; i < N; ++i)
            if (rs[i] > 0.0) worst = std::max(worst, std::abs(A.residual[i]) / rs[i]);
        res.final_residual = worst;
    }
    if (problem.border) {
        res.multiplier = u.back();
        u.pop_back();
    }
    res.values = std::move(u);
    return res;
}

}  // namespace bn6
