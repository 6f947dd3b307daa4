#include "intervalforge/qp.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace intervalforge {

double ConvexProgram::objective(const Eigen::VectorXd& x) const
{
    double quad = (Q.nonZeros() > 0) ? 0.5 * x.dot(Q * x) : 0.0;
    return c.dot(x) + quad;
}

double ConvexProgram::max_violation(const Eigen::VectorXd& x) const
{
    if (h.size() == 0) return 0.0;
    return ((G * x - h).cwiseMax(0.0)).maxCoeff();
}

std::string ConvexProgram::dump() const
{
    std::ostringstream os;
    char buf[64];
    auto fmt = [&](double v) { std::snprintf(buf, sizeof buf, "%.17g", v); return std::string(buf); };
    os << "minimize c'x + 0.5 x'Qx  subject to  Gx <= h\n";
    os << "n " << n << "  constraints " << h.size() << "\n";
    os << "c";
    for (Eigen::Index i = 0; i < c.size(); ++i) os << ' ' << fmt(c[i]);
    os << "\nQ(triplets)";
    for (int k = 0; k < Q.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(Q, k); it; ++it)
            os << ' ' << it.row() << ':' << it.col() << ':' << fmt(it.value());
    os << "\n";
    for (int i = 0; i < G.outerSize(); ++i) {
        os << "row " << i << " :";
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
                 Eigen::SparseMatrix<double, Eigen::RowMajor>(G), i);
             it; ++it)
            os << ' ' << it.col() << ':' << fmt(it.value());
        os << " <= " << fmt(h[i]) << "\n";
    }
    return os.str();
}

void RowBuilder::add_row(const std::vector<std::pair<Eigen::Index, double>>& coeffs, double rhs)
{
    const auto r = static_cast<Eigen::Index>(rhs_.size());
    for (const auto& [j, v] : coeffs) {
        if (j < 0 || j >= n_)
            throw std::out_of_range("RowBuilder: column index out of range");
        if (v != 0.0)
            trips_.emplace_back(static_cast<int>(r), static_cast<int>(j), v);
    }
    rhs_.push_back(rhs);
}

Eigen::SparseMatrix<double> RowBuilder::matrix() const
{
    Eigen::SparseMatrix<double> G(static_cast<Eigen::Index>(rhs_.size()), n_);
    G.setFromTriplets(trips_.begin(), trips_.end());
    G.makeCompressed();
    return G;
}

Eigen::VectorXd RowBuilder::rhs() const
{
    return Eigen::Map<const Eigen::VectorXd>(rhs_.data(), static_cast<Eigen::Index>(rhs_.size()));
}

namespace {

// Static regularization added to the condensed matrix; keeps the
// factorization positive definite when Q has zero diagonal blocks.
constexpr double kStaticReg = 1e-11;

struct DenseRowSet {
    std::vector<Eigen::Index> rows;   // indices into G of dense rows
    Eigen::MatrixXd U;                // n x k, the dense rows as columns
};

// Refit the multipliers of the nearly-active rows by least squares against
// the stationarity condition.  Near a degenerate face the interior-point
// duals oscillate even though the primal iterate is optimal; a clean
// multiplier assignment on the active rows gives the missing certificate.
Eigen::VectorXd refine_duals(const ConvexProgram& p, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& s, const Eigen::VectorXd& z,
                             double s_active)
{
    const Eigen::Index M = p.num_constraints();
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < M; ++i)
        if (s[i] <= s_active) active.push_back(i);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(M);
    if (active.empty()) return out;

    Eigen::VectorXd b = -p.c;
    if (p.Q.nonZeros() > 0) b -= p.Q * x;

    // Columns of At are the active constraint gradients.
    Eigen::SparseMatrix<double, Eigen::RowMajor> Grm(p.G);
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t j = 0; j < active.size(); ++j)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Grm, active[j]); it; ++it)
            trips.emplace_back(static_cast<int>(it.col()), static_cast<int>(j), it.value());
    Eigen::SparseMatrix<double> At(p.n, static_cast<Eigen::Index>(active.size()));
    At.setFromTriplets(trips.begin(), trips.end());
    At.makeCompressed();

    Eigen::LeastSquaresConjugateGradient<Eigen::SparseMatrix<double>> lscg(At);
    lscg.setTolerance(1e-14);
    lscg.setMaxIterations(4 * (At.rows() + At.cols()));
    Eigen::VectorXd z0(active.size());
    for (std::size_t j = 0; j < active.size(); ++j) z0[static_cast<Eigen::Index>(j)] = z[active[j]];
    Eigen::VectorXd za = lscg.solveWithGuess(b, z0);
    za = za.cwiseMax(0.0); // multipliers are sign-constrained
    for (std::size_t j = 0; j < active.size(); ++j) out[active[j]] = za[static_cast<Eigen::Index>(j)];
    return out;
}

} // namespace

QpResult solve_qp(const ConvexProgram& p, double tol_opt, double tol_feas, int max_iters)
{
    using SpMat = Eigen::SparseMatrix<double>;
    const Eigen::Index n = p.n;
    const Eigen::Index M = p.num_constraints();
    if (p.c.size() != n || p.G.cols() != n)
        throw std::invalid_argument("solve_qp: inconsistent program dimensions");
    if (M == 0)
        throw std::invalid_argument("solve_qp: program has no constraints");

    // Split out dense rows (budget / aggregate-slack rows) for the Woodbury
    // correction.
    Eigen::SparseMatrix<double, Eigen::RowMajor> Grm(p.G);
    std::vector<char> is_dense(static_cast<std::size_t>(M), 0);
    DenseRowSet dense;
    for (Eigen::Index i = 0; i < M; ++i) {
        Eigen::Index nnz = Grm.outerIndexPtr()[i + 1] - Grm.outerIndexPtr()[i];
        if (nnz > n / 2 && n > 16) {
            is_dense[static_cast<std::size_t>(i)] = 1;
            dense.rows.push_back(i);
        }
    }
    const Eigen::Index k = static_cast<Eigen::Index>(dense.rows.size());
    if (k > 0) {
        dense.U.setZero(n, k);
        for (Eigen::Index j = 0; j < k; ++j)
            dense.U.col(j) = Grm.row(dense.rows[static_cast<std::size_t>(j)]).transpose();
    }
    std::vector<Eigen::Triplet<double>> strips;
    for (Eigen::Index i = 0; i < M; ++i) {
        if (is_dense[static_cast<std::size_t>(i)]) continue;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Grm, i); it; ++it)
            strips.emplace_back(static_cast<int>(i), static_cast<int>(it.col()), it.value());
    }
    SpMat Gs(M, n); // sparse part; dense rows left empty (weights zeroed below)
    Gs.setFromTriplets(strips.begin(), strips.end());
    Gs.makeCompressed();

    // Iterates.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd s = Eigen::VectorXd::Ones(M);
    Eigen::VectorXd z = Eigen::VectorXd::Ones(M);

    SpMat I(n, n);
    I.setIdentity();

    Eigen::SimplicialLDLT<SpMat> ldlt;
    bool analyzed = false;

    const double h_scale = 1.0 + p.h.cwiseAbs().maxCoeff();
    const double c_scale = 1.0 + (p.c.size() ? p.c.cwiseAbs().maxCoeff() : 0.0);

    SolveStats stats;
    Eigen::VectorXd best_x = x;
    double best_merit = std::numeric_limits<double>::infinity();

    auto record_best = [&](const Eigen::VectorXd& xc, double rp_inf, double gap_rel) {
        double merit = rp_inf / h_scale + gap_rel;
        if (merit < best_merit) {
            best_merit = merit;
            best_x = xc;
        }
    };

    int iter = 0;
    for (; iter < max_iters; ++iter) {
        Eigen::VectorXd Gx = p.G * x;
        Eigen::VectorXd r_d = p.c + p.G.transpose() * z;
        if (p.Q.nonZeros() > 0) r_d += p.Q * x;
        Eigen::VectorXd r_p = Gx + s - p.h;
        double mu = s.dot(z) / static_cast<double>(M);
        double obj = p.objective(x);
        double gap_rel = s.dot(z) / std::max(1.0, std::abs(obj));
        double rp_inf = r_p.cwiseAbs().maxCoeff();
        double rd_inf = r_d.cwiseAbs().maxCoeff();
        record_best(x, rp_inf, gap_rel);

        const double rd_tol = std::max(tol_feas, tol_opt) * c_scale;
        bool primal_ok = rp_inf <= tol_feas * h_scale;
        bool gap_ok = gap_rel <= tol_opt;
        bool dual_ok = rd_inf <= rd_tol;
        if (primal_ok && !(gap_ok && dual_ok) && gap_rel <= std::sqrt(tol_opt)) {
            // The iterate is primal-optimal but the duals wander on a
            // degenerate face; a cleaned multiplier set whose own
            // stationarity and complementarity pass is a full certificate.
            for (double thresh : {1e-11, 1e-9, 1e-7, 1e-5}) {
                Eigen::VectorXd zc = refine_duals(p, x, s, z, thresh * h_scale);
                Eigen::VectorXd rdc = p.c + p.G.transpose() * zc;
                if (p.Q.nonZeros() > 0) rdc += p.Q * x;
                double gap_c = std::abs(s.dot(zc)) / std::max(1.0, std::abs(obj));
                if (rdc.cwiseAbs().maxCoeff() <= rd_tol && gap_c <= tol_opt) {
                    z = zc;
                    gap_ok = dual_ok = true;
                    break;
                }
            }
        }
        if (primal_ok && gap_ok && dual_ok) {
            stats.converged = true;
            break;
        }

        // Condensed matrix K = Q + G' diag(z/s) G (+ static reg), dense rows
        // excluded from the sparse part.
        Eigen::VectorXd w = z.cwiseQuotient(s);
        Eigen::VectorXd w_sparse = w;
        for (Eigen::Index r : dense.rows) w_sparse[r] = 0.0;
        SpMat K = Gs.transpose() * w_sparse.asDiagonal() * Gs;
        if (p.Q.nonZeros() > 0) K = K + p.Q;
        K = K + kStaticReg * I;
        if (!analyzed) {
            ldlt.analyzePattern(K);
            analyzed = true;
        }
        ldlt.factorize(K);
        if (ldlt.info() != Eigen::Success)
            break;

        // Woodbury data for the dense rows.
        Eigen::MatrixXd Zmat;   // K^{-1} U
        Eigen::PartialPivLU<Eigen::MatrixXd> cap_lu;
        if (k > 0) {
            Zmat = ldlt.solve(dense.U);
            Eigen::MatrixXd C = dense.U.transpose() * Zmat;
            for (Eigen::Index j = 0; j < k; ++j)
                C(j, j) += 1.0 / w[dense.rows[static_cast<std::size_t>(j)]];
            cap_lu.compute(C);
        }
        auto kapply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
            Eigen::VectorXd out = K * v;
            for (Eigen::Index j = 0; j < k; ++j) {
                const Eigen::Index r = dense.rows[static_cast<std::size_t>(j)];
                out += w[r] * dense.U.col(j) * dense.U.col(j).dot(v);
            }
            return out;
        };
        auto ksolve = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
            auto solve_once = [&](const Eigen::VectorXd& rr) -> Eigen::VectorXd {
                Eigen::VectorXd y0 = ldlt.solve(rr);
                if (k == 0) return y0;
                Eigen::VectorXd t = cap_lu.solve(dense.U.transpose() * y0);
                return y0 - Zmat * t;
            };
            // One round of iterative refinement: the Woodbury correction on
            // the dense rows loses digits once the barrier is nearly cold.
            Eigen::VectorXd y = solve_once(r);
            y += solve_once(r - kapply(y));
            return y;
        };

        auto newton = [&](const Eigen::VectorXd& r_c) {
            // r_c is the centering/complementarity rhs for  Z ds + S dz = r_c
            Eigen::VectorXd rhs = -r_d - p.G.transpose() *
                (r_c.cwiseQuotient(s) + w.cwiseProduct(r_p));
            Eigen::VectorXd dx = ksolve(rhs);
            Eigen::VectorXd ds = -r_p - p.G * dx;
            Eigen::VectorXd dz = (r_c - z.cwiseProduct(ds)).cwiseQuotient(s);
            return std::make_tuple(dx, ds, dz);
        };

        auto max_step = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
            double a = 1.0;
            for (Eigen::Index i = 0; i < v.size(); ++i)
                if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
            return a;
        };

        // Predictor.
        Eigen::VectorXd r_c_aff = -s.cwiseProduct(z);
        auto [dx_a, ds_a, dz_a] = newton(r_c_aff);
        double a_p = max_step(s, ds_a), a_d = max_step(z, dz_a);
        double a_aff = std::min(a_p, a_d);
        double mu_aff = (s + a_aff * ds_a).dot(z + a_aff * dz_a) / static_cast<double>(M);
        double sigma = std::pow(mu_aff / mu, 3.0);

        // Corrector.
        Eigen::VectorXd r_c = -s.cwiseProduct(z) - ds_a.cwiseProduct(dz_a) +
                              Eigen::VectorXd::Constant(M, sigma * mu);
        auto [dx, ds, dz] = newton(r_c);
        double alpha = 0.995 * std::min(max_step(s, ds), max_step(z, dz));
        alpha = std::min(alpha, 1.0);

        x += alpha * dx;
        s += alpha * ds;
        z += alpha * dz;
    }

    if (!stats.converged) x = best_x;
    stats.iterations = iter;
    stats.objective = p.objective(x);
    stats.primal_residual = p.max_violation(x);
    return QpResult{std::move(x), std::move(stats)};
}

} // namespace intervalforge
