#include "intervalforge/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "intervalforge/losses.hpp"

namespace intervalforge {

namespace {

constexpr double kTieEta = 1e-9; // tie-resolution offset, label units

struct Line {
    double slope;
    double intercept;
    double at(double x) const { return slope * x + intercept; }
};

std::vector<Line> candidate_lines(const Dataset& train)
{
    const Eigen::Index m = train.rows();
    std::vector<Line> base;
    for (Eigen::Index i = 0; i < m; ++i) {
        base.push_back({0.0, train.labels[i]});
        for (Eigen::Index j = i + 1; j < m; ++j) {
            double dx = train.features(j, 0) - train.features(i, 0);
            if (dx == 0.0) continue;
            double s = (train.labels[j] - train.labels[i]) / dx;
            base.push_back({s, train.labels[i] - s * train.features(i, 0)});
        }
    }
    std::vector<Line> out;
    out.reserve(base.size() * 3);
    for (const Line& l : base) {
        out.push_back(l);
        out.push_back({l.slope, l.intercept + kTieEta});
        out.push_back({l.slope, l.intercept - kTieEta});
    }
    return out;
}

} // namespace

OracleSolution brute_force_erm_1d(const Dataset& train, double budget)
{
    if (train.cols() != 1)
        throw std::invalid_argument("brute_force_erm_1d: requires d = 1");
    if (train.rows() > 14)
        throw std::invalid_argument("brute_force_erm_1d: m > 14 exceeds the complexity guard");
    if (budget < 0.0)
        throw std::invalid_argument("brute_force_erm_1d: budget must be nonnegative");

    const Eigen::Index m = train.rows();
    std::vector<Line> cands = candidate_lines(train);

    // precompute candidate values at the training points
    const auto nc = cands.size();
    std::vector<std::vector<double>> vals(nc, std::vector<double>(static_cast<std::size_t>(m)));
    for (std::size_t c = 0; c < nc; ++c)
        for (Eigen::Index i = 0; i < m; ++i)
            vals[c][static_cast<std::size_t>(i)] = cands[c].at(train.features(i, 0));

    const double budget_tol = 1e-9;
    OracleSolution best;
    best.error = std::numeric_limits<double>::infinity();
    for (std::size_t lo = 0; lo < nc; ++lo) {
        for (std::size_t up = 0; up < nc; ++up) {
            double wsum = 0.0;
            bool ok = true;
            for (Eigen::Index i = 0; i < m && ok; ++i) {
                double w = vals[up][static_cast<std::size_t>(i)] -
                           vals[lo][static_cast<std::size_t>(i)];
                if (w < 0.0) ok = false;
                wsum += w;
            }
            if (!ok) continue;
            double mean_w = wsum / static_cast<double>(m);
            if (mean_w > budget + budget_tol) continue;
            int miss = 0;
            for (Eigen::Index i = 0; i < m; ++i) {
                double y = train.labels[i];
                if (!(vals[lo][static_cast<std::size_t>(i)] <= y &&
                      y <= vals[up][static_cast<std::size_t>(i)]))
                    ++miss;
            }
            double err = static_cast<double>(miss) / static_cast<double>(m);
            if (err < best.error - 1e-15 ||
                (std::abs(err - best.error) <= 1e-15 && mean_w < best.mean_width)) {
                best.error = err;
                best.mean_width = mean_w;
                Eigen::VectorXd wl(1), wu(1);
                wl[0] = cands[lo].slope;
                wu[0] = cands[up].slope;
                best.model = BoundaryModel(wl, cands[lo].intercept, wu, cands[up].intercept);
            }
        }
    }
    if (!std::isfinite(best.error))
        throw std::runtime_error("brute_force_erm_1d: no feasible candidate pair");
    return best;
}

namespace {

struct BudgetObjectiveData {
    Eigen::VectorXd x; // d = 1 feature column
    Eigen::VectorXd y;
    double B = 0.0;
    double lambda_w = 0.0;
    double lambda_v = 0.0;
};

// Objective with slacks at their tight values; (v, a) scaled onto the
// budget when the mean width exceeds it (widths only ever help, so the
// optimum is never interior to a violated budget).
double eval_theta(const BudgetObjectiveData& D, double w, double b, double v, double a)
{
    if (!std::isfinite(w) || !std::isfinite(b) || !std::isfinite(v) || !std::isfinite(a))
        return std::numeric_limits<double>::infinity();
    const Eigen::Index m = D.x.size();
    double mean_width = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        double dw = v * D.x[i] + a;
        if (dw < 0.0) return std::numeric_limits<double>::infinity();
        mean_width += dw;
    }
    mean_width /= static_cast<double>(m);
    double scale = 1.0;
    if (mean_width > D.B)
        scale = (mean_width > 0.0) ? D.B / mean_width : 0.0;
    double vs = v * scale, as = a * scale;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        double yh = w * D.x[i] + b;
        double dw = vs * D.x[i] + as;
        loss += std::max(0.0, std::abs(D.y[i] - yh) - dw / 2.0);
    }
    loss /= static_cast<double>(m);
    return loss + D.lambda_w * w * w + D.lambda_v * vs * vs;
}

double nelder_mead_polish(const BudgetObjectiveData& D, Eigen::Vector4d start,
                          double scale)
{
    const int n = 4;
    std::vector<Eigen::Vector4d> simplex(n + 1, start);
    for (int i = 0; i < n; ++i) simplex[static_cast<std::size_t>(i) + 1][i] += scale;
    auto f = [&](const Eigen::Vector4d& p) {
        return eval_theta(D, p[0], p[1], p[2], p[3]);
    };
    std::vector<double> fv(n + 1);
    for (int i = 0; i <= n; ++i) fv[static_cast<std::size_t>(i)] = f(simplex[static_cast<std::size_t>(i)]);

    for (int it = 0; it < 800; ++it) {
        std::vector<int> order(n + 1);
        for (int i = 0; i <= n; ++i) order[static_cast<std::size_t>(i)] = i;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return fv[static_cast<std::size_t>(a)] < fv[static_cast<std::size_t>(b)]; });
        std::vector<Eigen::Vector4d> sx(n + 1);
        std::vector<double> sf(n + 1);
        for (int i = 0; i <= n; ++i) {
            sx[static_cast<std::size_t>(i)] = simplex[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
            sf[static_cast<std::size_t>(i)] = fv[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        }
        simplex = sx;
        for (int i = 0; i <= n; ++i) fv[static_cast<std::size_t>(i)] = sf[static_cast<std::size_t>(i)];

        if (std::abs(fv[static_cast<std::size_t>(n)] - fv[0]) < 1e-14) break;

        Eigen::Vector4d centroid = Eigen::Vector4d::Zero();
        for (int i = 0; i < n; ++i) centroid += simplex[static_cast<std::size_t>(i)];
        centroid /= static_cast<double>(n);

        Eigen::Vector4d refl = centroid + (centroid - simplex[static_cast<std::size_t>(n)]);
        double fr = f(refl);
        if (fr < fv[0]) {
            Eigen::Vector4d exp_ = centroid + 2.0 * (centroid - simplex[static_cast<std::size_t>(n)]);
            double fe = f(exp_);
            if (fe < fr) { simplex[static_cast<std::size_t>(n)] = exp_; fv[static_cast<std::size_t>(n)] = fe; }
            else { simplex[static_cast<std::size_t>(n)] = refl; fv[static_cast<std::size_t>(n)] = fr; }
        } else if (fr < fv[static_cast<std::size_t>(n - 1)]) {
            simplex[static_cast<std::size_t>(n)] = refl; fv[static_cast<std::size_t>(n)] = fr;
        } else {
            Eigen::Vector4d con = centroid + 0.5 * (simplex[static_cast<std::size_t>(n)] - centroid);
            double fc = f(con);
            if (fc < fv[static_cast<std::size_t>(n)]) {
                simplex[static_cast<std::size_t>(n)] = con; fv[static_cast<std::size_t>(n)] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    simplex[static_cast<std::size_t>(i)] =
                        simplex[0] + 0.5 * (simplex[static_cast<std::size_t>(i)] - simplex[0]);
                    fv[static_cast<std::size_t>(i)] = f(simplex[static_cast<std::size_t>(i)]);
                }
            }
        }
    }
    return *std::min_element(fv.begin(), fv.end());
}

} // namespace

double reference_solve(const AssembledProgram& assembled)
{
    const ProgramLayout& L = assembled.layout;
    const ConvexProgram& p = assembled.program;
    if (p.n > 12)
        throw std::invalid_argument("reference_solve: variable count exceeds the desk-scale guard (12)");
    if (L.d != 1 || L.has_hinge_slack)
        throw std::invalid_argument("reference_solve: supports the separate-constraint budget program with d = 1");
    // Budget program detection: linear cost lives on the slack block only.
    if (p.c.segment(0, L.xi_off()).cwiseAbs().maxCoeff() != 0.0)
        throw std::invalid_argument("reference_solve: expects the budgeted surrogate program");

    BudgetObjectiveData D;
    D.x.resize(L.m);
    D.y.resize(L.m);
    // rows are laid out as (r1, r2, xi>=0) per example; r1 carries -x_i on w
    // and -y_i on the rhs
    Eigen::SparseMatrix<double, Eigen::RowMajor> Grm(p.G);
    for (Eigen::Index i = 0; i < L.m; ++i) {
        Eigen::Index row = 3 * i;
        D.y[i] = -p.h[row];
        double xi = 0.0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Grm, row); it; ++it)
            if (it.col() == L.w_off()) xi = -it.value();
        D.x[i] = xi;
    }
    D.B = p.h[p.h.size() - 1];
    D.lambda_w = p.Q.coeff(L.w_off(), L.w_off()) / 2.0;
    D.lambda_v = p.Q.coeff(L.v_off(), L.v_off()) / 2.0;

    // multi-resolution grid refinement
    double yscale = std::max(1.0, D.y.cwiseAbs().maxCoeff());
    double radius = 10.0 * yscale;
    Eigen::Vector4d center = Eigen::Vector4d::Zero();
    double best = eval_theta(D, 0, 0, 0, 0);
    Eigen::Vector4d best_pt = center;
    const int pts = 9;
    for (int level = 0; level < 14; ++level) {
        for (int iw = 0; iw < pts; ++iw)
            for (int ib = 0; ib < pts; ++ib)
                for (int iv = 0; iv < pts; ++iv)
                    for (int ia = 0; ia < pts; ++ia) {
                        Eigen::Vector4d q = center;
                        q[0] += radius * (2.0 * iw / (pts - 1) - 1.0);
                        q[1] += radius * (2.0 * ib / (pts - 1) - 1.0);
                        q[2] += radius * (2.0 * iv / (pts - 1) - 1.0);
                        q[3] += radius * (2.0 * ia / (pts - 1) - 1.0);
                        double val = eval_theta(D, q[0], q[1], q[2], q[3]);
                        if (val < best) { best = val; best_pt = q; }
                    }
        center = best_pt;
        radius /= 2.5;
    }
    double polished = nelder_mead_polish(D, best_pt, radius * 2.5);
    best = std::min(best, polished);

    // The scaled-onto-the-budget parameterization is not convex, so a single
    // polish can stall in a shallow basin; restart from scattered points.
    std::mt19937_64 srng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int s = 0; s < 60; ++s) {
        Eigen::Vector4d q;
        for (int k = 0; k < 4; ++k) q[k] = 2.0 * yscale * u(srng);
        q[3] = std::abs(q[3]);
        best = std::min(best, nelder_mead_polish(D, q, yscale));
    }
    return best;
}

namespace {

bool subset_shattered(const FiniteBinaryClass& cls, const std::vector<int>& pts)
{
    const auto k = pts.size();
    if (k == 0) return true;
    std::unordered_set<unsigned> patterns;
    for (Eigen::Index h = 0; h < cls.num_hypotheses(); ++h) {
        unsigned mask = 0;
        for (std::size_t j = 0; j < k; ++j)
            if (cls.table(h, pts[j])) mask |= (1u << j);
        patterns.insert(mask);
        if (patterns.size() == (1u << k)) return true;
    }
    return false;
}

int vc_of(const FiniteBinaryClass& cls)
{
    const int n = static_cast<int>(cls.num_points());
    int best = 0;
    for (unsigned subset = 1; subset < (1u << n); ++subset) {
        int k = __builtin_popcount(subset);
        if (k <= best) continue;
        std::vector<int> pts;
        for (int i = 0; i < n; ++i)
            if (subset & (1u << i)) pts.push_back(i);
        if (subset_shattered(cls, pts)) best = k;
    }
    return best;
}

} // namespace

int vc_dimension(const FiniteBinaryClass& cls)
{
    if (cls.num_points() > 12)
        throw std::invalid_argument("vc_dimension: domain exceeds the guard (12 points)");
    if (cls.num_hypotheses() > 4096 || cls.num_hypotheses() < 1)
        throw std::invalid_argument("vc_dimension: class size out of range (1..4096)");
    return vc_of(cls);
}

VcEqualityResult loss_class_vc_equality(const FiniteBinaryClass& cls)
{
    if (cls.num_points() > 6)
        throw std::invalid_argument("loss_class_vc_equality: domain exceeds the guard (6 points)");
    if (cls.num_hypotheses() > 4096 || cls.num_hypotheses() < 1)
        throw std::invalid_argument("loss_class_vc_equality: class size out of range");

    VcEqualityResult res;
    res.vc_h = vc_of(cls);

    // loss composition over (example, label) pairs: point (i, y) gets value
    // 1[y != h(x_i)]
    const Eigen::Index n = cls.num_points();
    FiniteBinaryClass loss_cls;
    loss_cls.table.resize(cls.num_hypotheses(), 2 * n);
    for (Eigen::Index h = 0; h < cls.num_hypotheses(); ++h)
        for (Eigen::Index i = 0; i < n; ++i) {
            loss_cls.table(h, 2 * i) = (0 != cls.table(h, i)) ? 1 : 0;     // y = 0
            loss_cls.table(h, 2 * i + 1) = (1 != cls.table(h, i)) ? 1 : 0; // y = 1
        }
    res.vc_loss = vc_of(loss_cls);
    res.equal = (res.vc_h == res.vc_loss);
    return res;
}

GrowthBoundResult growth_product_bound_check(const FiniteRealClass& base,
                                             const Eigen::VectorXd& sample_labels)
{
    const Eigen::Index m = sample_labels.size();
    if (m > 10)
        throw std::invalid_argument("growth_product_bound_check: sample exceeds the guard (10)");
    if (base.values.cols() != m)
        throw std::invalid_argument("growth_product_bound_check: tabulation width mismatch");
    const Eigen::Index nb = base.values.rows();

    // loss assignment vectors over ordered boundary pairs, via the
    // complement identity loss = 1 - 1[bl <= y] * 1[bu >= y]
    std::vector<unsigned> le_mask(static_cast<std::size_t>(nb)),
        ge_mask(static_cast<std::size_t>(nb));
    for (Eigen::Index b = 0; b < nb; ++b) {
        unsigned le = 0, ge = 0;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (base.values(b, i) <= sample_labels[i]) le |= (1u << i);
            if (base.values(b, i) >= sample_labels[i]) ge |= (1u << i);
        }
        le_mask[static_cast<std::size_t>(b)] = le;
        ge_mask[static_cast<std::size_t>(b)] = ge;
    }
    std::unordered_set<unsigned> loss_vectors;
    const unsigned full = (m == 32) ? ~0u : ((1u << m) - 1u);
    for (unsigned le : le_mask)
        for (unsigned ge : ge_mask)
            loss_vectors.insert(full & ~(le & ge));

    // threshold-class assignments with theta at the sample labels
    std::unordered_set<unsigned> h_le, h_ge;
    for (Eigen::Index b = 0; b < nb; ++b)
        for (Eigen::Index t = 0; t < m; ++t) {
            double theta = sample_labels[t];
            unsigned le = 0, ge = 0;
            for (Eigen::Index i = 0; i < m; ++i) {
                if (base.values(b, i) <= theta) le |= (1u << i);
                if (base.values(b, i) >= theta) ge |= (1u << i);
            }
            h_le.insert(le);
            h_ge.insert(ge);
        }

    GrowthBoundResult res;
    res.lhs = static_cast<long long>(loss_vectors.size());
    res.rhs = static_cast<long long>(h_le.size()) * static_cast<long long>(h_ge.size());
    res.holds = res.lhs <= res.rhs;
    return res;
}

} // namespace intervalforge
