#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "hardylab/error.hpp"
#include "hardylab/hardy.hpp"

namespace hardylab {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// Weighted graph Laplacian sum_c w_c sum_e coef_e (u_a - u_b)^2 as a matrix
// (lower triangle plus diagonal; SimplicialLDLT reads the lower part).
SpMat assemble(const DiscreteGeometry& g, const std::vector<double>& cell_weight) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(g.edge_a.size());
    std::vector<double> diag(g.n, 0.0);
    for (std::size_t c = 0; c < g.cell_count(); ++c)
        for (std::uint32_t e = g.edge_ptr[c]; e < g.edge_ptr[c + 1]; ++e) {
            double w = cell_weight[c] * g.edge_coef[e];
            auto a = g.edge_a[e], b = g.edge_b[e];
            if (a >= 0) diag[a] += w;
            if (b >= 0) diag[b] += w;
            if (a >= 0 && b >= 0) trip.emplace_back(std::max(a, b), std::min(a, b), -w);
        }
    for (std::size_t i = 0; i < g.n; ++i) trip.emplace_back(i, i, diag[i]);
    SpMat K(g.n, g.n);
    K.setFromTriplets(trip.begin(), trip.end());
    return K;
}

Vec apply_sym(const SpMat& lower, const Vec& x) {
    return lower.selfadjointView<Eigen::Lower>() * x;
}

std::vector<double> to_std(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

void finish(RayleighResult& res) {
    res.hardy_constant = res.lambda > 0.0 ? 1.0 / res.lambda : std::numeric_limits<double>::infinity();
    res.status = res.converged ? "converged" : "inconclusive";
}

RayleighResult inverse_iteration(const HardyProblem& pr, const std::vector<double>& init, const SolverOptions& o) {
    const auto& g = *pr.geom;
    SpMat K = assemble(g, pr.wnum);
    Eigen::SimplicialLDLT<SpMat> ldlt;
    ldlt.compute(K);
    require(ldlt.info() == Eigen::Success, ErrorKind::InvalidArgument, "stiffness matrix is not positive definite");
    Eigen::Map<const Vec> m(pr.wden.data(), g.n);

    auto normalize = [&](Vec& u) { u /= std::sqrt(u.dot(m.cwiseProduct(u))); };
    auto rayleigh = [&](const Vec& u) { return u.dot(apply_sym(K, u)) / u.dot(m.cwiseProduct(u)); };
    auto residual = [&](const Vec& u, double lam) {
        Vec mu = lam * m.cwiseProduct(u);
        return (apply_sym(K, u) - mu).norm() / mu.norm();
    };

    RayleighResult res;
    Vec u = Eigen::Map<const Vec>(init.data(), g.n);
    normalize(u);
    res.lambda = rayleigh(u);
    res.trace.push_back(res.lambda);
    res.residual = residual(u, res.lambda);
    res.residual_trace.push_back(res.residual);
    for (int it = 1; it <= o.max_iter; ++it) {
        Vec y = ldlt.solve(m.cwiseProduct(u));
        normalize(y);
        double lam = rayleigh(y);
        if (!(lam < res.lambda)) {
            // No further decrease representable in floating point.
            res.converged = true;
            break;
        }
        double change = (res.lambda - lam) / res.lambda;
        u = std::move(y);
        res.lambda = lam;
        res.iterations = it;
        res.residual = residual(u, lam);
        res.trace.push_back(lam);
        res.residual_trace.push_back(res.residual);
        if (change < o.tol) {
            res.converged = true;
            break;
        }
    }
    res.minimizer = to_std(u);
    return res;
}

struct Objective {
    const HardyProblem& pr;
    double eps2;

    // Smoothed numerator, denominator and their gradients.
    double numerator(const Vec& u, std::vector<double>* gsq = nullptr) const {
        const auto& g = *pr.geom;
        double N = 0.0;
        if (gsq) gsq->resize(g.cell_count());
        for (std::size_t c = 0; c < g.cell_count(); ++c) {
            double s = 0.0;
            for (std::uint32_t e = g.edge_ptr[c]; e < g.edge_ptr[c + 1]; ++e) {
                double d = (g.edge_a[e] >= 0 ? u[g.edge_a[e]] : 0.0) - (g.edge_b[e] >= 0 ? u[g.edge_b[e]] : 0.0);
                s += g.edge_coef[e] * d * d;
            }
            if (gsq) (*gsq)[c] = s;
            N += pr.wnum[c] * std::pow(s + eps2, pr.p / 2);
        }
        return N;
    }

    double denominator(const Vec& u) const {
        double D = 0.0;
        for (Eigen::Index i = 0; i < u.size(); ++i) D += pr.wden[i] * std::pow(std::abs(u[i]), pr.p);
        return D;
    }

    Vec grad_numerator(const Vec& u, const std::vector<double>& gsq) const {
        const auto& g = *pr.geom;
        Vec out = Vec::Zero(u.size());
        for (std::size_t c = 0; c < g.cell_count(); ++c) {
            double A = pr.p * pr.wnum[c] * std::pow(gsq[c] + eps2, pr.p / 2 - 1);
            for (std::uint32_t e = g.edge_ptr[c]; e < g.edge_ptr[c + 1]; ++e) {
                auto a = g.edge_a[e], b = g.edge_b[e];
                double d = (a >= 0 ? u[a] : 0.0) - (b >= 0 ? u[b] : 0.0);
                double v = A * g.edge_coef[e] * d;
                if (a >= 0) out[a] += v;
                if (b >= 0) out[b] -= v;
            }
        }
        return out;
    }

    Vec grad_denominator(const Vec& u) const {
        Vec out(u.size());
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            double a = std::abs(u[i]);
            out[i] = a == 0.0 ? 0.0 : pr.p * pr.wden[i] * std::pow(a, pr.p - 1) * (u[i] > 0 ? 1.0 : -1.0);
        }
        return out;
    }
};

RayleighResult normalized_descent(const HardyProblem& pr, const std::vector<double>& init, const SolverOptions& o) {
    const auto& g = *pr.geom;
    Objective obj{pr, o.smoothing * o.smoothing};
    constexpr double kArmijo = 1e-4;
    constexpr int kMaxHalvings = 60;

    Vec u = Eigen::Map<const Vec>(init.data(), g.n);
    u /= std::pow(obj.denominator(u), 1.0 / pr.p);
    std::vector<double> gsq;
    double N = obj.numerator(u, &gsq);
    double D = obj.denominator(u);

    RayleighResult res;
    res.lambda = N / D;
    res.trace.push_back(res.lambda);

    Eigen::SimplicialLDLT<SpMat> precond;
    bool analyzed = false;
    double last_change = std::numeric_limits<double>::infinity();
    std::vector<double> w(g.cell_count());

    for (int it = 1; it <= o.max_iter; ++it) {
        Vec gN = obj.grad_numerator(u, gsq);
        Vec gD = obj.grad_denominator(u);
        Vec grad = gN / N - gD / D;
        res.residual = grad.norm() / (gD / D).norm();
        res.residual_trace.push_back(res.residual);

        if ((it - 1) % std::max(1, o.refresh) == 0) {
            double mean = 0.0, wsum = 0.0;
            for (std::size_t c = 0; c < g.cell_count(); ++c) {
                mean += pr.wnum[c] * gsq[c];
                wsum += pr.wnum[c];
            }
            double eps_p = std::max(1e-6 * mean / wsum, obj.eps2);
            for (std::size_t c = 0; c < g.cell_count(); ++c)
                w[c] = pr.wnum[c] * std::pow(gsq[c] + eps_p, pr.p / 2 - 1);
            SpMat P = assemble(g, w);
            if (!analyzed) {
                precond.analyzePattern(P);
                analyzed = true;
            }
            precond.factorize(P);
            require(precond.info() == Eigen::Success, ErrorKind::InvalidArgument,
                    "preconditioner is not positive definite");
        }
        Vec s = -precond.solve(grad);
        double slope = grad.dot(s);
        if (!(slope < 0.0)) {
            res.converged = last_change < 1e-6;
            break;
        }

        double f0 = std::log(N) - std::log(D);
        double alpha = N / pr.p;
        bool accepted = false;
        Vec trial;
        double Nt = 0.0, Dt = 0.0;
        std::vector<double> gsq_t;
        for (int k = 0; k < kMaxHalvings; ++k, alpha *= 0.5) {
            trial = u + alpha * s;
            Dt = obj.denominator(trial);
            if (!(Dt > 0.0)) continue;
            Nt = obj.numerator(trial, &gsq_t);
            double ft = std::log(Nt) - std::log(Dt);
            if (ft <= f0 + kArmijo * alpha * slope && Nt / Dt <= res.lambda) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            res.converged = last_change < 1e-6;
            break;
        }
        double scale = std::pow(Dt, 1.0 / pr.p);
        u = trial / scale;
        N = Nt / std::pow(scale, pr.p);
        D = 1.0;
        for (auto& v : gsq_t) v /= scale * scale;
        gsq.swap(gsq_t);
        double lam = N / D;
        last_change = (res.lambda - lam) / res.lambda;
        res.lambda = lam;
        res.iterations = it;
        res.trace.push_back(lam);
        if (last_change < o.tol) {
            res.converged = true;
            break;
        }
    }
    res.minimizer = to_std(u);
    return res;
}

}  // namespace

std::vector<double> default_init(const HardyProblem& problem) { return problem.geom->node_dist; }

RayleighResult minimize_quotient(const HardyProblem& problem, const std::vector<double>& init,
                                 const SolverOptions& opts) {
    require(problem.geom != nullptr, ErrorKind::InvalidArgument, "missing geometry");
    require(init.size() == problem.geom->n, ErrorKind::InvalidArgument, "initial vector has the wrong length");
    require(opts.tol > 0.0, ErrorKind::InvalidArgument, "tol must be positive");
    require(opts.max_iter >= 1, ErrorKind::InvalidArgument, "max_iter must be positive");
    require(std::any_of(init.begin(), init.end(), [](double v) { return v != 0.0; }), ErrorKind::ZeroTestFunction,
            "initial vector vanishes identically");
    RayleighResult res = problem.p == 2.0 && !opts.force_descent ? inverse_iteration(problem, init, opts)
                                                                 : normalized_descent(problem, init, opts);
    finish(res);
    return res;
}

}  // namespace hardylab
