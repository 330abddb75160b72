#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "grid_cells.hpp"
#include "witness.hpp"
#include "hardylab/error.hpp"
#include "hardylab/hardy.hpp"

namespace hardylab {

GeometryPtr grid_geometry(const GridDomain& domain, const DistanceField& dist) {
    domain.validate();
    require(dist.d.size() == domain.node_count(), ErrorKind::InvalidArgument, "distance field does not match grid");
    const int n = domain.dim();
    const double vol = domain.cell_measure();
    const double coef = 1.0 / (static_cast<double>(1 << (n - 1)) * domain.h * domain.h);

    auto g = std::make_shared<DiscreteGeometry>();
    g->dim = n;
    g->h = domain.h;
    g->tag = domain.tag;
    std::vector<std::int64_t> unknown(domain.node_count(), -1);
    for (std::size_t i = 0; i < domain.node_count(); ++i) {
        if (!domain.is_interior(i)) continue;
        unknown[i] = static_cast<std::int64_t>(g->n++);
        g->unknown_node.push_back(i);
        g->node_measure.push_back(vol);
        g->node_dist.push_back(dist.d[i]);
    }
    g->edge_ptr.push_back(0);
    const int corners = 1 << n;
    detail::for_each_cell(domain, [&](const std::size_t* node) {
        bool any = false;
        double dsum = 0.0;
        for (int c = 0; c < corners; ++c) {
            any = any || unknown[node[c]] >= 0;
            dsum += dist.d[node[c]];
        }
        if (!any) return;
        for (int k = 0; k < n; ++k)
            for (int c = 0; c < corners; ++c) {
                if (c & (1 << k)) continue;
                std::int64_t a = unknown[node[c]], b = unknown[node[c | (1 << k)]];
                if (a < 0 && b < 0) continue;
                g->edge_a.push_back(a);
                g->edge_b.push_back(b);
                g->edge_coef.push_back(coef);
            }
        g->cell_measure.push_back(vol);
        g->cell_dist.push_back(dsum / corners);
        g->edge_ptr.push_back(static_cast<std::uint32_t>(g->edge_a.size()));
    });
    return g;
}

GeometryPtr line_geometry(const std::vector<double>& t, int radial_dim, std::string tag) {
    require(t.size() >= 3, ErrorKind::InvalidArgument, "line grid needs at least 3 nodes");
    require(radial_dim >= 1, ErrorKind::InvalidArgument, "radial dimension must be >= 1");
    require(t[0] >= 0.0, ErrorKind::InvalidArgument, "line grid must lie in [0, inf)");
    for (std::size_t i = 1; i < t.size(); ++i)
        require(t[i] > t[i - 1], ErrorKind::InvalidArgument, "line grid must be strictly increasing");
    auto rho = [&](double x) { return std::pow(x, radial_dim - 1); };

    auto g = std::make_shared<DiscreteGeometry>();
    g->dim = 1;
    g->tag = std::move(tag);
    const std::size_t N = t.size() - 1;
    for (std::size_t i = 1; i < N; ++i) {
        g->node_measure.push_back(0.5 * (t[i + 1] - t[i - 1]) * rho(t[i]));
        g->node_dist.push_back(t[i]);
        g->abscissa.push_back(t[i]);
    }
    g->n = N - 1;
    g->edge_ptr.push_back(0);
    for (std::size_t i = 0; i < N; ++i) {
        double len = t[i + 1] - t[i];
        double mid = 0.5 * (t[i] + t[i + 1]);
        g->h = std::max(g->h, len);
        g->cell_measure.push_back(len * rho(mid));
        g->cell_dist.push_back(mid);
        g->edge_a.push_back(i == 0 ? -1 : static_cast<std::int64_t>(i - 1));
        g->edge_b.push_back(i + 1 == N ? -1 : static_cast<std::int64_t>(i));
        g->edge_coef.push_back(1.0 / (len * len));
        g->edge_ptr.push_back(static_cast<std::uint32_t>(g->edge_a.size()));
    }
    return g;
}

std::vector<double> log_grid(double eps, double L, std::size_t count) {
    require(eps > 0.0 && L > eps && count >= 3, ErrorKind::InvalidArgument, "bad log grid");
    std::vector<double> t(count);
    double a = std::log(eps), b = std::log(L);
    for (std::size_t i = 0; i < count; ++i)
        t[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    t.front() = eps;
    t.back() = L;
    return t;
}

HardyProblem make_problem(GeometryPtr geom, double p, double beta) {
    require(geom != nullptr, ErrorKind::InvalidArgument, "missing geometry");
    require(p >= 1.0 && std::isfinite(p), ErrorKind::InvalidArgument, "p must be >= 1");
    require(std::isfinite(beta), ErrorKind::InvalidArgument, "beta must be finite");
    require(geom->n > 0, ErrorKind::InvalidArgument, "problem has no unknowns");
    HardyProblem pr;
    pr.p = p;
    pr.beta = beta;
    pr.wden.resize(geom->n);
    for (std::size_t i = 0; i < geom->n; ++i) {
        require(geom->node_dist[i] > 0.0, ErrorKind::InvalidArgument, "interior node at zero distance");
        pr.wden[i] = geom->node_measure[i] * std::pow(geom->node_dist[i], beta - p);
    }
    pr.wnum.resize(geom->cell_count());
    for (std::size_t c = 0; c < geom->cell_count(); ++c)
        pr.wnum[c] = geom->cell_measure[c] * std::pow(geom->cell_dist[c], beta);
    pr.geom = std::move(geom);
    return pr;
}

QuotientValue quotient(const HardyProblem& pr, const std::vector<double>& u) {
    const auto& g = *pr.geom;
    require(u.size() == g.n, ErrorKind::InvalidArgument, "test function has the wrong length");
    QuotientValue q;
    const bool two = pr.p == 2.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        double a = std::abs(u[i]);
        q.denominator += pr.wden[i] * (two ? a * a : std::pow(a, pr.p));
    }
    require(q.denominator > 0.0, ErrorKind::ZeroTestFunction, "test function vanishes identically");
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        double s = 0.0;
        for (std::uint32_t e = g.edge_ptr[c]; e < g.edge_ptr[c + 1]; ++e) {
            double ua = g.edge_a[e] >= 0 ? u[g.edge_a[e]] : 0.0;
            double ub = g.edge_b[e] >= 0 ? u[g.edge_b[e]] : 0.0;
            s += g.edge_coef[e] * (ua - ub) * (ua - ub);
        }
        q.numerator += pr.wnum[c] * (two ? s : std::pow(s, pr.p / 2));
    }
    q.value = q.numerator / q.denominator;
    return q;
}

QuotientValue grid_quotient(const GridDomain& domain, const DistanceField& dist, double p, double beta,
                            const std::vector<double>& u_full) {
    domain.validate();
    require(u_full.size() == domain.node_count() && dist.d.size() == domain.node_count(),
            ErrorKind::InvalidArgument, "nodal vector does not match grid");
    require(p >= 1.0, ErrorKind::InvalidArgument, "p must be >= 1");
    const int n = domain.dim();
    const double vol = domain.cell_measure();
    const double coef = 1.0 / (static_cast<double>(1 << (n - 1)) * domain.h * domain.h);
    const int corners = 1 << n;
    QuotientValue q;
    for (std::size_t i = 0; i < domain.node_count(); ++i)
        if (domain.is_interior(i) && u_full[i] != 0.0)
            q.denominator += vol * std::pow(dist.d[i], beta - p) * std::pow(std::abs(u_full[i]), p);
    require(q.denominator > 0.0, ErrorKind::ZeroTestFunction, "test function vanishes identically");
    detail::for_each_cell(domain, [&](const std::size_t* node) {
        double val[256];
        bool any = false;
        double dsum = 0.0;
        for (int c = 0; c < corners; ++c) {
            bool in = domain.is_interior(node[c]);
            any = any || in;
            val[c] = in ? u_full[node[c]] : 0.0;
            dsum += dist.d[node[c]];
        }
        if (!any) return;
        double s = 0.0;
        for (int k = 0; k < n; ++k)
            for (int c = 0; c < corners; ++c) {
                if (c & (1 << k)) continue;
                double diff = val[c] - val[c | (1 << k)];
                s += coef * diff * diff;
            }
        if (s == 0.0) return;
        q.numerator += vol * std::pow(dsum / corners, beta) * std::pow(s, p / 2);
    });
    q.value = q.numerator / q.denominator;
    return q;
}

const char* to_string(WitnessFamily f) {
    switch (f) {
        case WitnessFamily::Shell: return "shell";
        case WitnessFamily::Plateau: return "plateau";
        case WitnessFamily::Log: return "log";
    }
    return "unknown";
}

namespace detail {

std::vector<double> distance_to_rest(const GridDomain& domain, const Point& c) {
    auto start = domain.nearest_node(c.data());
    require(start.has_value(), ErrorKind::InvalidArgument, "witness center outside the grid");
    std::vector<std::uint8_t> mask = domain.complement;
    const int n = domain.dim();
    if (mask[*start]) {
        std::deque<std::size_t> queue{*start};
        mask[*start] = 0;
        std::int64_t idx[8], nb[8];
        int span = 1;
        for (int k = 0; k < n; ++k) span *= 3;
        while (!queue.empty()) {
            std::size_t i = queue.front();
            queue.pop_front();
            domain.unravel(i, idx);
            for (int code = 0; code < span; ++code) {
                int cc = code;
                bool ok = true;
                for (int k = 0; k < n; ++k) {
                    nb[k] = idx[k] + (cc % 3) - 1;
                    cc /= 3;
                    ok = ok && nb[k] >= 0 && nb[k] < domain.shape[k];
                }
                if (!ok) continue;
                std::size_t j = domain.ravel(nb);
                if (mask[j]) {
                    mask[j] = 0;
                    queue.push_back(j);
                }
            }
        }
    }
    bool any = std::any_of(mask.begin(), mask.end(), [](std::uint8_t v) { return v != 0; });
    if (!any) return std::vector<double>(domain.node_count(), std::numeric_limits<double>::infinity());
    GridDomain rest = domain;
    rest.complement = std::move(mask);
    rest.truncated.clear();
    return distance_transform(rest).d;
}

std::vector<double> witness_nodal(const GridDomain& domain, const WitnessParams& w, const std::vector<double>* rest_in) {
    require(static_cast<int>(w.center.size()) == domain.dim(), ErrorKind::InvalidArgument,
            "witness center dimension mismatch");
    const std::size_t N = domain.node_count();
    const double h = domain.h;
    std::vector<double> u(N, 0.0);
    Point x(domain.dim());
    auto radius_at = [&](std::size_t i) {
        domain.coords(i, x.data());
        return distance(x.data(), w.center.data(), domain.dim());
    };

    switch (w.family) {
        case WitnessFamily::Shell: {
            double a = std::ldexp(1.0, -w.j - 1);
            require(a >= 2.0 * h, ErrorKind::SubResolutionWitness, "shell scale below two grid spacings");
            double delta = 2.0 * h;
            require(w.cutoff_width > delta, ErrorKind::InvalidArgument, "cutoff width must exceed 2h");
            std::vector<double> own;
            if (!rest_in) own = distance_to_rest(domain, w.center);
            const std::vector<double>& rest = rest_in ? *rest_in : own;
            double lw = std::log(w.cutoff_width / delta);
            for (std::size_t i = 0; i < N; ++i) {
                if (!domain.is_interior(i)) continue;
                double ramp = std::clamp((radius_at(i) - a) / a, 0.0, 1.0);
                double cut = std::isinf(rest[i]) ? 1.0
                                                 : std::clamp(std::log(std::max(rest[i], delta) / delta) / lw, 0.0, 1.0);
                u[i] = std::min(ramp, cut);
            }
            break;
        }
        case WitnessFamily::Plateau: {
            double r = w.radius;
            require(r >= 2.0 * h, ErrorKind::SubResolutionWitness, "plateau radius below two grid spacings");
            for (std::size_t i = 0; i < N; ++i)
                if (domain.is_interior(i)) u[i] = std::max(0.0, 2.0 * r - radius_at(i)) / r;
            break;
        }
        case WitnessFamily::Log: {
            double rin = std::ldexp(1.0, -w.j);
            double R = w.radius;
            require(rin >= 2.0 * h, ErrorKind::SubResolutionWitness, "log inner scale below two grid spacings");
            require(R > rin, ErrorKind::InvalidArgument, "log outer radius must exceed the inner scale");
            double l = std::log(R / rin);
            for (std::size_t i = 0; i < N; ++i) {
                if (!domain.is_interior(i)) continue;
                double rho = radius_at(i);
                if (rho <= rin) u[i] = 0.0;
                else if (rho <= R) u[i] = std::log(rho / rin) / l;
                else u[i] = std::max(0.0, (2.0 * R - rho) / R);
            }
            break;
        }
    }
    return u;
}

}  // namespace detail

std::vector<double> witness_function(const GridDomain& domain, const DistanceField& dist, const WitnessParams& w) {
    domain.validate();
    require(dist.d.size() == domain.node_count(), ErrorKind::InvalidArgument, "distance field does not match grid");
    return detail::witness_nodal(domain, w, nullptr);
}

double witness_quotient(const GridDomain& domain, const DistanceField& dist, const WitnessParams& w, double p,
                        double beta) {
    return grid_quotient(domain, dist, p, beta, witness_function(domain, dist, w)).value;
}

}  // namespace hardylab
