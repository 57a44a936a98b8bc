#include "klx/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "klx/normal.hpp"

namespace klx {

void gauss_legendre(int m, Vector& nodes, Vector& weights) {
    if (m < 1) throw ConfigError("gauss_legendre: order must be >= 1");
    nodes.resize(m);
    weights.resize(m);
    const int half = (m + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev initial guess, Newton on P_m.
        double x = std::cos(pi * (i + 0.75) / (m + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < m; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = m * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
}

namespace {

void append_panel(double a, double b, const Vector& gx, const Vector& gw,
                  std::vector<double>& nodes, std::vector<double>& weights) {
    const double mid = 0.5 * (a + b), hal = 0.5 * (b - a);
    for (Index i = 0; i < gx.size(); ++i) {
        nodes.push_back(mid + hal * gx[i]);
        weights.push_back(hal * gw[i]);
    }
}

}  // namespace

Grid composite_gauss_legendre(int n, double a, double b) {
    if (n < 1) throw ConfigError("composite_gauss_legendre: node count must be >= 1");
    if (!(b > a)) throw ConfigError("composite_gauss_legendre: empty interval");
    int order = n <= 32 ? n : 8;
    int panels = (n + order - 1) / order;
    Vector gx, gw;
    gauss_legendre(order, gx, gw);
    std::vector<double> nodes, weights;
    nodes.reserve(panels * order);
    weights.reserve(panels * order);
    for (int p = 0; p < panels; ++p) {
        double pa = a + (b - a) * p / panels;
        double pb = a + (b - a) * (p + 1) / panels;
        append_panel(pa, pb, gx, gw, nodes, weights);
    }
    Grid g;
    g.nodes = Eigen::Map<Vector>(nodes.data(), static_cast<Index>(nodes.size()));
    g.weights = Eigen::Map<Vector>(weights.data(), static_cast<Index>(weights.size()));
    return g;
}

Grid split_rule(double a, double b, std::vector<double> breakpoints,
                int min_panels, int order) {
    breakpoints.push_back(a);
    breakpoints.push_back(b);
    std::sort(breakpoints.begin(), breakpoints.end());
    std::vector<double> edges;
    for (double x : breakpoints) {
        if (x < a || x > b) continue;
        if (edges.empty() || x - edges.back() > 1e-14) edges.push_back(x);
    }
    if (edges.size() < 2 || edges.front() > a + 1e-14) edges.insert(edges.begin(), a);
    if (edges.back() < b - 1e-14) edges.push_back(b);

    Vector gx, gw;
    gauss_legendre(order, gx, gw);
    std::vector<double> nodes, weights;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        double lo = edges[k], hi = edges[k + 1];
        int sub = std::max(1, static_cast<int>(std::ceil((hi - lo) / (b - a) * min_panels)));
        for (int p = 0; p < sub; ++p) {
            append_panel(lo + (hi - lo) * p / sub, lo + (hi - lo) * (p + 1) / sub,
                         gx, gw, nodes, weights);
        }
    }
    Grid g;
    g.nodes = Eigen::Map<Vector>(nodes.data(), static_cast<Index>(nodes.size()));
    g.weights = Eigen::Map<Vector>(weights.data(), static_cast<Index>(weights.size()));
    return g;
}

Grid normal_substitution_rule(int n, double x_max) {
    Grid base = composite_gauss_legendre(n, -x_max, x_max);
    Grid g;
    g.nodes.resize(base.size());
    g.weights.resize(base.size());
    for (Index i = 0; i < base.size(); ++i) {
        g.nodes[i] = normal_cdf(base.nodes[i]);
        g.weights[i] = base.weights[i] * normal_pdf(base.nodes[i]);
    }
    return g;
}

}  // namespace klx
