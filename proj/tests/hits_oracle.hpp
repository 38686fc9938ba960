#pragma once

#include <cmath>
#include <vector>

#include "linkmap/graph.hpp"

namespace linkmap::testing {

using Matrix = std::vector<std::vector<double>>;

struct DenseHits {
    std::vector<double> hub, authority;  // indexed like g.nodes()
};

inline Matrix adjacency(const HyperlinkGraph& g) {
    auto nodes = g.nodes();
    std::vector<DomainKey> order(nodes.begin(), nodes.end());
    Matrix a(order.size(), std::vector<double>(order.size(), 0.0));
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = 0; j < order.size(); ++j)
            if (g.has_edge(order[i], order[j])) a[i][j] = 1.0;
    return a;
}

inline Matrix product(const Matrix& x, const Matrix& y) {
    Matrix out(x.size(), std::vector<double>(y[0].size(), 0.0));
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t k = 0; k < y.size(); ++k)
            for (std::size_t j = 0; j < y[0].size(); ++j) out[i][j] += x[i][k] * y[k][j];
    return out;
}

inline Matrix transpose(const Matrix& x) {
    Matrix out(x[0].size(), std::vector<double>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x[0].size(); ++j) out[j][i] = x[i][j];
    return out;
}

inline std::vector<double> mat_vec(const Matrix& m, const std::vector<double>& v) {
    std::vector<double> out(m.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
    return out;
}

inline void unit_l2(std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    s = std::sqrt(s);
    if (s > 0)
        for (double& x : v) x /= s;
}

/// Power iteration on a dense symmetric matrix, run far past the library's
/// tolerance.
inline std::vector<double> principal_vector(const Matrix& m, std::vector<double> v) {
    unit_l2(v);
    for (int it = 0; it < 200000; ++it) {
        auto next = mat_vec(m, v);
        unit_l2(next);
        double d = 0;
        for (std::size_t i = 0; i < v.size(); ++i) d = std::max(d, std::fabs(next[i] - v[i]));
        v = std::move(next);
        if (d < 1e-15) break;
    }
    return v;
}

/// Hubs are the principal vector of AAᵀ from a uniform start; authorities of
/// AᵀA from Aᵀ·1, which is where one hub step from uniform lands.
inline DenseHits dense_hits(const HyperlinkGraph& g) {
    const Matrix a = adjacency(g);
    const Matrix at = transpose(a);
    const std::vector<double> ones(a.size(), 1.0);
    DenseHits out;
    out.hub = principal_vector(product(a, at), ones);
    out.authority = principal_vector(product(at, a), mat_vec(at, ones));
    return out;
}

} // namespace linkmap::testing
