#pragma once
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "wfem/geometry.hpp"

namespace wfem {

struct QPoint1 {
    double x, w;
};

// Gauss rule on [0,1] for the weight (1-x)^A * x^B, A,B > -1.
// Nodes/weights from the symmetric tridiagonal (Golub-Welsch) form of the
// monic Jacobi recurrence mapped to [0,1]; w_i = mu0 * v_{0i}^2.
inline std::vector<QPoint1> gauss_jacobi01(int n, double B, double A = 0.0) {
    if (n < 1) throw std::invalid_argument("gauss_jacobi01: n < 1");
    if (A <= -1.0 || B <= -1.0) throw std::invalid_argument("gauss_jacobi01: exponent <= -1");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        double ak; // recurrence alpha_k on [-1,1] for (1-t)^A (1+t)^B
        if (k == 0)
            ak = (B - A) / (A + B + 2.0);
        else
            ak = (B * B - A * A) /
                 ((2.0 * k + A + B) * (2.0 * k + A + B + 2.0));
        J(k, k) = (1.0 + ak) / 2.0; // map to [0,1]
    }
    for (int k = 1; k < n; ++k) {
        double bk;
        if (k == 1)
            bk = 4.0 * (A + 1.0) * (B + 1.0) /
                 ((A + B + 2.0) * (A + B + 2.0) * (A + B + 3.0));
        else
            bk = 4.0 * k * (k + A) * (k + B) * (k + A + B) /
                 ((2.0 * k + A + B) * (2.0 * k + A + B) * (2.0 * k + A + B + 1.0) *
                  (2.0 * k + A + B - 1.0));
        double off = std::sqrt(bk / 4.0); // beta on [0,1] = beta[-1,1]/4
        J(k, k - 1) = J(k - 1, k) = off;
    }
    double mu0 = std::exp(std::lgamma(A + 1.0) + std::lgamma(B + 1.0) -
                          std::lgamma(A + B + 2.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("gauss_jacobi01: eigensolve failed");
    std::vector<QPoint1> rule(n);
    for (int i = 0; i < n; ++i) {
        double v0 = es.eigenvectors()(0, i);
        rule[i] = {es.eigenvalues()(i), mu0 * v0 * v0};
    }
    return rule;
}

inline const std::vector<QPoint1>& gauss_legendre01(int n) {
    static std::map<int, std::vector<QPoint1>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, gauss_jacobi01(n, 0.0, 0.0)).first;
    return it->second;
}

// Composite rule on [0,1] for integrands t^e * (smooth), e > -1.
// Geometric cells [ratio^{k+1}, ratio^k]; plain Gauss per cell; the innermost
// cell [0, ratio^depth] uses the Jacobi rule with weight t^e, de-embedded so
// callers evaluate the full integrand (t^e included) at the nodes.
inline std::vector<QPoint1> graded01(double e, int depth = 12, int npts = 7,
                                     double ratio = 0.25) {
    std::vector<QPoint1> rule;
    rule.reserve(static_cast<size_t>(npts) * (depth + 1));
    const auto& gl = gauss_legendre01(npts);
    double hi = 1.0;
    for (int k = 0; k < depth; ++k) {
        double lo = hi * ratio;
        for (auto [x, w] : gl) rule.push_back({lo + (hi - lo) * x, (hi - lo) * w});
        hi = lo;
    }
    // innermost: int_0^c t^e g(t) dt = c^{e+1} sum w_i g(c u_i); divide the
    // weight by node^e so the caller's t^e factor cancels exactly
    double c = hi;
    for (auto [u, w] : gauss_jacobi01(npts, e)) {
        double node = c * u;
        rule.push_back({node, c * w * std::pow(u, -e)});
    }
    return rule;
}

inline std::vector<QPoint1> scale_rule(const std::vector<QPoint1>& rule01,
                                       double lo, double hi) {
    std::vector<QPoint1> out;
    out.reserve(rule01.size());
    for (auto [x, w] : rule01) out.push_back({lo + (hi - lo) * x, (hi - lo) * w});
    return out;
}

struct QPoint2 {
    Vec2 p;
    double w;
};

// Conical-product rule on the reference triangle (0,0),(1,0),(0,1):
// x=xi, y=eta(1-xi), Jacobian (1-xi); exact for total degree <= 2n-1,
// all weights positive, sum = 1/2.
inline std::vector<QPoint2> tri_rule_ref(int order) {
    static std::map<int, std::vector<QPoint2>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    int n = (order + 2) / 2;                // 2n-1 >= order
    auto xi = gauss_jacobi01(n, 0.0, 1.0);  // weight (1-xi)^1 on [0,1]
    auto eta = gauss_legendre01(n);
    std::vector<QPoint2> rule;
    rule.reserve(static_cast<size_t>(n) * n);
    for (auto [xx, wx] : xi)
        for (auto [ee, we] : eta)
            rule.push_back({{xx, ee * (1.0 - xx)}, wx * we});
    cache.emplace(order, rule);
    return cache[order];
}

// maps the reference rule to the physical triangle; weights sum to |T|
inline std::vector<QPoint2> tri_rule(Vec2 a, Vec2 b, Vec2 c, int order) {
    double j = 2.0 * std::abs(signed_area(a, b, c));
    std::vector<QPoint2> out;
    auto ref = tri_rule_ref(order);
    out.reserve(ref.size());
    for (auto [p, w] : ref)
        out.push_back({a + p.x * (b - a) + p.y * (c - a), j * w});
    return out;
}

} // namespace wfem
