#include "plperiod/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace plperiod {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Past |t| ~ 6.1 the transformed abscissa is within e^{-700} of the endpoint
// and both weight and node distance underflow.
constexpr double kTMax = 6.11;

struct TsNode {
    double dist;    // distance from the endpoint on the sign(t) side
    double weight;  // dx/dt, includes the half-width d
};

TsNode ts_node(double t, double d) {
    const double u = 0.5 * kPi * std::sinh(std::fabs(t));
    const double e = std::exp(-2.0 * u);          // (0, 1]
    const double dist = 2.0 * d * e / (1.0 + e);  // d (1 - tanh u), cancellation-free
    const double sech = 2.0 * std::sqrt(e) / (1.0 + e);
    const double w = d * 0.5 * kPi * std::cosh(t) * sech * sech;
    return {dist, w};
}

// Evaluates f at the node for parameter t (t < 0 maps near a, t > 0 near b)
// and returns weight * f, or 0 if the node contribution underflowed.
double ts_term(const TsIntegrand& f, double a, double b, double t, double d) {
    const TsNode n = ts_node(t, d);
    if (n.dist <= 0.0 || n.weight <= 0.0) return 0.0;
    const double far = 2.0 * d - n.dist;
    double fx;
    if (t >= 0.0)
        fx = f(b - n.dist, far, n.dist);
    else
        fx = f(a + n.dist, n.dist, far);
    if (!std::isfinite(fx)) return 0.0;
    return n.weight * fx;
}

} // namespace

QuadResult tanh_sinh(const TsIntegrand& f, double a, double b,
                     double rel_tol, double abs_tol, int max_level) {
    if (!(b > a)) throw std::invalid_argument("tanh_sinh: requires a < b");
    const double d = 0.5 * (b - a);
    const double c = 0.5 * (a + b);

    const double h0 = 0.5;
    // Level 0: all multiples of h0 in [-kTMax, kTMax].
    double sum = f(c, d, d);  // t = 0 node, weight (pi/2) d
    if (!std::isfinite(sum)) sum = 0.0;
    sum *= 0.5 * kPi * d;
    for (int k = 1; k * h0 <= kTMax; ++k) {
        sum += ts_term(f, a, b, k * h0, d);
        sum += ts_term(f, a, b, -k * h0, d);
    }

    double h = h0;
    double integral = h * sum;
    double prev = std::numeric_limits<double>::infinity();
    double diff = std::numeric_limits<double>::infinity();

    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        // New nodes sit at odd multiples of the refined h.
        for (int k = 1; k * h <= kTMax; k += 2) {
            sum += ts_term(f, a, b, k * h, d);
            sum += ts_term(f, a, b, -k * h, d);
        }
        prev = integral;
        integral = h * sum;
        diff = std::fabs(integral - prev);
        const double target = std::max(rel_tol * std::fabs(integral), abs_tol);
        if (level >= 2 && diff <= target) {
            return {integral, diff, level};
        }
    }
    throw QuadratureError("tanh_sinh: no convergence within refinement budget",
                          integral, diff);
}

QuadResult tanh_sinh(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol, int max_level) {
    return tanh_sinh(TsIntegrand([&f](double x, double, double) { return f(x); }), a,
                     b, rel_tol, abs_tol, max_level);
}

namespace {

// Implicit-shift QL for a symmetric tridiagonal matrix, tracking only the
// first row of the eigenvector matrix (all Golub-Welsch needs).
// d: diagonal in, eigenvalues out. e: off-diagonal (e[0..n-2]).
// z: in = (1,0,...,0), out = first components of the normalized eigenvectors.
void tridiag_eig_first_components(std::vector<double>& d, std::vector<double>& e,
                                  std::vector<double>& z) {
    const int n = static_cast<int>(d.size());
    if (n == 0) return;
    e.resize(n);
    e[n - 1] = 0.0;

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= std::numeric_limits<double>::epsilon() * dd)
                    break;
            }
            if (m != l) {
                if (iter++ == 50)
                    throw std::runtime_error("tridiag_eig: too many QL iterations");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, cparam = 1.0, p = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    double fi = s * e[i];
                    const double bi = cparam * e[i];
                    r = std::hypot(fi, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = fi / r;
                    cparam = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * cparam * bi;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = cparam * r - bi;
                    fi = z[i + 1];
                    z[i + 1] = s * z[i] + cparam * fi;
                    z[i] = cparam * z[i] - s * fi;
                }
                if (r == 0.0 && m - 1 >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

} // namespace

QuadRule gauss_jacobi(int n, double alpha, double beta) {
    if (n < 1) throw std::invalid_argument("gauss_jacobi: n >= 1 required");
    if (!(alpha > -1.0) || !(beta > -1.0))
        throw std::invalid_argument("gauss_jacobi: alpha, beta > -1 required");

    const double ab = alpha + beta;
    std::vector<double> diag(n), off(n, 0.0), z(n, 0.0);
    z[0] = 1.0;

    diag[0] = (beta - alpha) / (ab + 2.0);
    for (int k = 1; k < n; ++k) {
        const double t = 2.0 * k + ab;
        diag[k] = (beta * beta - alpha * alpha) / (t * (t + 2.0));
    }
    // off[k-1] = sqrt(b_k); the k = 1 coefficient is written with the
    // (1 + ab) factor already cancelled so ab = -1 (p = 2) is regular.
    if (n > 1) {
        const double b1 = 4.0 * (1.0 + alpha) * (1.0 + beta) /
                          ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
        off[0] = std::sqrt(b1);
    }
    for (int k = 2; k < n; ++k) {
        const double t = 2.0 * k + ab;
        const double bk = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) /
                          (t * t * (t + 1.0) * (t - 1.0));
        off[k - 1] = std::sqrt(bk);
    }

    tridiag_eig_first_components(diag, off, z);

    // mu0 = integral of the weight over [-1, 1]
    const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) *
                       std::tgamma(beta + 1.0) / std::tgamma(ab + 2.0);

    QuadRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return diag[i] < diag[j]; });
    for (int i = 0; i < n; ++i) {
        rule.x[i] = diag[idx[i]];
        rule.w[i] = mu0 * z[idx[i]] * z[idx[i]];
    }
    return rule;
}

QuadRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

double brent_root(const std::function<double(double)>& f, double a, double b,
                  double rel_tol, int max_iter) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw std::invalid_argument("brent_root: endpoints do not bracket a root");

    double c = a, fc = fa;
    double dstep = b - a, e = b - a;
    for (int iter = 0; iter < max_iter; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            dstep = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 =
            2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) +
            0.5 * rel_tol * std::max(1.0, std::fabs(b));
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            // inverse quadratic / secant step
            const double s = fb / fa;
            double pq, qq;
            if (a == c) {
                pq = 2.0 * xm * s;
                qq = 1.0 - s;
            } else {
                const double q2 = fa / fc;
                const double r2 = fb / fc;
                pq = s * (2.0 * xm * q2 * (q2 - r2) - (b - a) * (r2 - 1.0));
                qq = (q2 - 1.0) * (r2 - 1.0) * (s - 1.0);
            }
            if (pq > 0.0) qq = -qq;
            pq = std::fabs(pq);
            const double min1 = 3.0 * xm * qq - std::fabs(tol1 * qq);
            const double min2 = std::fabs(e * qq);
            if (2.0 * pq < std::min(min1, min2)) {
                e = dstep;
                dstep = pq / qq;
            } else {
                dstep = xm;
                e = dstep;
            }
        } else {
            dstep = xm;
            e = dstep;
        }
        a = b;
        fa = fb;
        if (std::fabs(dstep) > tol1)
            b += dstep;
        else
            b += std::copysign(tol1, xm);
        fb = f(b);
    }
    throw std::runtime_error("brent_root: iteration cap reached");
}

} // namespace plperiod
