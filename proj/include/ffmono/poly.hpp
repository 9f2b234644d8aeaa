#pragma once

#include <cstddef>
#include <vector>

namespace ffmono {

// Real polynomial with ascending coefficients c[0] + c[1] z + ...
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<double>& coeffs() const { return c_; }

    double operator()(double z) const {
        double v = 0.0;
        for (std::size_t i = c_.size(); i-- > 0;) v = v * z + c_[i];
        return v;
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return Polynomial({0.0});
        std::vector<double> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
        return Polynomial(std::move(d));
    }

    // Synthetic division by (z - r); the remainder is discarded (callers use
    // this only with r polished to a root).
    Polynomial deflate(double r) const {
        if (c_.size() <= 1) return Polynomial({0.0});
        std::vector<double> q(c_.size() - 1);
        double carry = c_.back();
        for (std::size_t i = c_.size() - 1; i-- > 0;) {
            q[i] = carry;
            carry = c_[i] + r * carry;
        }
        return Polynomial(std::move(q));
    }

private:
    void trim() {
        while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
        if (c_.empty()) c_.push_back(0.0);
    }
    std::vector<double> c_{0.0};
};

// All simple sign-change roots of p in [a, b], located by scan + bisection and
// polished with Newton to ~1e-14 relative. Roots at the interval endpoints are
// included when |p| vanishes there to within `end_tol`.
std::vector<double> roots_in_interval(const Polynomial& p, double a, double b,
                                      double scan_step = 1e-4, double end_tol = 1e-13);

}  // namespace ffmono
