#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace hitlab {

/// Values of the boundary f and its exact calculus at one time.
struct BoundaryValues {
    double f = 0.0;
    double df = 0.0;       // f'(t)
    double d2f = 0.0;      // f''(t)
    double int_df = 0.0;   // integral_0^t f'(u) du
    double int_df_sq = 0.0; // integral_0^t f'(u)^2 du
};

/// Polynomial boundary f(t) = sum_i c_i t^i. Derivatives and running
/// integrals are held as exact coefficient polynomials.
class PolyBoundary {
public:
    PolyBoundary() : PolyBoundary(std::vector<double>{0.0}) {}
    PolyBoundary(std::initializer_list<double> coeffs) : PolyBoundary(std::vector<double>(coeffs)) {}
    explicit PolyBoundary(std::vector<double> coeffs) : coeffs_(std::move(coeffs))
    {
        if (coeffs_.empty())
            coeffs_.push_back(0.0);
        d1_ = derivative(coeffs_);
        d2_ = derivative(d1_);
        // integral_0^t f' = f(t) - f(0), kept as its own polynomial so that t = 0 gives exactly 0.
        int_d1_ = antiderivative(d1_);
        int_d1_sq_ = antiderivative(square(d1_));
    }

    std::span<const double> coefficients() const noexcept { return coeffs_; }
    std::size_t degree() const noexcept { return coeffs_.size() - 1; }

    double f(double t) const noexcept { return horner(coeffs_, t); }
    double df(double t) const noexcept { return horner(d1_, t); }
    double d2f(double t) const noexcept { return horner(d2_, t); }
    double int_df(double t) const noexcept { return horner(int_d1_, t); }
    double int_df_sq(double t) const noexcept { return horner(int_d1_sq_, t); }

    /// True when f'' vanishes identically.
    bool is_linear() const noexcept
    {
        for (double c : d2_)
            if (c != 0.0)
                return false;
        return true;
    }

    static double horner(std::span<const double> c, double t) noexcept
    {
        double acc = 0.0;
        for (std::size_t i = c.size(); i-- > 0;)
            acc = acc * t + c[i];
        return acc;
    }

private:
    static std::vector<double> derivative(const std::vector<double>& c)
    {
        if (c.size() <= 1)
            return {0.0};
        std::vector<double> d(c.size() - 1);
        for (std::size_t i = 1; i < c.size(); ++i)
            d[i - 1] = static_cast<double>(i) * c[i];
        return d;
    }

    static std::vector<double> antiderivative(const std::vector<double>& c)
    {
        std::vector<double> a(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i)
            a[i + 1] = c[i] / static_cast<double>(i + 1);
        return a;
    }

    static std::vector<double> square(const std::vector<double>& c)
    {
        std::vector<double> s(2 * c.size() - 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = 0; j < c.size(); ++j)
                s[i + j] += c[i] * c[j];
        return s;
    }

    std::vector<double> coeffs_;
    std::vector<double> d1_, d2_, int_d1_, int_d1_sq_;
};

inline BoundaryValues boundary_eval(const PolyBoundary& f, double t) noexcept
{
    return {f.f(t), f.df(t), f.d2f(t), f.int_df(t), f.int_df_sq(t)};
}

} // namespace hitlab
