#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace nlevy {

/// Sup-norm bounds of a function and its first three derivatives. Bounds are
/// upper bounds, not necessarily tight.
struct DerivativeBounds {
    double f0 = 0, d1 = 0, d2 = 0, d3 = 0;
};

/// A C^3_b scalar profile of one variable with known derivative bounds.
class Profile {
public:
    virtual ~Profile() = default;
    virtual double value(double t) const = 0;
    virtual double d1(double t) const = 0;
    virtual double d2(double t) const = 0;
    virtual DerivativeBounds bounds() const = 0;
};

/// a*cos(w t + p) + c
class CosProfile : public Profile {
public:
    CosProfile(double amp = 1, double freq = 1, double phase = 0, double offset = 0);
    double value(double t) const override;
    double d1(double t) const override;
    double d2(double t) const override;
    DerivativeBounds bounds() const override;

private:
    double amp_, freq_, phase_, offset_;
};

/// amp * cos^4(pi t / (2 r)) on |t| <= r, 0 outside. C^3 with compact support.
class BumpProfile : public Profile {
public:
    BumpProfile(double amp = 1, double radius = 2);
    double value(double t) const override;
    double d1(double t) const override;
    double d2(double t) const override;
    DerivativeBounds bounds() const override;

private:
    double amp_, radius_;
};

/// sin(w t) * bump(t): odd, compactly supported, C^3.
class SinBumpProfile : public Profile {
public:
    SinBumpProfile(double amp = 1, double freq = 1, double radius = 2);
    double value(double t) const override;
    double d1(double t) const override;
    double d2(double t) const override;
    DerivativeBounds bounds() const override;

private:
    double amp_, freq_;
    BumpProfile bump_;
};

/// amp * exp(-t^2 / (2 sigma^2))
class GaussianProfile : public Profile {
public:
    GaussianProfile(double amp = 1, double sigma = 1);
    double value(double t) const override;
    double d1(double t) const override;
    double d2(double t) const override;
    DerivativeBounds bounds() const override;

private:
    double amp_, sigma_;
};

/// Bounded C^3 test function on R^d (d = 1..3), with gradient, Hessian and
/// derivative bounds.
class SmoothFunction {
public:
    virtual ~SmoothFunction() = default;
    virtual int arity() const = 0;
    virtual double value(std::span<const double> x) const = 0;
    virtual void gradient(std::span<const double> x, std::span<double> g) const = 0;
    /// Row-major arity x arity Hessian.
    virtual void hessian(std::span<const double> x, std::span<double> h) const = 0;
    virtual DerivativeBounds bounds() const = 0;

    std::function<double(std::span<const double>)> as_callable() const {
        return [this](std::span<const double> x) { return value(x); };
    }
};

/// phi(x) = profile(<w, x>). Covers every symbolic initial-condition form the
/// experiments use; gradient/Hessian follow from the chain rule.
class ProfileField : public SmoothFunction {
public:
    ProfileField(std::shared_ptr<const Profile> profile, std::vector<double> weights);

    int arity() const override { return static_cast<int>(weights_.size()); }
    double value(std::span<const double> x) const override;
    void gradient(std::span<const double> x, std::span<double> g) const override;
    void hessian(std::span<const double> x, std::span<double> h) const override;
    DerivativeBounds bounds() const override;

    const Profile& profile() const { return *profile_; }
    std::span<const double> weights() const { return weights_; }

private:
    double dot(std::span<const double> x) const;
    std::shared_ptr<const Profile> profile_;
    std::vector<double> weights_;
    double wnorm_;
};

/// Bounded Lipschitz initial data for DP recursions and PIDE time stepping.
/// Not necessarily differentiable (clipped quadratics, piecewise-linear ramps).
struct InitialCondition {
    std::function<double(std::span<const double>)> f;
    double sup_norm = 0;
    double lipschitz = 0;
};

InitialCondition clipped_quadratic(double coeff, double cap, std::vector<double> weights);
InitialCondition piecewise_linear_ramp(double slope, double cap, std::vector<double> weights);
InitialCondition abs_value(double cap, std::vector<double> weights);
InitialCondition from_smooth(std::shared_ptr<const SmoothFunction> phi);

}  // namespace nlevy
