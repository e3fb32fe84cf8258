#include "nlevy/smooth.hpp"

#include <cmath>
#include <stdexcept>

namespace nlevy {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

CosProfile::CosProfile(double amp, double freq, double phase, double offset)
    : amp_(amp), freq_(freq), phase_(phase), offset_(offset) {}

double CosProfile::value(double t) const { return amp_ * std::cos(freq_ * t + phase_) + offset_; }
double CosProfile::d1(double t) const { return -amp_ * freq_ * std::sin(freq_ * t + phase_); }
double CosProfile::d2(double t) const { return -amp_ * freq_ * freq_ * std::cos(freq_ * t + phase_); }

DerivativeBounds CosProfile::bounds() const {
    const double a = std::abs(amp_), w = std::abs(freq_);
    return {a + std::abs(offset_), a * w, a * w * w, a * w * w * w};
}

// cos^4 u = (3 + 4 cos 2u + cos 4u) / 8, so the k-th derivative in u is
// bounded by (4*2^k + 4^k)/8.
BumpProfile::BumpProfile(double amp, double radius) : amp_(amp), radius_(radius) {
    if (!(radius > 0)) throw std::invalid_argument("bump radius must be > 0");
}

double BumpProfile::value(double t) const {
    if (std::abs(t) >= radius_) return 0.0;
    double c = std::cos(kPi * t / (2 * radius_));
    double c2 = c * c;
    return amp_ * c2 * c2;
}

double BumpProfile::d1(double t) const {
    if (std::abs(t) >= radius_) return 0.0;
    const double s = kPi / (2 * radius_);
    const double u = s * t;
    // d/du cos^4 u = -(8 sin 2u + 4 sin 4u)/8
    return -amp_ * s * (8 * std::sin(2 * u) + 4 * std::sin(4 * u)) / 8.0;
}

double BumpProfile::d2(double t) const {
    if (std::abs(t) >= radius_) return 0.0;
    const double s = kPi / (2 * radius_);
    const double u = s * t;
    return -amp_ * s * s * (16 * std::cos(2 * u) + 16 * std::cos(4 * u)) / 8.0;
}

DerivativeBounds BumpProfile::bounds() const {
    const double a = std::abs(amp_), s = kPi / (2 * radius_);
    auto b = [&](int k) { return a * std::pow(s, k) * (4 * std::pow(2.0, k) + std::pow(4.0, k)) / 8.0; };
    return {a, b(1), b(2), b(3)};
}

SinBumpProfile::SinBumpProfile(double amp, double freq, double radius)
    : amp_(amp), freq_(freq), bump_(1.0, radius) {}

double SinBumpProfile::value(double t) const { return amp_ * std::sin(freq_ * t) * bump_.value(t); }

double SinBumpProfile::d1(double t) const {
    return amp_ * (freq_ * std::cos(freq_ * t) * bump_.value(t) +
                   std::sin(freq_ * t) * bump_.d1(t));
}

double SinBumpProfile::d2(double t) const {
    return amp_ * (-freq_ * freq_ * std::sin(freq_ * t) * bump_.value(t) +
                   2 * freq_ * std::cos(freq_ * t) * bump_.d1(t) +
                   std::sin(freq_ * t) * bump_.d2(t));
}

DerivativeBounds SinBumpProfile::bounds() const {
    const DerivativeBounds b = bump_.bounds();
    const double a = std::abs(amp_), w = std::abs(freq_);
    // Leibniz-rule upper bounds for sin(wt)*bump(t).
    DerivativeBounds r;
    r.f0 = a * b.f0;
    r.d1 = a * (w * b.f0 + b.d1);
    r.d2 = a * (w * w * b.f0 + 2 * w * b.d1 + b.d2);
    r.d3 = a * (w * w * w * b.f0 + 3 * w * w * b.d1 + 3 * w * b.d2 + b.d3);
    return r;
}

GaussianProfile::GaussianProfile(double amp, double sigma) : amp_(amp), sigma_(sigma) {
    if (!(sigma > 0)) throw std::invalid_argument("gaussian sigma must be > 0");
}

double GaussianProfile::value(double t) const {
    const double u = t / sigma_;
    return amp_ * std::exp(-0.5 * u * u);
}

double GaussianProfile::d1(double t) const {
    const double u = t / sigma_;
    return -amp_ / sigma_ * u * std::exp(-0.5 * u * u);
}

double GaussianProfile::d2(double t) const {
    const double u = t / sigma_;
    return amp_ / (sigma_ * sigma_) * (u * u - 1) * std::exp(-0.5 * u * u);
}

DerivativeBounds GaussianProfile::bounds() const {
    const double a = std::abs(amp_), s = sigma_;
    // max |u| e^{-u^2/2} = e^{-1/2}; max |u^2-1| e^{-u^2/2} = 1 (at 0);
    // max |u^3-3u| e^{-u^2/2} = 1.3801... (at u^2 = 3 - sqrt(6)).
    return {a, a * 0.60653065971263342 / s, a / (s * s), a * 1.3801582957356554 / (s * s * s)};
}

ProfileField::ProfileField(std::shared_ptr<const Profile> profile, std::vector<double> weights)
    : profile_(std::move(profile)), weights_(std::move(weights)) {
    if (weights_.empty() || weights_.size() > 3)
        throw std::invalid_argument("ProfileField supports 1..3 coordinates");
    double s = 0;
    for (double w : weights_) s += w * w;
    wnorm_ = std::sqrt(s);
}

double ProfileField::dot(std::span<const double> x) const {
    double t = 0;
    for (std::size_t c = 0; c < weights_.size(); ++c) t += weights_[c] * x[c];
    return t;
}

double ProfileField::value(std::span<const double> x) const { return profile_->value(dot(x)); }

void ProfileField::gradient(std::span<const double> x, std::span<double> g) const {
    const double p1 = profile_->d1(dot(x));
    for (std::size_t c = 0; c < weights_.size(); ++c) g[c] = weights_[c] * p1;
}

void ProfileField::hessian(std::span<const double> x, std::span<double> h) const {
    const double p2 = profile_->d2(dot(x));
    const std::size_t a = weights_.size();
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < a; ++j) h[i * a + j] = weights_[i] * weights_[j] * p2;
}

DerivativeBounds ProfileField::bounds() const {
    const DerivativeBounds b = profile_->bounds();
    return {b.f0, b.d1 * wnorm_, b.d2 * wnorm_ * wnorm_, b.d3 * wnorm_ * wnorm_ * wnorm_};
}

namespace {
double dotw(std::span<const double> w, std::span<const double> x) {
    double t = 0;
    for (std::size_t c = 0; c < w.size(); ++c) t += w[c] * x[c];
    return t;
}
double norm2(const std::vector<double>& w) {
    double s = 0;
    for (double v : w) s += v * v;
    return std::sqrt(s);
}
}  // namespace

InitialCondition clipped_quadratic(double coeff, double cap, std::vector<double> weights) {
    if (!(cap > 0)) throw std::invalid_argument("clip cap must be > 0");
    const double wn = norm2(weights);
    InitialCondition ic;
    ic.sup_norm = std::abs(coeff) * cap;
    // |d/dt c*min(t^2,cap)| <= 2|c| sqrt(cap)
    ic.lipschitz = 2 * std::abs(coeff) * std::sqrt(cap) * wn;
    ic.f = [coeff, cap, w = std::move(weights)](std::span<const double> x) {
        const double t = dotw(w, x);
        return coeff * std::min(t * t, cap);
    };
    return ic;
}

InitialCondition piecewise_linear_ramp(double slope, double cap, std::vector<double> weights) {
    if (!(cap > 0)) throw std::invalid_argument("ramp cap must be > 0");
    const double wn = norm2(weights);
    InitialCondition ic;
    ic.sup_norm = std::abs(slope) * cap;
    ic.lipschitz = std::abs(slope) * wn;
    ic.f = [slope, cap, w = std::move(weights)](std::span<const double> x) {
        const double t = dotw(w, x);
        return slope * std::clamp(t, -cap, cap);
    };
    return ic;
}

InitialCondition abs_value(double cap, std::vector<double> weights) {
    if (!(cap > 0)) throw std::invalid_argument("cap must be > 0");
    const double wn = norm2(weights);
    InitialCondition ic;
    ic.sup_norm = cap;
    ic.lipschitz = wn;
    ic.f = [cap, w = std::move(weights)](std::span<const double> x) {
        const double t = dotw(w, x);
        return std::min(std::abs(t), cap);
    };
    return ic;
}

InitialCondition from_smooth(std::shared_ptr<const SmoothFunction> phi) {
    InitialCondition ic;
    const DerivativeBounds b = phi->bounds();
    ic.sup_norm = b.f0;
    ic.lipschitz = b.d1;
    ic.f = [phi = std::move(phi)](std::span<const double> x) { return phi->value(x); };
    return ic;
}

}  // namespace nlevy
