#include "noisestab/spectral.hpp"

namespace noisestab {

FourierGrid::FourierGrid(const Grid& grid) : grid_(grid) {
    grid_.validate();
    const Eigen::Index n = grid_.size;
    k_.resize(n);
    mask_.resize(n);
    const double k0 = 2.0 * M_PI / grid_.length;
    for (Eigen::Index m = 0; m < n; ++m) {
        const Eigen::Index signed_m = m <= n / 2 ? m : m - n;
        k_[m] = k0 * static_cast<double>(signed_m);
        mask_[m] = 3 * std::abs(signed_m) <= n ? 1.0 : 0.0;
    }
}

Spectrum FourierGrid::forward(const Field& f) const {
    Spectrum s(size());
    fft_.fwd(s, f);
    return s;
}

Field FourierGrid::inverse(const Spectrum& s) const {
    Spectrum tmp(size());
    fft_.inv(tmp, s);
    return tmp.real();
}

Field FourierGrid::derivative(const Field& f, int order) const {
    Spectrum s = forward(f);
    const std::complex<double> ik(0.0, 1.0);
    for (Eigen::Index m = 0; m < size(); ++m) s[m] *= std::pow(ik * k_[m], order);
    if (order % 2 == 1) s[size() / 2] = 0.0;
    return inverse(s);
}

}  // namespace noisestab
