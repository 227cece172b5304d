#pragma once

#include <complex>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "noisestab/weights.hpp"

namespace noisestab {

using Spectrum = Eigen::VectorXcd;

/// Real <-> complex transforms on a periodic Grid, with the usual
/// 2 pi m / L wavenumber layout (m = 0..N/2, then -N/2+1..-1).
///
/// Holds an Eigen::FFT plan cache, so one instance must not be shared
/// between threads.
class FourierGrid {
public:
    explicit FourierGrid(const Grid& grid);

    const Grid& grid() const { return grid_; }
    Eigen::Index size() const { return grid_.size; }
    const Eigen::VectorXd& wavenumbers() const { return k_; }
    /// 1 for modes with |m| <= N/3, 0 for the top third.
    const Eigen::VectorXd& dealias_mask() const { return mask_; }

    Spectrum forward(const Field& f) const;
    Field inverse(const Spectrum& s) const;

    /// d^n f / dx^n. The Nyquist mode is dropped for odd n.
    Field derivative(const Field& f, int order) const;

private:
    Grid grid_;
    Eigen::VectorXd k_;
    Eigen::VectorXd mask_;
    mutable Eigen::FFT<double> fft_;
};

}  // namespace noisestab
