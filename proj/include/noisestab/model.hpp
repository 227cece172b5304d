#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace noisestab {

/// Linear part of the model: A = -(1 + d_xx)^2 + nu, -d_xxxx + nu, or -(mu + d_xx)^2 + nu.
enum class OperatorKind { swift_hohenberg, biharmonic, shifted };

struct ModelSpec {
    OperatorKind kind = OperatorKind::swift_hohenberg;
    double nu = 0.1;
    double sigma = 0.0;
    double mu = 1.0;  ///< only used by OperatorKind::shifted

    /// Action of A on constants; drift of the scalar stationary SDE.
    double lambda() const {
        switch (kind) {
            case OperatorKind::swift_hohenberg: return nu - 1.0;
            case OperatorKind::biharmonic: return nu;
            case OperatorKind::shifted: return nu - mu * mu;
        }
        return nu;
    }
    /// Growth bound of A in L^2_rho in the small-c limit.
    double eta() const { return nu; }

    /// Fourier symbol of A at wavenumber k.
    double symbol(double k) const {
        const double k2 = k * k;
        switch (kind) {
            case OperatorKind::swift_hohenberg: return -(1.0 - k2) * (1.0 - k2) + nu;
            case OperatorKind::biharmonic: return -k2 * k2 + nu;
            case OperatorKind::shifted: return -(mu - k2) * (mu - k2) + nu;
        }
        return nu;
    }
};

inline std::string_view to_string(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::swift_hohenberg: return "sh";
        case OperatorKind::biharmonic: return "biharmonic";
        case OperatorKind::shifted: return "shifted";
    }
    return "?";
}

inline OperatorKind parse_operator_kind(std::string_view name) {
    if (name == "sh" || name == "swift_hohenberg") return OperatorKind::swift_hohenberg;
    if (name == "biharmonic" || name == "bh") return OperatorKind::biharmonic;
    if (name == "shifted") return OperatorKind::shifted;
    throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

}  // namespace noisestab
