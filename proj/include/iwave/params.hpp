#pragma once

#include <cmath>
#include <stdexcept>

namespace iwave {

// Fixed problem parameters. The vorticity jump is normalised to one, so the
// upper-layer vorticity is always omega0 - 1.
struct PhysParams {
    double k = 1.0;       // wavenumber, > 0
    double H = 0.5;       // mean interface depth, in (0,1)
    double omega0 = 0.0;  // lower-layer vorticity

    double omega1() const { return omega0 - 1.0; }
    double vorticity(int layer) const { return layer == 0 ? omega0 : omega1(); }

    bool valid() const { return k > 0.0 && H > 0.0 && H < 1.0 && std::isfinite(omega0); }

    void require_valid() const {
        if (!valid()) throw std::invalid_argument("PhysParams: need k > 0 and 0 < H < 1");
    }
};

}  // namespace iwave
