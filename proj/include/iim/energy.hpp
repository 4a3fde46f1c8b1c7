#pragma once

#include <functional>

#include "iim/common.hpp"

namespace iim {

// Membrane energy densities: E_s as a function of the stretch chi, E_b as a
// function of the curvature kappa, with first and second derivatives.
// E_s(1) is the unstretched reference value.
struct EnergyModel {
    using Fn = std::function<double(double)>;

    Fn es = [](double) { return 0.0; };
    Fn es_d = [](double) { return 0.0; };
    Fn es_dd = [](double) { return 0.0; };
    Fn eb = [](double) { return 0.0; };
    Fn eb_d = [](double) { return 0.0; };
    Fn eb_dd = [](double) { return 0.0; };

    static EnergyModel zero() { return {}; }

    // E_s = sigma * chi (constant tension).
    static EnergyModel tension(double sigma) {
        EnergyModel m;
        m.es = [sigma](double chi) { return sigma * chi; };
        m.es_d = [sigma](double) { return sigma; };
        return m;
    }

    // E_s = (k/2)(chi - 1)^2.
    static EnergyModel hookean(double k) {
        EnergyModel m;
        m.es = [k](double chi) { return 0.5 * k * sqr(chi - 1.0); };
        m.es_d = [k](double chi) { return k * (chi - 1.0); };
        m.es_dd = [k](double) { return k; };
        return m;
    }

    // E_b = (c/2) kappa^2.
    static EnergyModel bending_quadratic(double c) {
        EnergyModel m;
        m.eb = [c](double kappa) { return 0.5 * c * sqr(kappa); };
        m.eb_d = [c](double kappa) { return c * kappa; };
        m.eb_dd = [c](double) { return c; };
        return m;
    }

    // E_b = c, independent of kappa.
    static EnergyModel bending_constant(double c) {
        EnergyModel m;
        m.eb = [c](double) { return c; };
        return m;
    }

    // Adds the bending part of `other` to this model's stretch part.
    EnergyModel with_bending(const EnergyModel& other) const {
        EnergyModel m = *this;
        m.eb = other.eb;
        m.eb_d = other.eb_d;
        m.eb_dd = other.eb_dd;
        return m;
    }
};

} // namespace iim
