#pragma once

#include "scem/types.hpp"

namespace scem {

/// Swell component; direction is where the waves come from.
struct SwellSpec {
    double height = 0.0;         ///< significant wave height, m
    double period = 0.0;         ///< s
    double direction_deg = 0.0;  ///< degrees clockwise from north, "coming from"
    bool present() const { return height > 0.0 && period > 0.0; }
};

struct WaveGridParams {
    int nodes = 33;          ///< odd, so k = 0 and the axes are grid nodes
    double span = 4.0;       ///< half-width of the grid in units of the peak wavenumber
    double spreading_s = 10.0;
    double swell_width = 0.1;  ///< Gaussian width relative to the swell wavenumber
};

/// Energy per wavenumber cell (m^2) on a square node-centred grid.
struct WaveSpectrum {
    int nodes = 0;
    double dk = 0.0;     ///< rad/m
    double depth = 0.0;  ///< m
    Grid2<double> energy;

    int centre() const { return (nodes - 1) / 2; }
    double kx(int a) const { return (a - centre()) * dk; }
    double ky(int b) const { return (b - centre()) * dk; }
    double total() const;
};

struct EnergyDirection {
    double theta_sum = 0.0;  ///< bearing of the mean energy direction, rad clockwise from north
    double r_sum = 0.0;      ///< magnitude of the vector energy sum, m^2
    double psi_fr = 1.0;     ///< r_sum / total energy
    bool defined = false;    ///< false when the spectrum holds no energy
};

struct WaveSummary {
    double hs = 0.0;        ///< m
    double t_peak = 0.0;    ///< s
    double l_peak = 0.0;    ///< m
    double a_p = 0.0;       ///< m
    double f_p = 0.0;       ///< Hz
    double theta_sum = 0.0; ///< rad clockwise from north
    double psi_fr = 1.0;
    bool calm = true;
};

/// Wavenumber solving w^2 = g k tanh(k d) (Newton iteration).
double dispersion_wavenumber(double omega, double depth);
/// Angular frequency for wavenumber k at depth d.
double dispersion_omega(double k, double depth);

/// Parametric wind sea (Pierson-Moskowitz, cos^2s spreading) driven by the
/// wind relative to the surface current, plus an optional Gaussian swell.
WaveSpectrum build_spectrum(Vec2 wind, Vec2 current, const SwellSpec& swell, double depth,
                            const WaveGridParams& params = {});

EnergyDirection energy_direction(const WaveSpectrum& spectrum);
WaveSummary spectrum_summary(const WaveSpectrum& spectrum);

}  // namespace scem
