#pragma once

#include "scem/flow_solver.hpp"
#include "scem/types.hpp"

namespace scem {

inline constexpr double kEkmanFormationPeriod = 12.0 * 3600.0;  // s
inline constexpr double kDefaultMaxWind = 40.0;                 // m/s

/// Urban-canopy speed cap (1 - lambda_p)^2 * max_speed.
double wind_limit(double lambda_p, double max_speed);

/// Per-cell caps for every cell with lambda_p > 0.
SpeedLimits canopy_limits(const Grid2<double>& lambda_p, double max_speed);

void apply_wind_limits(VelocityField& wind, const Grid2<double>& lambda_p, double max_speed);

struct EkmanWeights {
    double w1;  ///< weight on the previous average
    double w2;  ///< weight on the current wind
};

EkmanWeights ekman_weights(double dt, double period = kEkmanFormationPeriod);

/// One incremental weighted-mean update of the Ekman wind.
Vec2 update_ekman_wind(Vec2 previous, Vec2 now, double dt, double period = kEkmanFormationPeriod);

/// Per-cell Ekman-averaged wind, initialised to the wind at t = 0.
class EkmanWindState {
public:
    EkmanWindState() = default;
    explicit EkmanWindState(const Grid2<Vec2>& initial_wind, double period = kEkmanFormationPeriod)
        : mean_(initial_wind), period_(period) {}

    void update(const Grid2<Vec2>& wind_now, double dt);
    const Grid2<Vec2>& mean() const { return mean_; }
    Vec2 at(int i, int j) const { return mean_(i, j); }
    double period() const { return period_; }

private:
    Grid2<Vec2> mean_;
    double period_ = kEkmanFormationPeriod;
};

}  // namespace scem
