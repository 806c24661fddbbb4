#include "scem/wind_model.hpp"

#include <cmath>
#include <string>

namespace scem {

double wind_limit(double lambda_p, double max_speed) {
    if (!(lambda_p >= 0.0 && lambda_p <= 1.0))
        throw ModelError("wind_limit: plan density " + std::to_string(lambda_p) + " outside [0, 1]");
    if (max_speed < 0.0) throw ModelError("wind_limit: negative maximum wind speed");
    const double k = 1.0 - lambda_p;
    return k * k * max_speed;
}

SpeedLimits canopy_limits(const Grid2<double>& lambda_p, double max_speed) {
    SpeedLimits out{Grid2<double>(lambda_p.nx(), lambda_p.ny(), max_speed),
                    Grid2<std::uint8_t>(lambda_p.nx(), lambda_p.ny(), 0)};
    for (int j = 0; j < lambda_p.ny(); ++j) {
        for (int i = 0; i < lambda_p.nx(); ++i) {
            const double lp = lambda_p(i, j);
            out.limit(i, j) = wind_limit(lp, max_speed);
            if (lp > 0.0) out.active(i, j) = 1;
        }
    }
    return out;
}

void apply_wind_limits(VelocityField& wind, const Grid2<double>& lambda_p, double max_speed) {
    if (wind.kind != FlowKind::wind) throw ModelError("apply_wind_limits: field is not a wind field");
    apply_speed_limits(wind, canopy_limits(lambda_p, max_speed));
}

EkmanWeights ekman_weights(double dt, double period) {
    if (!(dt > 0.0) || !(dt < period))
        throw ModelError("ekman weights need 0 < dt < T_E (dt = " + std::to_string(dt) + " s)");
    return {(period - dt) / (0.5 * period), dt / period};
}

Vec2 update_ekman_wind(Vec2 previous, Vec2 now, double dt, double period) {
    const auto [w1, w2] = ekman_weights(dt, period);
    const double norm = w1 + w2;
    return {(w1 * previous.x + w2 * now.x) / norm, (w1 * previous.y + w2 * now.y) / norm};
}

void EkmanWindState::update(const Grid2<Vec2>& wind_now, double dt) {
    if (wind_now.nx() != mean_.nx() || wind_now.ny() != mean_.ny())
        throw ModelError("EkmanWindState: wind grid does not match state");
    Grid2<Vec2> next(mean_.nx(), mean_.ny());
    for (int j = 0; j < mean_.ny(); ++j)
        for (int i = 0; i < mean_.nx(); ++i) next(i, j) = update_ekman_wind(mean_(i, j), wind_now(i, j), dt, period_);
    mean_ = std::move(next);
}

}  // namespace scem
