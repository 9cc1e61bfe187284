#include "core_model.hpp"

#include "error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace eitnoise {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& field, const std::string& message) {
    if (!ok) throw Error(ErrorCode::Config, field + ": " + message);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void validate(const LambdaSystem& s) {
    require(finite(s.omega21) && s.omega21 > 0.0, "omega21", "must be finite and > 0");
    require(finite(s.omega31) && s.omega31 > s.omega21, "omega31",
            "must be finite and > omega21 (Lambda ordering)");
    require(finite(s.a21) && s.a21 >= 0.0, "a21", "must be finite and >= 0");
    require(finite(s.a31) && s.a31 >= 0.0, "a31", "must be finite and >= 0");
    require(finite(s.a32) && s.a32 >= 0.0, "a32", "must be finite and >= 0");
    if (s.gamma31) require(finite(*s.gamma31) && *s.gamma31 > 0.0, "gamma31", "must be > 0");
    if (s.gamma32) require(finite(*s.gamma32) && *s.gamma32 > 0.0, "gamma32", "must be > 0");
    if (s.gamma21) require(finite(*s.gamma21) && *s.gamma21 >= 0.0, "gamma21", "must be >= 0");
    require(finite(s.dipole_scale) && s.dipole_scale > 0.0, "dipole_scale", "must be > 0");
    require(finite(s.drive_rabi.real()) && finite(s.drive_rabi.imag()), "drive_rabi",
            "must be finite");

    if (const auto* t = std::get_if<Kelvin>(&s.temperature)) {
        require(finite(t->value) && t->value >= 0.0, "temperature.kelvin", "must be >= 0");
        if (s.units == Units::Dimensionless && t->value > 0.0) {
            require(finite(s.frequency_unit) && s.frequency_unit > 0.0, "frequency_unit",
                    "required (> 0, rad/s per unit) for a kelvin temperature in "
                    "dimensionless units");
        }
    } else {
        const auto& o = std::get<Occupations>(s.temperature);
        require(finite(o.n21) && o.n21 >= 0.0, "temperature.occupations.n21", "must be >= 0");
        require(finite(o.n31) && o.n31 >= 0.0, "temperature.occupations.n31", "must be >= 0");
        require(finite(o.n32) && o.n32 >= 0.0, "temperature.occupations.n32", "must be >= 0");
    }
}

double thermal_occupation(double x) {
    if (!(x > 0.0)) {
        throw Error(ErrorCode::InvalidArgument,
                    "thermal_occupation: reduced energy must be > 0, got " + std::to_string(x));
    }
    if (std::isinf(x)) return 0.0;
    return 1.0 / std::expm1(x);
}

double thermal_occupation(double omega, double kelvin) {
    if (!(omega > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "thermal_occupation: omega must be > 0");
    }
    if (!(kelvin >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "thermal_occupation: temperature must be >= 0");
    }
    if (kelvin == 0.0) return 0.0;
    return thermal_occupation(constants::hbar * omega / (constants::k_boltzmann * kelvin));
}

double log_thermal_occupation(double x) {
    if (!(x > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "log_thermal_occupation: x must be > 0");
    }
    if (std::isinf(x)) return -kInf;
    if (x > 30.0) return -x - std::log1p(-std::exp(-x));
    return -std::log(std::expm1(x));
}

double planck_exponent_from_occupation(double n) {
    if (n < 0.0) throw Error(ErrorCode::InvalidArgument, "occupation must be >= 0");
    if (n == 0.0) return kInf;
    return std::log1p(1.0 / n);
}

ThermalState thermal_state(const LambdaSystem& s) {
    ThermalState th;
    if (const auto* t = std::get_if<Kelvin>(&s.temperature)) {
        if (t->value == 0.0) {
            th.x21 = th.x31 = th.x32 = kInf;
        } else {
            const double unit = s.units == Units::SI ? 1.0 : s.frequency_unit;
            const double scale = constants::hbar * unit / (constants::k_boltzmann * t->value);
            th.x21 = scale * s.omega21;
            th.x31 = scale * s.omega31;
            th.x32 = scale * s.omega32();
        }
        th.n21 = thermal_occupation(th.x21);
        th.n31 = thermal_occupation(th.x31);
        th.n32 = thermal_occupation(th.x32);
        th.log_n21 = log_thermal_occupation(th.x21);
        th.log_n31 = log_thermal_occupation(th.x31);
        th.log_n32 = log_thermal_occupation(th.x32);
        th.planck_consistent = true;
    } else {
        const auto& o = std::get<Occupations>(s.temperature);
        th.n21 = o.n21;
        th.n31 = o.n31;
        th.n32 = o.n32;
        th.log_n21 = std::log(o.n21);
        th.log_n31 = std::log(o.n31);
        th.log_n32 = std::log(o.n32);
        th.x21 = planck_exponent_from_occupation(o.n21);
        th.x31 = planck_exponent_from_occupation(o.n31);
        th.x32 = planck_exponent_from_occupation(o.n32);
        if (std::isinf(th.x31)) {
            th.planck_consistent = std::isinf(th.x21) || std::isinf(th.x32);
        } else {
            th.planck_consistent =
                std::abs(th.x31 - th.x21 - th.x32) <= 1e-9 * std::max(th.x31, 1.0);
        }
    }
    return th;
}

Eigen::Matrix3d radiative_transverse_rates(const RelaxationModel& model) {
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    for (int m = 0; m < 3; ++m) {
        for (int n = 0; n < 3; ++n) {
            if (m != n) g(m, n) = 0.5 * (model.depopulation(m) + model.depopulation(n));
        }
    }
    return g;
}

RelaxationModel build_relaxation(const LambdaSystem& s) {
    const ThermalState th = thermal_state(s);
    RelaxationModel model;
    auto couple = [&](int lower, int upper, double a, double n) {
        model.w(lower, upper) = a * (n + 1.0);
        model.w(upper, lower) = a * n;
    };
    couple(L1, L2, s.a21, th.n21);
    couple(L1, L3, s.a31, th.n31);
    couple(L2, L3, s.a32, th.n32);
    for (int m = 0; m < 3; ++m) {
        double out = 0.0;
        for (int n = 0; n < 3; ++n) {
            if (n != m) out += model.w(n, m);
        }
        model.w(m, m) = -out;
    }

    model.gamma = radiative_transverse_rates(model);
    auto set_gamma = [&](int m, int n, const std::optional<double>& v) {
        if (v) model.gamma(m, n) = model.gamma(n, m) = *v;
    };
    set_gamma(L3, L1, s.gamma31);
    set_gamma(L2, L1, s.gamma21);
    set_gamma(L3, L2, s.gamma32);

    require(model.gamma31() > 0.0, "gamma31",
            "resolved transverse rate must be > 0 (set gamma31 or a nonzero A coefficient)");
    require(model.gamma32() > 0.0, "gamma32",
            "resolved transverse rate must be > 0 (set gamma32 or a nonzero A coefficient)");
    return model;
}

RelaxationTimes relaxation_times(const LambdaSystem& s) {
    const ThermalState th = thermal_state(s);
    auto t = [](double a, double n) { return a > 0.0 ? 1.0 / (a * (n + 1.0)) : kInf; };
    return {t(s.a21, th.n21), t(s.a31, th.n31), t(s.a32, th.n32)};
}

InternalSystem to_internal_units(const LambdaSystem& s) {
    validate(s);
    if (s.units == Units::Dimensionless) return {s, 1.0};

    const double ref = build_relaxation(s).gamma31();
    LambdaSystem out = s;
    out.units = Units::Dimensionless;
    out.frequency_unit = ref;
    out.omega31 /= ref;
    out.omega21 /= ref;
    out.a21 /= ref;
    out.a31 /= ref;
    out.a32 /= ref;
    if (out.gamma31) *out.gamma31 /= ref;
    if (out.gamma21) *out.gamma21 /= ref;
    if (out.gamma32) *out.gamma32 /= ref;
    out.drive_rabi /= ref;
    return {out, ref};
}

}  // namespace eitnoise
