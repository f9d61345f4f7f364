#pragma once

// Compile-time dimensional analysis for the formula-heavy parts of the
// library. Exponents are stored doubled so that square roots of
// half-integer powers (THz * mm^1/2) stay representable.

#include <cmath>
#include <type_traits>

namespace wgpair::units {

template <int M2, int L2, int T2, int I2>
struct Quantity {
  static constexpr int kMass = M2;
  static constexpr int kLength = L2;
  static constexpr int kTime = T2;
  static constexpr int kCurrent = I2;

  double value = 0.0;

  constexpr Quantity() = default;
  constexpr explicit Quantity(double v) : value(v) {}

  constexpr Quantity operator+(Quantity o) const { return Quantity(value + o.value); }
  constexpr Quantity operator-(Quantity o) const { return Quantity(value - o.value); }
  constexpr Quantity operator-() const { return Quantity(-value); }
  constexpr Quantity& operator+=(Quantity o) {
    value += o.value;
    return *this;
  }
  constexpr auto operator<=>(const Quantity&) const = default;

  // Numeric value expressed in `unit`, e.g. eta.in(per_watt_per_mm2).
  constexpr double in(Quantity unit) const { return value / unit.value; }
};

template <int M, int L, int T, int I, int M2, int L2, int T2, int I2>
constexpr auto operator*(Quantity<M, L, T, I> a, Quantity<M2, L2, T2, I2> b) {
  return Quantity<M + M2, L + L2, T + T2, I + I2>(a.value * b.value);
}

template <int M, int L, int T, int I, int M2, int L2, int T2, int I2>
constexpr auto operator/(Quantity<M, L, T, I> a, Quantity<M2, L2, T2, I2> b) {
  return Quantity<M - M2, L - L2, T - T2, I - I2>(a.value / b.value);
}

template <int M, int L, int T, int I>
constexpr auto operator*(double s, Quantity<M, L, T, I> q) {
  return Quantity<M, L, T, I>(s * q.value);
}

template <int M, int L, int T, int I>
constexpr auto operator*(Quantity<M, L, T, I> q, double s) {
  return Quantity<M, L, T, I>(s * q.value);
}

template <int M, int L, int T, int I>
constexpr auto operator/(Quantity<M, L, T, I> q, double s) {
  return Quantity<M, L, T, I>(q.value / s);
}

template <int M, int L, int T, int I>
constexpr auto operator/(double s, Quantity<M, L, T, I> q) {
  return Quantity<-M, -L, -T, -I>(s / q.value);
}

template <int M, int L, int T, int I>
auto sqrt(Quantity<M, L, T, I> q) {
  static_assert(M % 2 == 0 && L % 2 == 0 && T % 2 == 0 && I % 2 == 0,
                "sqrt would produce quarter-integer exponents");
  return Quantity<M / 2, L / 2, T / 2, I / 2>(std::sqrt(q.value));
}

template <int M, int L, int T, int I>
auto abs(Quantity<M, L, T, I> q) {
  return Quantity<M, L, T, I>(std::abs(q.value));
}

template <typename Q>
constexpr auto square(Q q) {
  return q * q;
}

template <typename A, typename B>
inline constexpr bool same_dimension_v = std::is_same_v<A, B>;

// Base dimensions (doubled exponents).
using Dimensionless = Quantity<0, 0, 0, 0>;
using Mass = Quantity<2, 0, 0, 0>;
using Length = Quantity<0, 2, 0, 0>;
using Time = Quantity<0, 0, 2, 0>;
using Current = Quantity<0, 0, 0, 2>;

using Area = decltype(Length{} * Length{});
using Frequency = decltype(1.0 / Time{});
using Velocity = decltype(Length{} / Time{});
using Energy = decltype(Mass{} * Velocity{} * Velocity{});
using Power = decltype(Energy{} / Time{});
using Action = decltype(Energy{} * Time{});
using Charge = decltype(Current{} * Time{});
using Voltage = decltype(Power{} / Current{});
using Capacitance = decltype(Charge{} / Voltage{});
using Permittivity = decltype(Capacitance{} / Length{});
using InverseVoltage = decltype(1.0 / Voltage{});
using NonlinearCoefficient = decltype(Length{} / Voltage{});  // d36 in m/V
using GroupVelocityDispersion = decltype(Time{} * Time{} / Length{});
using SqrtLength = Quantity<0, 1, 0, 0>;
using BandwidthCoefficient = decltype(Frequency{} * SqrtLength{});
using NormalizedShgEfficiency = decltype(1.0 / (Power{} * Area{}));
using NormalizedSpdcEfficiency = decltype(1.0 / (Length{} * SqrtLength{}));  // m^-3/2
using RatePerPower = decltype(Frequency{} / Power{});

// Unit constants in SI.
inline constexpr Dimensionless one{1.0};
inline constexpr Length meter{1.0};
inline constexpr Length millimeter{1e-3};
inline constexpr Length micrometer{1e-6};
inline constexpr Length nanometer{1e-9};
inline constexpr Time second{1.0};
inline constexpr Time picosecond{1e-12};
inline constexpr Frequency hertz{1.0};
inline constexpr Frequency gigahertz{1e9};
inline constexpr Frequency terahertz{1e12};
inline constexpr Power watt{1.0};
inline constexpr Power milliwatt{1e-3};
inline constexpr Energy joule{1.0};
inline constexpr Voltage volt{1.0};
inline constexpr NonlinearCoefficient picometer_per_volt{1e-12};

inline constexpr Velocity speed_of_light{2.99792458e8};
inline constexpr Action planck{6.62607015e-34};
inline constexpr Permittivity vacuum_permittivity{8.8541878128e-12};

}  // namespace wgpair::units
