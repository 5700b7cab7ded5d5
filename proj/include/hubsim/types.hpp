#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hubsim {

struct Vec2 {
  double x{0.0};
  double y{0.0};

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;

  double norm() const { return std::hypot(x, y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

// Moves `from` toward `to` by at most `step`; lands exactly on `to` when in reach.
inline Vec2 move_toward(Vec2 from, Vec2 to, double step) {
  const Vec2 d = to - from;
  const double len = d.norm();
  if (len <= step || len == 0.0) return to;
  return from + d * (step / len);
}

enum class TargetId : std::int32_t {};
enum class CollectiveId : std::int32_t {};

constexpr std::int32_t to_int(TargetId t) { return static_cast<std::int32_t>(t); }
constexpr std::int32_t to_int(CollectiveId c) { return static_cast<std::int32_t>(c); }
constexpr TargetId target_id(std::int32_t v) { return static_cast<TargetId>(v); }
constexpr CollectiveId collective_id(std::int32_t v) { return static_cast<CollectiveId>(v); }

// Collectives are labelled I..IV on screen; internal ids are 0-based.
std::string roman_label(CollectiveId c);
CollectiveId parse_roman_label(std::string_view label);

enum class Model { M1, M2, M3 };
enum class Difficulty { Easy, Hard };
enum class VisualizationMode { IA, Collective };

std::string_view to_string(Model m);
std::string_view to_string(Difficulty d);
std::string_view to_string(VisualizationMode v);
Model parse_model(std::string_view s);
Difficulty parse_difficulty(std::string_view s);
VisualizationMode parse_visualization(std::string_view s);

// Simulation clock: fixed 10 Hz ticks.
constexpr double kTickSeconds = 0.1;
constexpr double tick_to_seconds(std::int64_t tick) { return static_cast<double>(tick) * kTickSeconds; }

// Maximum search range around a hub, meters.
constexpr double kSearchRange = 500.0;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Smallest integer count that reaches `fraction` of `n` (tolerant of binary
// representations like 0.3 * 200 = 59.99999...).
inline int threshold_count(double fraction, int n) {
  return static_cast<int>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
}

}  // namespace hubsim
