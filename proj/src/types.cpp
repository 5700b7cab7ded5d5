#include "hubsim/types.hpp"

#include <array>

namespace hubsim {
namespace {

constexpr std::array<std::string_view, 8> kRoman{"I", "II", "III", "IV", "V", "VI", "VII", "VIII"};

}  // namespace

std::string roman_label(CollectiveId c) {
  const auto i = to_int(c);
  if (i < 0 || i >= static_cast<int>(kRoman.size())) return "C" + std::to_string(i);
  return std::string(kRoman[static_cast<std::size_t>(i)]);
}

CollectiveId parse_roman_label(std::string_view label) {
  for (std::size_t i = 0; i < kRoman.size(); ++i)
    if (kRoman[i] == label) return collective_id(static_cast<std::int32_t>(i));
  throw DomainError("unknown collective label: " + std::string(label));
}

std::string_view to_string(Model m) {
  switch (m) {
    case Model::M1: return "M1";
    case Model::M2: return "M2";
    case Model::M3: return "M3";
  }
  return "?";
}

std::string_view to_string(Difficulty d) { return d == Difficulty::Easy ? "easy" : "hard"; }

std::string_view to_string(VisualizationMode v) { return v == VisualizationMode::IA ? "IA" : "Collective"; }

Model parse_model(std::string_view s) {
  if (s == "M1" || s == "m1") return Model::M1;
  if (s == "M2" || s == "m2") return Model::M2;
  if (s == "M3" || s == "m3") return Model::M3;
  throw ConfigError("unknown model: " + std::string(s));
}

Difficulty parse_difficulty(std::string_view s) {
  if (s == "easy" || s == "Easy") return Difficulty::Easy;
  if (s == "hard" || s == "Hard") return Difficulty::Hard;
  throw ConfigError("unknown difficulty: " + std::string(s));
}

VisualizationMode parse_visualization(std::string_view s) {
  if (s == "IA" || s == "ia") return VisualizationMode::IA;
  if (s == "Collective" || s == "collective") return VisualizationMode::Collective;
  throw ConfigError("unknown visualization mode: " + std::string(s));
}

}  // namespace hubsim
