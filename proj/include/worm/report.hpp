#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "worm/certify.hpp"

namespace worm {

inline constexpr const char* kReportVersion = "1.0.0";

/// {check_name, params, grid, min_margin, argmin, tolerance, pass,
///  wall_time_s, version, details}. Infinite margins are written as null.
json report_to_json(const CertReport& r);

/// {alpha, beta, extension_c, blend_width, eta, gamma, x_eta, beta_eta}; the
/// smoothing fields are null without a SmoothedProfile.
json profile_to_json(const ProfileS& p, const SmoothedProfile* sp = nullptr);

struct LoadedProfile {
  ProfileS base;
  std::optional<SmoothedProfile> smoothed;
};

/// Rebuilds the profile from its construction parameters and rejects the
/// document when a stored derived value (beta, x_eta, beta_eta) disagrees.
LoadedProfile profile_from_json(const json& j);

json witness_table_json(const WitnessTable& t);
std::string witness_table_csv(const WitnessTable& t);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace worm
