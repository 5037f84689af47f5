#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sc2pcr/core.hpp"
#include "sc2pcr/pipeline.hpp"

namespace sc2pcr::harness {

// Correspondence files.
//
// Text: one pair per line, "sx sy sz tx ty tz" separated by whitespace;
// lines starting with '#' and blank lines are ignored.
//
// Binary: "SC2C", a version byte (1), little-endian u32 N, then 6N
// little-endian IEEE-754 float32 values in the text column order.

inline constexpr char kBinaryMagic[4] = {'S', 'C', '2', 'C'};
inline constexpr unsigned char kBinaryVersion = 1;

CorrespondenceSet parse_correspondences_text(std::istream& in);
CorrespondenceSet parse_correspondences_binary(std::istream& in);
/// Picks the binary reader when the file starts with the magic bytes.
CorrespondenceSet read_correspondences(const std::filesystem::path& path);

/// Shortest round-trip decimal form, '.' separator, '\n' line ends.
void write_correspondences_text(std::ostream& out, const CorrespondenceSet& corrs);
void write_correspondences_binary(std::ostream& out, const CorrespondenceSet& corrs);

/// Transform / result JSON: "rotation" (9 numbers, row-major), "translation"
/// (3 numbers), "inlier_count", "inlier_indices", and optionally "config".
nlohmann::json transform_to_json(const RigidTransform& transform);
nlohmann::json result_to_json(const RegistrationResult& result, const RegistrationConfig& cfg);

struct GroundTruth {
  RigidTransform transform;
  /// Present when the file lists "inlier_indices".
  std::optional<std::vector<std::size_t>> inlier_indices;
};

/// Reads a transform-shaped JSON object. A rotation that is orthonormal only
/// to 1e-4 (e.g. printed with few digits) is projected onto SO(3).
GroundTruth ground_truth_from_json(const nlohmann::json& j);
GroundTruth read_ground_truth(const std::filesystem::path& path);

nlohmann::json config_to_json(const RegistrationConfig& cfg);
/// Overlays the keys present in `j` onto `base`. When "d_thr" is given but
/// "tau" / "nms_radius" are not, those follow d_thr.
RegistrationConfig config_from_json(const nlohmann::json& j, RegistrationConfig base = {});

nlohmann::json read_json(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace sc2pcr::harness
