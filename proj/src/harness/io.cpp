#include "sc2pcr/harness/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/SVD>
#include <fmt/format.h>

namespace sc2pcr::harness {

namespace {

std::runtime_error io_error(const std::string& what) { return std::runtime_error(what); }

const char* skip_space(const char* p, const char* end) {
  while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
  return p;
}

std::uint32_t read_u32_le(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_u32_le(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m) {
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d fix = Eigen::Matrix3d::Identity();
  fix(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return svd.matrixU() * fix * svd.matrixV().transpose();
}

}  // namespace

CorrespondenceSet parse_correspondences_text(std::istream& in) {
  std::vector<Correspondence> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const char* p = line.data();
    const char* end = p + line.size();
    p = skip_space(p, end);
    if (p == end || *p == '#') continue;
    std::array<double, 6> v{};
    for (std::size_t k = 0; k < 6; ++k) {
      p = skip_space(p, end);
      if (p < end && *p == '+') ++p;
      const auto [next, ec] = std::from_chars(p, end, v[k]);
      if (ec != std::errc()) {
        throw std::invalid_argument(fmt::format("line {}: expected 6 numbers", line_no));
      }
      p = next;
    }
    if (skip_space(p, end) != end) throw std::invalid_argument(fmt::format("line {}: trailing characters", line_no));
    pairs.push_back({Point3(v[0], v[1], v[2]), Point3(v[3], v[4], v[5])});
  }
  return CorrespondenceSet(std::move(pairs));
}

CorrespondenceSet parse_correspondences_binary(std::istream& in) {
  std::array<unsigned char, 9> header{};
  if (!in.read(reinterpret_cast<char*>(header.data()), header.size())) {
    throw std::invalid_argument("binary correspondence file is truncated");
  }
  if (std::memcmp(header.data(), kBinaryMagic, 4) != 0) throw std::invalid_argument("bad magic in binary file");
  if (header[4] != kBinaryVersion) throw std::invalid_argument("unsupported binary format version");
  const std::uint32_t n = read_u32_le(header.data() + 5);

  std::vector<Correspondence> pairs(n);
  std::array<unsigned char, 24> rec{};
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!in.read(reinterpret_cast<char*>(rec.data()), rec.size())) {
      throw std::invalid_argument("binary correspondence file is truncated");
    }
    std::array<double, 6> v{};
    for (std::size_t k = 0; k < 6; ++k) v[k] = std::bit_cast<float>(read_u32_le(rec.data() + 4 * k));
    pairs[i] = {Point3(v[0], v[1], v[2]), Point3(v[3], v[4], v[5])};
  }
  return CorrespondenceSet(std::move(pairs));
}

CorrespondenceSet read_correspondences(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  const bool binary = in.gcount() == 4 && std::memcmp(magic.data(), kBinaryMagic, 4) == 0;
  in.clear();
  in.seekg(0);
  return binary ? parse_correspondences_binary(in) : parse_correspondences_text(in);
}

void write_correspondences_text(std::ostream& out, const CorrespondenceSet& corrs) {
  std::string buf;
  for (const Correspondence& c : corrs) {
    buf.clear();
    fmt::format_to(std::back_inserter(buf), "{} {} {} {} {} {}\n", c.source.x(), c.source.y(), c.source.z(),
                   c.target.x(), c.target.y(), c.target.z());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

void write_correspondences_binary(std::ostream& out, const CorrespondenceSet& corrs) {
  if (corrs.size() > 0xffffffffu) throw std::invalid_argument("too many correspondences for the binary format");
  out.write(kBinaryMagic, 4);
  out.put(static_cast<char>(kBinaryVersion));
  write_u32_le(out, static_cast<std::uint32_t>(corrs.size()));
  for (const Correspondence& c : corrs) {
    for (double v : {c.source.x(), c.source.y(), c.source.z(), c.target.x(), c.target.y(), c.target.z()}) {
      write_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
}

nlohmann::json transform_to_json(const RigidTransform& transform) {
  const Eigen::Matrix3d& r = transform.rotation();
  const Eigen::Vector3d& t = transform.translation();
  nlohmann::json j;
  j["rotation"] = {r(0, 0), r(0, 1), r(0, 2), r(1, 0), r(1, 1), r(1, 2), r(2, 0), r(2, 1), r(2, 2)};
  j["translation"] = {t.x(), t.y(), t.z()};
  return j;
}

nlohmann::json result_to_json(const RegistrationResult& result, const RegistrationConfig& cfg) {
  nlohmann::json j = transform_to_json(result.transform);
  j["inlier_count"] = result.inlier_count;
  j["inlier_indices"] = result.inlier_mask.indices();
  j["seed_used"] = result.seed_used;
  j["hypotheses_evaluated"] = result.hypotheses_evaluated;
  j["config"] = config_to_json(cfg);
  return j;
}

GroundTruth ground_truth_from_json(const nlohmann::json& j) {
  if (!j.contains("rotation") || !j.contains("translation")) {
    throw std::invalid_argument("transform JSON needs \"rotation\" and \"translation\"");
  }
  const auto rot = j.at("rotation").get<std::vector<double>>();
  const auto tr = j.at("translation").get<std::vector<double>>();
  if (rot.size() != 9 || tr.size() != 3) throw std::invalid_argument("rotation needs 9 numbers, translation 3");
  Eigen::Matrix3d r;
  r << rot[0], rot[1], rot[2], rot[3], rot[4], rot[5], rot[6], rot[7], rot[8];
  if (!RigidTransform::is_rotation(r)) {
    if (!RigidTransform::is_rotation(r, 1e-4)) throw std::invalid_argument("rotation is not a proper rotation");
    r = nearest_rotation(r);
  }
  GroundTruth gt{RigidTransform(r, Eigen::Vector3d(tr[0], tr[1], tr[2])), std::nullopt};
  if (j.contains("inlier_indices")) gt.inlier_indices = j.at("inlier_indices").get<std::vector<std::size_t>>();
  return gt;
}

GroundTruth read_ground_truth(const std::filesystem::path& path) { return ground_truth_from_json(read_json(path)); }

nlohmann::json config_to_json(const RegistrationConfig& cfg) {
  return {{"d_thr", cfg.d_thr},           {"tau", cfg.tau}, {"seed_ratio", cfg.seed_ratio},
          {"nms_radius", cfg.nms_radius}, {"k1", cfg.k1},   {"k2", cfg.k2},
          {"power_iters", cfg.power_iters}, {"power_tol", cfg.power_tol}};
}

RegistrationConfig config_from_json(const nlohmann::json& j, RegistrationConfig base) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  static const char* const kKeys[] = {"d_thr", "tau", "seed_ratio", "nms_radius", "k1", "k2", "power_iters",
                                      "power_tol"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw std::invalid_argument("unknown config key \"" + key + "\"");
    }
  }
  try {
    if (j.contains("d_thr")) {
      base.d_thr = j.at("d_thr").get<double>();
      if (!j.contains("tau")) base.tau = base.d_thr;
      if (!j.contains("nms_radius")) base.nms_radius = base.d_thr;
    }
    if (j.contains("tau")) base.tau = j.at("tau").get<double>();
    if (j.contains("seed_ratio")) base.seed_ratio = j.at("seed_ratio").get<double>();
    if (j.contains("nms_radius")) base.nms_radius = j.at("nms_radius").get<double>();
    if (j.contains("k1")) base.k1 = j.at("k1").get<std::size_t>();
    if (j.contains("k2")) base.k2 = j.at("k2").get<std::size_t>();
    if (j.contains("power_iters")) base.power_iters = j.at("power_iters").get<int>();
    if (j.contains("power_tol")) base.power_tol = j.at("power_tol").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad config value: ") + e.what());
  }
  base.validate();
  return base;
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw io_error("write failed for " + path.string());
}

}  // namespace sc2pcr::harness
