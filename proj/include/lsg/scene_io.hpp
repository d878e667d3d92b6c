#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsg/scene.hpp"

namespace lsg {

namespace ply {

// Activated-parameter storage conventions of trained splat files:
// opacity through a logistic, scales through an exponential.
inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double y) {
  const double eps = 1e-7;
  y = std::min(std::max(y, eps), 1.0 - eps);
  return std::log(y / (1.0 - y));
}

inline const std::vector<std::string>& required_properties() {
  static const std::vector<std::string> props = [] {
    std::vector<std::string> p = {"x", "y", "z", "nx", "ny", "nz",
                                  "f_dc_0", "f_dc_1", "f_dc_2"};
    for (int i = 0; i < 45; ++i) p.push_back("f_rest_" + std::to_string(i));
    p.push_back("opacity");
    for (int i = 0; i < 3; ++i) p.push_back("scale_" + std::to_string(i));
    for (int i = 0; i < 4; ++i) p.push_back("rot_" + std::to_string(i));
    return p;
  }();
  return props;
}

inline std::size_t property_size(const std::string& type) {
  if (type == "char" || type == "uchar" || type == "int8" || type == "uint8")
    return 1;
  if (type == "short" || type == "ushort" || type == "int16" ||
      type == "uint16")
    return 2;
  if (type == "int" || type == "uint" || type == "int32" || type == "uint32" ||
      type == "float" || type == "float32")
    return 4;
  if (type == "double" || type == "float64" || type == "int64" ||
      type == "uint64")
    return 8;
  return 0;
}

inline float read_le_float(const unsigned char* p) {
  std::uint32_t u = static_cast<std::uint32_t>(p[0]) |
                    static_cast<std::uint32_t>(p[1]) << 8 |
                    static_cast<std::uint32_t>(p[2]) << 16 |
                    static_cast<std::uint32_t>(p[3]) << 24;
  return std::bit_cast<float>(u);
}

inline void write_le_float(unsigned char* p, float f) {
  std::uint32_t u = std::bit_cast<std::uint32_t>(f);
  p[0] = static_cast<unsigned char>(u & 0xff);
  p[1] = static_cast<unsigned char>((u >> 8) & 0xff);
  p[2] = static_cast<unsigned char>((u >> 16) & 0xff);
  p[3] = static_cast<unsigned char>((u >> 24) & 0xff);
}

}  // namespace ply

// Reads a trained splat model in the binary little-endian PLY layout
// (x,y,z, nx,ny,nz, f_dc_0..2, f_rest_0..44, opacity, scale_0..2, rot_0..3,
// all float32). Properties may appear in any order; unknown extras are
// skipped by stride.
template <typename S>
GaussianSet<S> load_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_ply: cannot open " + path);

  auto fail = [&](int line_no, const std::string& line, const std::string& why) {
    std::ostringstream os;
    os << "load_ply: parse error at header line " << line_no << " ('" << line
       << "'): " << why;
    throw std::runtime_error(os.str());
  };

  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    return true;
  };

  if (!next_line() || line != "ply") fail(line_no, line, "expected 'ply'");
  if (!next_line() || line != "format binary_little_endian 1.0")
    fail(line_no, line, "expected 'format binary_little_endian 1.0'");

  std::size_t vertex_count = 0;
  bool in_vertex = false, seen_vertex = false, ended = false;
  struct Prop { std::string name; std::size_t offset; bool is_float; };
  std::vector<Prop> props;
  std::size_t stride = 0;

  while (next_line()) {
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "comment" || tok == "obj_info" || tok.empty()) continue;
    if (tok == "end_header") { ended = true; break; }
    if (tok == "element") {
      std::string name;
      long long n = -1;
      ls >> name >> n;
      if (name.empty() || n < 0) fail(line_no, line, "bad element declaration");
      if (name == "vertex") {
        if (seen_vertex) fail(line_no, line, "duplicate vertex element");
        seen_vertex = in_vertex = true;
        vertex_count = static_cast<std::size_t>(n);
      } else {
        if (!seen_vertex)
          fail(line_no, line, "element '" + name + "' precedes vertex data");
        in_vertex = false;  // trailing elements are ignored
      }
      continue;
    }
    if (tok == "property") {
      std::string type, name;
      ls >> type;
      if (type == "list") fail(line_no, line, "list properties unsupported");
      ls >> name;
      const std::size_t sz = ply::property_size(type);
      if (sz == 0 || name.empty()) fail(line_no, line, "bad property");
      if (in_vertex) {
        props.push_back({name, stride, type == "float" || type == "float32"});
        stride += sz;
      }
      continue;
    }
    fail(line_no, line, "unrecognized keyword '" + tok + "'");
  }
  if (!ended) fail(line_no, line, "missing end_header");
  if (!seen_vertex) fail(line_no, line, "missing vertex element");

  // Map required properties to byte offsets.
  const auto& req = ply::required_properties();
  std::vector<std::size_t> offsets(req.size());
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < req.size(); ++i) {
    bool found = false;
    for (const auto& p : props) {
      if (p.name == req[i]) {
        if (!p.is_float)
          throw std::runtime_error("load_ply: schema error: property '" +
                                   req[i] + "' must be float32");
        offsets[i] = p.offset;
        found = true;
        break;
      }
    }
    if (!found) missing.push_back(req[i]);
  }
  if (!missing.empty()) {
    std::ostringstream os;
    os << "load_ply: schema error: missing properties:";
    for (const auto& m : missing) os << ' ' << m;
    os << "; expected:";
    for (const auto& r : req) os << ' ' << r;
    throw std::runtime_error(os.str());
  }

  std::vector<unsigned char> data(vertex_count * stride);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size()));
  if (static_cast<std::size_t>(in.gcount()) != data.size())
    throw std::runtime_error("load_ply: truncated vertex data in " + path);

  GaussianSet<S> set;
  set.sh_degree = 3;
  set.gaussians.resize(vertex_count);
  for (std::size_t v = 0; v < vertex_count; ++v) {
    const unsigned char* rec = data.data() + v * stride;
    float raw[62];
    for (std::size_t i = 0; i < req.size(); ++i) {
      raw[i] = ply::read_le_float(rec + offsets[i]);
      if (std::isnan(raw[i]))
        throw std::runtime_error("load_ply: NaN field '" + req[i] +
                                 "' at vertex " + std::to_string(v));
    }
    Gaussian3<S>& g = set.gaussians[v];
    g.position = Vec3<S>(S(raw[0]), S(raw[1]), S(raw[2]));
    for (int ch = 0; ch < 3; ++ch) g.sh(0, ch) = S(raw[6 + ch]);
    // f_rest is stored channel-major: 15 coefficients for r, then g, then b.
    for (int j = 0; j < 45; ++j) g.sh(1 + j % 15, j / 15) = S(raw[9 + j]);
    g.opacity = S(ply::logistic(raw[54]));
    for (int a = 0; a < 3; ++a) {
      g.scale[a] = S(std::exp(static_cast<double>(raw[55 + a])));
      if (!(g.scale[a] > S(0)))
        throw std::runtime_error("load_ply: non-positive scale at vertex " +
                                 std::to_string(v));
    }
    // rot_0..rot_3 = (w, x, y, z)
    Quat<S> q(S(raw[58]), S(raw[59]), S(raw[60]), S(raw[61]));
    const S n = q.norm();
    if (!(n > S(1e-12)))
      throw std::runtime_error("load_ply: degenerate quaternion at vertex " +
                               std::to_string(v));
    q.coeffs() /= n;
    g.rotation = q;
  }
  return set;
}

template <typename S>
void save_ply(const GaussianSet<S>& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_ply: cannot open " + path);
  const auto& req = ply::required_properties();
  out << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << set.gaussians.size() << "\n";
  for (const auto& name : req) out << "property float " << name << "\n";
  out << "end_header\n";

  std::vector<unsigned char> rec(req.size() * 4);
  for (const auto& g : set.gaussians) {
    float raw[62];
    for (int a = 0; a < 3; ++a) raw[a] = static_cast<float>(g.position[a]);
    raw[3] = raw[4] = raw[5] = 0.0f;  // normals unused
    for (int ch = 0; ch < 3; ++ch) raw[6 + ch] = static_cast<float>(g.sh(0, ch));
    for (int j = 0; j < 45; ++j)
      raw[9 + j] = static_cast<float>(g.sh(1 + j % 15, j / 15));
    raw[54] = static_cast<float>(ply::logit(static_cast<double>(g.opacity)));
    for (int a = 0; a < 3; ++a)
      raw[55 + a] = static_cast<float>(std::log(static_cast<double>(g.scale[a])));
    raw[58] = static_cast<float>(g.rotation.w());
    raw[59] = static_cast<float>(g.rotation.x());
    raw[60] = static_cast<float>(g.rotation.y());
    raw[61] = static_cast<float>(g.rotation.z());
    for (std::size_t i = 0; i < req.size(); ++i)
      ply::write_le_float(rec.data() + i * 4, raw[i]);
    out.write(reinterpret_cast<const char*>(rec.data()),
              static_cast<std::streamsize>(rec.size()));
  }
  if (!out) throw std::runtime_error("save_ply: write failure on " + path);
}

// Key-pose / trajectory JSON:
// {"fps", "v_max", "omega_max", "poses":[{"rotation":[9 row-major],
//  "translation":[3], "fx","fy","cx","cy","width","height","near"}]}
template <typename S>
struct TrajectoryFile {
  std::vector<CameraPose<S>> poses;
  S fps = S(90);
  S v_max = S(1.8);
  S omega_max = S(90);
};

template <typename S>
TrajectoryFile<S> load_trajectory_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_trajectory: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("load_trajectory: bad JSON in " + path + ": " +
                             e.what());
  }
  TrajectoryFile<S> tf;
  tf.fps = S(j.value("fps", 90.0));
  tf.v_max = S(j.value("v_max", 1.8));
  tf.omega_max = S(j.value("omega_max", 90.0));
  if (!j.contains("poses") || !j["poses"].is_array() || j["poses"].empty())
    throw std::runtime_error("load_trajectory: no poses in " + path);
  for (const auto& jp : j["poses"]) {
    CameraPose<S> p;
    const auto& r = jp.at("rotation");
    const auto& t = jp.at("translation");
    if (r.size() != 9 || t.size() != 3)
      throw std::runtime_error("load_trajectory: pose needs 9+3 floats");
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) p.rotation(i, k) = S(r[i * 3 + k].get<double>());
    for (int i = 0; i < 3; ++i) p.translation[i] = S(t[i].get<double>());
    if ((p.rotation.transpose() * p.rotation - Mat3<S>::Identity())
            .cwiseAbs().maxCoeff() > S(1e-6))
      throw std::runtime_error("load_trajectory: rotation not orthonormal");
    p.fx = S(jp.at("fx").get<double>());
    p.fy = S(jp.at("fy").get<double>());
    p.cx = S(jp.at("cx").get<double>());
    p.cy = S(jp.at("cy").get<double>());
    p.width = pad_to_tile(jp.at("width").get<int>());
    p.height = pad_to_tile(jp.at("height").get<int>());
    if (p.width <= 0 || p.height <= 0)
      throw std::runtime_error("load_trajectory: non-positive image size");
    p.near_clip = S(jp.value("near", 0.01));
    tf.poses.push_back(p);
  }
  return tf;
}

template <typename S>
void save_trajectory_json(const TrajectoryFile<S>& tf, const std::string& path) {
  nlohmann::json j;
  j["fps"] = static_cast<double>(tf.fps);
  j["v_max"] = static_cast<double>(tf.v_max);
  j["omega_max"] = static_cast<double>(tf.omega_max);
  j["poses"] = nlohmann::json::array();
  for (const auto& p : tf.poses) {
    nlohmann::json jp;
    std::vector<double> r(9), t(3);
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) r[i * 3 + k] = static_cast<double>(p.rotation(i, k));
    for (int i = 0; i < 3; ++i) t[i] = static_cast<double>(p.translation[i]);
    jp["rotation"] = r;
    jp["translation"] = t;
    jp["fx"] = static_cast<double>(p.fx);
    jp["fy"] = static_cast<double>(p.fy);
    jp["cx"] = static_cast<double>(p.cx);
    jp["cy"] = static_cast<double>(p.cy);
    jp["width"] = p.width;
    jp["height"] = p.height;
    jp["near"] = static_cast<double>(p.near_clip);
    j["poses"].push_back(jp);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_trajectory: cannot open " + path);
  out << j.dump(2) << "\n";
}

}  // namespace lsg
