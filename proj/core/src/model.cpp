#include "pardyn/model.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace pardyn {

namespace {

bool exact_eq(const Vec3& a, const Vec3& b) {
  return (a.array() == b.array()).all();
}
bool exact_eq(const Mat3& a, const Mat3& b) {
  return (a.array() == b.array()).all();
}

// Uniform draws built directly on the raw 64-bit stream so the values do
// not depend on the standard library's distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  Vec3 unit_vector() {
    const double z = uniform(-1.0, 1.0);
    const double phi = uniform(0.0, 2.0 * M_PI);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
  }

  Mat3 rotation() {
    // Uniform unit quaternion (Shoemake's subgroup method).
    const double u1 = uniform();
    const double a2 = uniform(0.0, 2.0 * M_PI);
    const double a3 = uniform(0.0, 2.0 * M_PI);
    const double s1 = std::sqrt(1.0 - u1);
    const double s2 = std::sqrt(u1);
    Eigen::Quaterniond quat(s2 * std::cos(a3),          // w
                            s1 * std::sin(a2),          // x
                            s1 * std::cos(a2),          // y
                            s2 * std::sin(a3));         // z
    return quat.toRotationMatrix();
  }

 private:
  std::mt19937_64 eng_;
};

std::string link_prefix(int k) { return "link " + std::to_string(k); }

}  // namespace

bool operator==(const LinkSpec& a, const LinkSpec& b) {
  return a.mass == b.mass && exact_eq(a.com, b.com) &&
         exact_eq(a.inertia_rot, b.inertia_rot) &&
         exact_eq(a.joint_screw.angular, b.joint_screw.angular) &&
         exact_eq(a.joint_screw.linear, b.joint_screw.linear) &&
         exact_eq(a.home_transform.rotation, b.home_transform.rotation) &&
         exact_eq(a.home_transform.translation, b.home_transform.translation);
}

bool operator==(const RobotChain& a, const RobotChain& b) {
  return a.links == b.links && exact_eq(a.gravity, b.gravity);
}

void validate_chain(const RobotChain& chain) {
  if (chain.links.empty()) {
    throw ModelError("chain must have at least one link");
  }
  if (!chain.gravity.allFinite()) {
    throw ModelError("gravity must be finite");
  }
  for (int k = 0; k < chain.size(); ++k) {
    const LinkSpec& link = chain.links[k];
    if (!(link.mass > 0.0) || !std::isfinite(link.mass)) {
      throw ModelError(link_prefix(k) + ": mass must be positive");
    }
    if (!link.com.allFinite()) {
      throw ModelError(link_prefix(k) + ": com must be finite");
    }
    if (!link.inertia_rot.allFinite() ||
        (link.inertia_rot - link.inertia_rot.transpose()).cwiseAbs().maxCoeff() >
            1e-9 * std::max(1.0, link.inertia_rot.cwiseAbs().maxCoeff())) {
      throw ModelError(link_prefix(k) +
                       ": rotational inertia must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(link.inertia_rot);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
      throw ModelError(link_prefix(k) +
                       ": rotational inertia must be positive definite");
    }
    if (!link.joint_screw.is_finite()) {
      throw ModelError(link_prefix(k) + ": joint_screw must be finite");
    }
    const double norm = link.joint_screw.stacked().norm();
    if (std::abs(norm - 1.0) > 1e-9) {
      throw ModelError(link_prefix(k) + ": joint_screw must have unit norm (got " +
                       std::to_string(norm) + ")");
    }
    if (!link.home_transform.is_valid(1e-9)) {
      throw ModelError(link_prefix(k) +
                       ": home_transform rotation must be orthonormal with "
                       "determinant +1");
    }
  }
}

ChainKinematics assemble_kinematics(const RobotChain& chain,
                                    const JointVector& q) {
  const int n = chain.size();
  if (q.size() != n) {
    throw std::invalid_argument(
        "assemble_kinematics: q has length " + std::to_string(q.size()) +
        " but the chain has " + std::to_string(n) + " joints");
  }

  ChainKinematics kin;
  kin.rel.resize(n);
  kin.screw.resize(n);
  kin.transport.resize(n > 0 ? n - 1 : 0);

  // Joint transforms are independent per link.
#pragma omp parallel for schedule(static) if (n >= 128)
  for (int i = 0; i < n; ++i) {
    const LinkSpec& link = chain.links[i];
    kin.screw[i] = link.joint_screw;
    kin.rel[i] = screw_exp(link.joint_screw, -q[i]) * link.home_transform;
  }

  kin.base_transport = adjoint_of(kin.rel[0]);
  const int m = n - 1;
#pragma omp parallel for schedule(static) if (m >= 128)
  for (int i = 0; i < m; ++i) {
    kin.transport[i] = adjoint_of(kin.rel[i + 1]);
  }
  return kin;
}

std::vector<SpatialInertia> link_inertias(const RobotChain& chain) {
  std::vector<SpatialInertia> out(chain.links.size());
  for (std::size_t i = 0; i < chain.links.size(); ++i) {
    const LinkSpec& link = chain.links[i];
    out[i] = spatial_inertia_from(link.mass, link.com, link.inertia_rot);
  }
  return out;
}

RobotChain random_chain(int n, std::uint64_t seed) {
  if (n < 1) {
    throw std::invalid_argument("random_chain: n must be at least 1");
  }
  Rng rng(seed);

  RobotChain chain;
  chain.links.resize(n);
  for (LinkSpec& link : chain.links) {
    link.mass = rng.uniform(0.1, 10.0);
    link.com = Vec3(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3),
                    rng.uniform(-0.3, 0.3));

    // SPD rotational inertia with a bounded spread of eigenvalues.
    const Mat3 axes = rng.rotation();
    const Vec3 moments(rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0),
                       rng.uniform(0.1, 1.0));
    Mat3 inertia = axes * moments.asDiagonal() * axes.transpose();
    link.inertia_rot = 0.5 * (inertia + inertia.transpose());

    // Revolute screw through the link origin; unit 6-norm by construction.
    link.joint_screw = Twist(rng.unit_vector(), Vec3::Zero());

    link.home_transform.rotation = rng.rotation();
    link.home_transform.translation = rng.uniform(0.1, 1.0) * rng.unit_vector();
  }
  validate_chain(chain);
  return chain;
}

namespace {

using Json = nlohmann::ordered_json;

const Json& need(const Json& j, const char* field, const std::string& where) {
  auto it = j.find(field);
  if (it == j.end()) {
    throw ModelError(where + ": missing field '" + field + "'");
  }
  return *it;
}

double need_number(const Json& j, const char* field, const std::string& where) {
  const Json& v = need(j, field, where);
  if (!v.is_number()) {
    throw ModelError(where + ": field '" + field + "' must be a number");
  }
  return v.get<double>();
}

std::vector<double> need_array(const Json& j, const char* field,
                               std::size_t len, const std::string& where) {
  const Json& v = need(j, field, where);
  if (!v.is_array() || v.size() != len) {
    throw ModelError(where + ": field '" + field + "' must be an array of " +
                     std::to_string(len) + " numbers");
  }
  std::vector<double> out;
  out.reserve(len);
  for (const Json& e : v) {
    if (!e.is_number()) {
      throw ModelError(where + ": field '" + field + "' must contain only numbers");
    }
    out.push_back(e.get<double>());
  }
  return out;
}

Vec3 as_vec3(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

Mat3 as_mat3_rowmajor(const std::vector<double>& v) {
  Mat3 m;
  m << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
  return m;
}

Json vec_to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json mat_to_json_rowmajor(const Mat3& m) {
  Json a = Json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
  return a;
}

}  // namespace

RobotChain load_chain(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ModelError("cannot open model file '" + path + "'");
  }

  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError("model file '" + path + "': " + e.what());
  }

  const std::string where = "model file '" + path + "'";
  const Json& n_field = need(doc, "n", where);
  if (!n_field.is_number_integer()) {
    throw ModelError(where + ": field 'n' must be an integer");
  }
  const int n = n_field.get<int>();

  RobotChain chain;
  chain.gravity = as_vec3(need_array(doc, "gravity", 3, where));

  const Json& links = need(doc, "links", where);
  if (!links.is_array()) {
    throw ModelError(where + ": field 'links' must be an array");
  }
  if (static_cast<int>(links.size()) != n) {
    throw ModelError(where + ": field 'n' (= " + std::to_string(n) +
                     ") does not match the length of 'links' (= " +
                     std::to_string(links.size()) + ")");
  }

  chain.links.resize(links.size());
  for (std::size_t k = 0; k < links.size(); ++k) {
    const Json& j = links[k];
    const std::string lwhere = link_prefix(static_cast<int>(k));
    if (!j.is_object()) {
      throw ModelError(lwhere + ": must be an object");
    }
    LinkSpec& link = chain.links[k];
    link.mass = need_number(j, "mass", lwhere);
    link.com = as_vec3(need_array(j, "com", 3, lwhere));
    link.inertia_rot = as_mat3_rowmajor(need_array(j, "inertia_rot", 9, lwhere));

    const std::vector<double> screw = need_array(j, "joint_screw", 6, lwhere);
    link.joint_screw = Twist(Vec3(screw[0], screw[1], screw[2]),
                             Vec3(screw[3], screw[4], screw[5]));

    const Json& home = need(j, "home_transform", lwhere);
    if (!home.is_object()) {
      throw ModelError(lwhere + ": field 'home_transform' must be an object");
    }
    link.home_transform.rotation =
        as_mat3_rowmajor(need_array(home, "rotation", 9, lwhere));
    link.home_transform.translation =
        as_vec3(need_array(home, "translation", 3, lwhere));
  }

  validate_chain(chain);
  return chain;
}

void save_chain(const RobotChain& chain, const std::string& path) {
  Json doc;
  doc["n"] = chain.size();
  doc["gravity"] = vec_to_json(chain.gravity);
  Json links = Json::array();
  for (const LinkSpec& link : chain.links) {
    Json j;
    j["mass"] = link.mass;
    j["com"] = vec_to_json(link.com);
    j["inertia_rot"] = mat_to_json_rowmajor(link.inertia_rot);
    Json screw = Json::array();
    for (int i = 0; i < 3; ++i) screw.push_back(link.joint_screw.angular[i]);
    for (int i = 0; i < 3; ++i) screw.push_back(link.joint_screw.linear[i]);
    j["joint_screw"] = screw;
    Json home;
    home["rotation"] = mat_to_json_rowmajor(link.home_transform.rotation);
    home["translation"] = vec_to_json(link.home_transform.translation);
    j["home_transform"] = home;
    links.push_back(j);
  }
  doc["links"] = links;

  std::ofstream out(path);
  if (!out) {
    throw ModelError("cannot open model file '" + path + "' for writing");
  }
  out << doc.dump(2) << "\n";
  if (!out) {
    throw ModelError("failed writing model file '" + path + "'");
  }
}

}  // namespace pardyn
