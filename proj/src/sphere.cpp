#include "diraclap/sphere.hpp"

#include <cmath>
#include <map>
#include <string>

#include "diraclap/kernels.hpp"

namespace diraclap {

namespace {

using Vec3 = std::array<double, 3>;

Vec3 normalized(Vec3 v) {
  const double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / r, v[1] / r, v[2] / r};
}

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double angle_between(const Vec3& a, const Vec3& b) { return std::acos(std::clamp(dot3(a, b), -1.0, 1.0)); }

struct Icosahedron {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
};

Icosahedron icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  Icosahedron ico;
  const double raw[12][3] = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                             {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (const auto& v : raw) ico.vertices.push_back(normalized({v[0], v[1], v[2]}));
  ico.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
               {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
               {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  return ico;
}

// Frequency-f geodesic subdivision: points a + (i/f)(b - a) + (j/f)(c - a), projected.
// Returns unique centers and the largest circumradius of the projected sub-triangles.
std::pair<std::vector<Vec3>, double> geodesic(int f) {
  const Icosahedron ico = icosahedron();
  std::vector<Vec3> points;
  std::map<std::array<long long, 3>, int> index;
  auto key_of = [](const Vec3& p) {
    return std::array<long long, 3>{std::llround(p[0] * 1e9), std::llround(p[1] * 1e9), std::llround(p[2] * 1e9)};
  };
  auto add = [&](const Vec3& p) {
    const auto key = key_of(p);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    const int id = static_cast<int>(points.size());
    points.push_back(p);
    index.emplace(key, id);
    return id;
  };
  double max_circ = 0.0;
  for (const auto& face : ico.faces) {
    const Vec3& a = ico.vertices[face[0]];
    const Vec3& b = ico.vertices[face[1]];
    const Vec3& c = ico.vertices[face[2]];
    auto at = [&](int i, int j) {
      Vec3 p;
      for (int k = 0; k < 3; ++k) p[k] = a[k] + (b[k] - a[k]) * i / f + (c[k] - a[k]) * j / f;
      return normalized(p);
    };
    for (int i = 0; i <= f; ++i)
      for (int j = 0; i + j <= f; ++j) add(at(i, j));
    auto circ = [&](const Vec3& p, const Vec3& q, const Vec3& r) {
      Vec3 d1{q[0] - p[0], q[1] - p[1], q[2] - p[2]}, d2{r[0] - p[0], r[1] - p[1], r[2] - p[2]};
      Vec3 nrm = normalized(cross3(d1, d2));
      if (dot3(nrm, p) < 0.0) nrm = {-nrm[0], -nrm[1], -nrm[2]};
      return angle_between(nrm, p);
    };
    for (int i = 0; i < f; ++i) {
      for (int j = 0; i + j < f; ++j) {
        max_circ = std::max(max_circ, circ(at(i, j), at(i + 1, j), at(i, j + 1)));
        if (i + j + 2 <= f) max_circ = std::max(max_circ, circ(at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)));
      }
    }
  }
  return {points, max_circ};
}

}  // namespace

SpherePartition::SpherePartition(int n, double delta) : n_(n), delta_(delta) {
  if (n != 2 && n != 3) throw ValidationError("sphere partitions are implemented for n = 2, 3");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("partition width delta must lie in (0, 1)");
  if (n == 2) {
    const double count = std::ceil(2.0 * kPi / delta - 1e-12);
    if (count > kMaxCaps) throw ValidationError("delta produces more than 10^4 caps");
    const int N = static_cast<int>(count);
    const double spacing = 2.0 * kPi / N;
    for (int i = 0; i < N; ++i) centers_.push_back({std::cos(i * spacing), std::sin(i * spacing), 0.0});
    inner_ = 0.45 * spacing;
    outer_ = 0.55 * spacing;
  } else {
    // Smallest frequency whose caps (radius 1.1 x covering radius) have diameter <= 1.2 delta.
    for (int f = 1;; ++f) {
      if (10 * f * f + 2 > kMaxCaps) throw ValidationError("delta produces more than 10^4 caps");
      auto [pts, cover] = geodesic(f);
      if (2.0 * 1.1 * cover <= 1.2 * delta) {
        centers_ = std::move(pts);
        inner_ = 0.5 * cover;
        outer_ = 1.1 * cover;
        break;
      }
    }
  }
}

double SpherePartition::bump(double angle) const {
  return 1.0 - smoothstep((angle - inner_) / (outer_ - inner_));
}

std::vector<double> SpherePartition::weights(std::span<const double> omega) const {
  Vec3 w{0.0, 0.0, 0.0};
  for (int k = 0; k < n_; ++k) w[k] = omega[k];
  w = normalized(w);
  std::vector<double> b(centers_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    b[i] = bump(angle_between(w, centers_[i]));
    total += b[i];
  }
  for (double& v : b) v /= total;
  return b;
}

double SpherePartition::weight(int i, std::span<const double> omega) const {
  if (i < 0 || i >= count()) throw ValidationError("cap index " + std::to_string(i) + " out of range");
  Vec3 w{0.0, 0.0, 0.0};
  for (int k = 0; k < n_; ++k) w[k] = omega[k];
  w = normalized(w);
  const double own = bump(angle_between(w, centers_[i]));
  if (own == 0.0) return 0.0;
  double total = 0.0;
  for (const auto& c : centers_) {
    const double a = angle_between(w, c);
    if (a < outer_) total += bump(a);
  }
  return own / total;
}

double SpherePartition::center_angle(int i, int j) const { return angle_between(centers_.at(i), centers_.at(j)); }

double SpherePartition::separation(int i, int j) const {
  return std::max(0.0, center_angle(i, j) - 2.0 * outer_);
}

}  // namespace diraclap
