#pragma once

// Independent reference implementations shared by unit and acceptance tests.

#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "vlbench/challenge.h"
#include "vlbench/geometry.h"
#include "vlbench/pnp.h"
#include "vlbench/types.h"

namespace vlbench::testing {

// Direct evaluation of the sample correlation formula.
inline double DirectPearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Ranks by counting: 1 + #smaller + (#equal - 1) / 2.
inline std::vector<double> DirectRanks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double x : v) {
      less += x < v[i];
      equal += x == v[i];
    }
    r[i] = 1 + less + (equal - 1) / 2;
  }
  return r;
}

inline double OraclePrecision(const std::vector<ImageId>& ranking, const std::set<ImageId>& rel,
                              std::size_t k) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k && i < ranking.size(); ++i) hits += rel.count(ranking[i]);
  return static_cast<double>(hits) / static_cast<double>(k);
}

inline double OracleAp(const std::vector<ImageId>& ranking, const std::set<ImageId>& rel) {
  double sum = 0.0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (rel.count(ranking[i])) sum += OraclePrecision(ranking, rel, i + 1);
  }
  return sum / static_cast<double>(rel.size());
}

inline GrayImage Checkerboard(int size, int square, double lo = 0.0, double hi = 255.0) {
  GrayImage img{size, size, std::vector<double>(static_cast<std::size_t>(size * size))};
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      img.pixels[static_cast<std::size_t>(y * size + x)] = ((x / square + y / square) % 2) ? hi : lo;
    }
  }
  return img;
}

// Exact correspondences: uniform pixels back-projected to depths in [4, 24].
inline std::vector<Correspondence2D3D> SynthesizeCorrespondences(std::mt19937_64& rng,
                                                                 const Pose& pose,
                                                                 const CameraIntrinsics& k,
                                                                 int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Correspondence2D3D> out;
  while (static_cast<int>(out.size()) < n) {
    const double depth = 4.0 + 20.0 * u(rng);
    const Eigen::Vector2d px(u(rng) * k.width, u(rng) * k.height);
    const Eigen::Vector3d local((px.x() - k.cx) / k.fx * depth, (px.y() - k.cy) / k.fy * depth,
                                depth);
    out.push_back({px, pose.CameraToWorld(local)});
  }
  return out;
}

}  // namespace vlbench::testing
