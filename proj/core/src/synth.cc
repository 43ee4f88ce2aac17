#include "vlbench/synth.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include <Eigen/QR>

#include "vlbench/gt_ranking.h"
#include "vlbench/random.h"

namespace vlbench {
namespace {

enum Stream : std::uint64_t {
  kDbPoses = 1,
  kQueryPoses,
  kPoints,
  kObservationNoise,
  kEmbedding,
  kDescriptorNoise,
  kMatches,
  kChallenge,
};

// Camera looking horizontally along `yaw` (world z up, camera y down), then
// tilted by small pitch and roll.
Eigen::Quaterniond CameraRotation(double yaw, double pitch, double roll) {
  Eigen::Matrix3d r;
  r.row(0) << std::sin(yaw), -std::cos(yaw), 0.0;
  r.row(1) << 0.0, 0.0, -1.0;
  r.row(2) << std::cos(yaw), std::sin(yaw), 0.0;
  const Eigen::Matrix3d tilt =
      (Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitZ()) *
       Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitX()))
          .toRotationMatrix();
  Eigen::Quaterniond q(tilt * r);
  q.normalize();
  return q;
}

std::vector<Pose> DatabasePoses(const SynthConfig& cfg, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> quarter(0, 3);
  const double s = cfg.spacing_m;
  std::vector<Pose> poses;
  poses.reserve(cfg.n_db);
  const auto cols = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(cfg.n_db))));
  const std::size_t per_lap = (cfg.n_db + 1) / 2;
  const double circumference = static_cast<double>(per_lap) * s;
  const double radius = std::max(circumference / (2.0 * kPi), 8.0);

  for (std::size_t i = 0; i < cfg.n_db; ++i) {
    Pose p;
    double yaw = 0.0;
    switch (cfg.layout) {
      case SceneLayout::kGrid: {
        p.center = {static_cast<double>(i % cols) * s + 0.1 * s * gauss(rng),
                    static_cast<double>(i / cols) * s + 0.1 * s * gauss(rng),
                    0.1 * gauss(rng)};
        yaw = quarter(rng) * 0.5 * kPi + DegToRad(10.0) * gauss(rng);
        break;
      }
      case SceneLayout::kCorridor: {
        p.center = {static_cast<double>(i) * s, 0.0, 0.0};
        yaw = DegToRad(2.0) * gauss(rng);
        break;
      }
      case SceneLayout::kLoop: {
        const double phi = 2.0 * kPi * static_cast<double>(i % per_lap) /
                           static_cast<double>(per_lap);
        const double r = radius + (i < per_lap ? 0.0 : 1.0);
        p.center = {r * std::cos(phi), r * std::sin(phi), 0.1 * gauss(rng)};
        yaw = phi + 0.5 * kPi + DegToRad(5.0) * gauss(rng);
        break;
      }
    }
    p.rotation = CameraRotation(yaw, DegToRad(2.0) * gauss(rng),
                                DegToRad(2.0) * gauss(rng));
    poses.push_back(p);
  }
  return poses;
}

double Yaw(const Pose& pose) {
  // Optical axis in world coordinates.
  const Eigen::Vector3d axis = pose.rotation.conjugate() * Eigen::Vector3d::UnitZ();
  return std::atan2(axis.y(), axis.x());
}

Pose QueryNear(const Pose& anchor, const SynthConfig& cfg, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  GtConfig relevance;
  for (int attempt = 0; attempt < 100; ++attempt) {
    Pose q;
    const double lateral = cfg.layout == SceneLayout::kCorridor ? 0.2 : 1.0;
    q.center = anchor.center + Eigen::Vector3d(cfg.query_offset_m * gauss(rng),
                                               lateral * cfg.query_offset_m * gauss(rng),
                                               0.1 * gauss(rng));
    q.rotation = CameraRotation(Yaw(anchor) + DegToRad(cfg.query_yaw_deg) * gauss(rng),
                                DegToRad(2.0) * gauss(rng),
                                DegToRad(2.0) * gauss(rng));
    if (IsRelevantRelativePose(q, anchor, relevance)) return q;
  }
  throw InvalidArgument("query offsets too large to stay near the database");
}

bool Visible(const Pose& pose, const CameraIntrinsics& intr,
             const Eigen::Vector3d& x, double max_depth,
             Eigen::Vector2d* pixel) {
  const double depth = pose.WorldToCamera(x).z();
  if (depth < 0.5 || depth > max_depth) return false;
  const auto uv = Project(x, pose, intr);
  if (!uv || !intr.Contains(*uv)) return false;
  *pixel = *uv;
  return true;
}

}  // namespace

std::string_view ToString(SceneLayout layout) {
  switch (layout) {
    case SceneLayout::kGrid: return "grid";
    case SceneLayout::kCorridor: return "corridor";
    case SceneLayout::kLoop: return "loop";
  }
  return "grid";
}

SceneLayout ParseSceneLayout(std::string_view name) {
  if (name == "grid") return SceneLayout::kGrid;
  if (name == "corridor") return SceneLayout::kCorridor;
  if (name == "loop") return SceneLayout::kLoop;
  throw InvalidArgument("unknown layout '" + std::string(name) + "'");
}

std::string_view ToString(DescriptorMode mode) {
  switch (mode) {
    case DescriptorMode::kPoseOracle: return "pose_oracle";
    case DescriptorMode::kPosePlusNoise: return "pose_plus_noise";
    case DescriptorMode::kAdversarial: return "adversarial";
  }
  return "pose_oracle";
}

DescriptorMode ParseDescriptorMode(std::string_view name) {
  if (name == "pose_oracle") return DescriptorMode::kPoseOracle;
  if (name == "pose_plus_noise") return DescriptorMode::kPosePlusNoise;
  if (name == "adversarial") return DescriptorMode::kAdversarial;
  throw InvalidArgument("unknown descriptor mode '" + std::string(name) + "'");
}

SynthScene GenerateScene(const SynthConfig& cfg) {
  if (cfg.n_db < 2) throw InvalidArgument("need at least 2 database images");
  if (cfg.n_points < 8) throw InvalidArgument("need at least 8 points");
  if (cfg.n_missing > cfg.n_query) {
    throw InvalidArgument("more missing queries than queries");
  }
  if (!(cfg.spacing_m >= 0.0) ||
      (cfg.spacing_m == 0.0 && cfg.layout != SceneLayout::kCorridor)) {
    throw InvalidArgument("spacing must be positive for this layout");
  }
  if (!(cfg.min_depth_m > 0.5 && cfg.max_depth_m > cfg.min_depth_m)) {
    throw InvalidArgument("depth range must satisfy 0.5 < min < max");
  }
  if (cfg.pixel_noise < 0.0) throw InvalidArgument("negative pixel noise");
  cfg.intrinsics.Validate();

  SynthScene out;
  out.config = cfg;
  const CameraIntrinsics& intr = cfg.intrinsics;

  auto db_rng = MakeRng(cfg.seed, {kDbPoses});
  const std::vector<Pose> db_poses = DatabasePoses(cfg, db_rng);
  for (std::size_t i = 0; i < cfg.n_db; ++i) {
    const ImageId id(i + 1);
    out.scene.AddImage(id, {db_poses[i], intr});
    out.database.push_back(id);
  }

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const Pose& p : db_poses) centroid += p.center;
  centroid /= static_cast<double>(db_poses.size());
  double extent = 0.0;
  for (const Pose& p : db_poses) extent = std::max(extent, (p.center - centroid).norm());

  auto q_rng = MakeRng(cfg.seed, {kQueryPoses});
  std::uniform_int_distribution<std::size_t> pick_db(0, cfg.n_db - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n_regular = cfg.n_query - cfg.n_missing;
  for (std::size_t i = 0; i < cfg.n_query; ++i) {
    const ImageId id(cfg.n_db + i + 1);
    Pose pose;
    if (i < n_regular) {
      pose = QueryNear(db_poses[pick_db(q_rng)], cfg, q_rng);
    } else {
      // Far beyond every frustum, point and relevance radius.
      const double far = 10.0 * (extent + cfg.max_depth_m) + 1000.0;
      pose.center = centroid + Eigen::Vector3d(far, 100.0 * static_cast<double>(i), 0.0);
      pose.rotation = CameraRotation(2.0 * kPi * unit(q_rng), 0.0, 0.0);
      out.missing.push_back(id);
    }
    out.scene.AddImage(id, {pose, intr});
    out.queries.push_back(id);
  }

  // Points back-projected from database cameras; kept when at least two
  // database images see them.
  auto pt_rng = MakeRng(cfg.seed, {kPoints});
  auto noise_rng = MakeRng(cfg.seed, {kObservationNoise});
  std::uniform_real_distribution<double> px(0.0, static_cast<double>(intr.width));
  std::uniform_real_distribution<double> py(0.0, static_cast<double>(intr.height));
  std::uniform_real_distribution<double> depth(cfg.min_depth_m, cfg.max_depth_m);
  std::normal_distribution<double> pixel_noise(0.0, 1.0);
  const std::size_t max_attempts = 200 * cfg.n_points;
  std::size_t accepted = 0;
  std::vector<std::pair<ImageId, Eigen::Vector2d>> seen;
  for (std::size_t attempt = 0; accepted < cfg.n_points; ++attempt) {
    if (attempt >= max_attempts) {
      throw InvalidArgument("layout cannot host " + std::to_string(cfg.n_points) +
                            " points seen by two database images (placed " +
                            std::to_string(accepted) + ")");
    }
    const Pose& source = db_poses[pick_db(pt_rng)];
    const Eigen::Vector3d ray((px(pt_rng) - intr.cx) / intr.fx,
                              (py(pt_rng) - intr.cy) / intr.fy, 1.0);
    const Eigen::Vector3d x = source.CameraToWorld(depth(pt_rng) * ray);

    seen.clear();
    std::size_t db_views = 0;
    for (const auto& [id, record] : out.scene.Images()) {
      Eigen::Vector2d uv;
      if (Visible(record.pose, intr, x, cfg.max_depth_m, &uv)) {
        seen.emplace_back(id, uv);
        if (id.value <= cfg.n_db) ++db_views;
      }
    }
    if (db_views < 2) continue;

    const PointId pid(++accepted);
    out.scene.AddPoint(pid, x);
    for (auto& [id, uv] : seen) {
      if (cfg.pixel_noise > 0.0) {
        uv += cfg.pixel_noise *
              Eigen::Vector2d(pixel_noise(noise_rng), pixel_noise(noise_rng));
      }
      out.scene.AddObservation({id, pid, uv});
    }
  }
  return out;
}

DescriptorTable EmitDescriptors(const SynthScene& scene,
                                const DescriptorModel& model,
                                std::uint64_t seed) {
  constexpr Eigen::Index kPoseDims = 13;
  const auto dim = static_cast<Eigen::Index>(model.dimension);
  if (dim < kPoseDims) {
    throw InvalidArgument("descriptor dimension must be at least 13");
  }
  if (model.noise_sigma < 0.0) throw InvalidArgument("negative descriptor noise");

  auto embed_rng = MakeRng(seed, {kEmbedding});
  auto noise_rng = MakeRng(seed, {kDescriptorNoise});
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::MatrixXd g(dim, kPoseDims);
  for (Eigen::Index c = 0; c < g.cols(); ++c) {
    for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, c) = gauss(embed_rng);
  }
  const Eigen::MatrixXd basis =
      Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ() *
      Eigen::MatrixXd::Identity(dim, kPoseDims);

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (ImageId id : scene.database) centroid += scene.scene.Image(id).pose.center;
  if (!scene.database.empty()) centroid /= static_cast<double>(scene.database.size());
  const double rot_scale = 1.0 / (std::sqrt(2.0) * DegToRad(model.tau_r_deg));

  DescriptorTable out;
  for (const auto& [id, record] : scene.scene.Images()) {
    Eigen::VectorXd v(dim);
    if (model.mode == DescriptorMode::kAdversarial) {
      for (Eigen::Index i = 0; i < dim; ++i) v[i] = gauss(noise_rng);
    } else {
      Eigen::Matrix<double, kPoseDims, 1> x;
      x.head<3>() = (record.pose.center - centroid) / model.tau_c_m;
      const Eigen::Matrix3d r = record.pose.RotationMatrix();
      x.segment<9>(3) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(r.data()) * rot_scale;
      x[12] = model.anchor;
      v = basis * x;
      v.normalize();
      if (model.mode == DescriptorMode::kPosePlusNoise && model.noise_sigma > 0.0) {
        for (Eigen::Index i = 0; i < dim; ++i) v[i] += model.noise_sigma * gauss(noise_rng);
      }
    }
    v.normalize();
    out[id] = v.cast<float>().cast<double>();
  }
  return out;
}

MatchStore EmitMatches(const SynthScene& scene, std::span<const ImagePair> pairs,
                       const MatchNoise& noise, std::uint64_t seed) {
  if (!(noise.outlier_ratio >= 0.0 && noise.outlier_ratio < 1.0)) {
    throw InvalidArgument("outlier ratio must lie in [0, 1)");
  }
  std::map<ImageId, std::map<PointId, Eigen::Vector2d>> pixels;
  for (const Observation& o : scene.scene.Observations()) {
    pixels[o.image].emplace(o.point, o.pixel);
  }
  const std::map<PointId, Eigen::Vector2d> none;
  auto pixels_of = [&](ImageId id) -> const std::map<PointId, Eigen::Vector2d>& {
    const auto it = pixels.find(id);
    return it == pixels.end() ? none : it->second;
  };

  MatchStore store;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const auto& [a, b] : pairs) {
    if (!scene.scene.HasImage(a) || !scene.scene.HasImage(b) || a == b) {
      throw InvalidArgument("match pair references unknown or identical images");
    }
    auto rng = MakeRng(seed, {kMatches, a.value, b.value});
    const auto& pa = pixels_of(a);
    const auto& pb = pixels_of(b);
    std::size_t inliers = 0;
    for (const auto& [point, uv_a] : pa) {
      const auto it = pb.find(point);
      if (it == pb.end()) continue;
      Eigen::Vector2d noisy = uv_a;
      if (noise.inlier_noise_px > 0.0) {
        noisy += noise.inlier_noise_px * Eigen::Vector2d(gauss(rng), gauss(rng));
      }
      store.Add(a, noisy, b, it->second);
      ++inliers;
    }

    std::size_t outliers = 0;
    if (noise.outlier_ratio > 0.0) {
      outliers = inliers == 0
                     ? noise.min_outliers
                     : static_cast<std::size_t>(std::llround(
                           static_cast<double>(inliers) * noise.outlier_ratio /
                           (1.0 - noise.outlier_ratio)));
    }
    const CameraIntrinsics& ia = scene.scene.Image(a).intrinsics;
    const CameraIntrinsics& ib = scene.scene.Image(b).intrinsics;
    std::uniform_real_distribution<double> ax(0.0, ia.width), ay(0.0, ia.height);
    std::uniform_real_distribution<double> bx(0.0, ib.width), by(0.0, ib.height);
    std::vector<Eigen::Vector2d> b_pixels;
    for (const auto& [point, uv] : pb) b_pixels.push_back(uv);
    for (std::size_t i = 0; i < outliers; ++i) {
      const Eigen::Vector2d uv_a(ax(rng), ay(rng));
      Eigen::Vector2d uv_b;
      if (b_pixels.empty()) {
        uv_b = {bx(rng), by(rng)};
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, b_pixels.size() - 1);
        uv_b = b_pixels[pick(rng)];
      }
      store.Add(a, uv_a, b, uv_b);
    }
  }
  return store;
}

std::vector<ImagePair> AllScenePairs(const SynthScene& scene) {
  std::vector<ImagePair> pairs;
  for (ImageId q : scene.queries) {
    for (ImageId d : scene.database) pairs.emplace_back(q, d);
  }
  for (std::size_t i = 0; i < scene.database.size(); ++i) {
    for (std::size_t j = i + 1; j < scene.database.size(); ++j) {
      pairs.emplace_back(scene.database[i], scene.database[j]);
    }
  }
  return pairs;
}

}  // namespace vlbench

namespace vlbench {

ChallengeFixtures EmitChallengeFixtures(const SynthScene& scene, std::uint64_t seed,
                                        double blurred_share, double dynamic_share) {
  constexpr std::uint8_t kRoad = 0, kBuilding = 1, kPerson = 2, kCar = 3;
  ChallengeFixtures out;
  out.known_labels = {kRoad, kBuilding, kPerson, kCar};
  out.dynamic_labels = {kPerson, kCar};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (ImageId q : scene.queries) {
    auto rng = MakeRng(seed, {kChallenge, q.value});
    const CameraIntrinsics& intr = scene.scene.Image(q).intrinsics;
    const int w = intr.width;
    const int h = intr.height;

    std::uniform_int_distribution<int> square(6, 12);
    std::uniform_int_distribution<int> phase(0, 11);
    const int s = square(rng);
    const int ox = phase(rng);
    const int oy = phase(rng);
    GrayImage img{w, h, std::vector<double>(static_cast<std::size_t>(w) * h)};
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const bool dark = (((x + ox) / s) + ((y + oy) / s)) % 2 == 0;
        img.pixels[static_cast<std::size_t>(y) * w + x] = dark ? 30.0 : 220.0;
      }
    }
    if (unit(rng) < blurred_share) {
      img = GaussianBlur(img, 4.0);
      out.blurred.insert(q);
    }
    for (double& v : img.pixels) v = std::round(v);  // stored as 8-bit
    out.images.emplace(q, std::move(img));

    LabelMask mask{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, kBuilding)};
    for (int y = h / 2; y < h; ++y) {
      for (int x = 0; x < w; ++x) mask.labels[static_cast<std::size_t>(y) * w + x] = kRoad;
    }
    const bool dynamic = unit(rng) < dynamic_share;
    // Object boxes cover 30-50% of the frame when dynamic, 2-10% otherwise.
    const double area = dynamic ? 0.3 + 0.2 * unit(rng) : 0.02 + 0.08 * unit(rng);
    const int bw = std::min(w, static_cast<int>(std::ceil(std::sqrt(area) * w)));
    const int bh = std::min(h, static_cast<int>(std::ceil(std::sqrt(area) * h)));
    const int x0 = static_cast<int>(unit(rng) * (w - bw));
    const int y0 = static_cast<int>(unit(rng) * (h - bh));
    const std::uint8_t label = unit(rng) < 0.5 ? kPerson : kCar;
    for (int y = y0; y < y0 + bh; ++y) {
      for (int x = x0; x < x0 + bw; ++x) {
        mask.labels[static_cast<std::size_t>(y) * w + x] = label;
      }
    }
    if (dynamic) out.dynamic.insert(q);
    out.masks.emplace(q, std::move(mask));
  }
  return out;
}

Dataset BuildSyntheticDataset(const SynthDatasetConfig& config, SynthScene* scene_out) {
  SynthScene synth = GenerateScene(config.scene);
  const std::uint64_t seed = config.scene.seed;
  Dataset ds;
  ds.scene = synth.scene;
  ds.database = synth.database;
  ds.queries = synth.queries;
  for (const auto& [name, model] : config.features) {
    ds.descriptors.emplace(
        name, EmitDescriptors(synth, model, DeriveSeed(seed, {kDescriptorNoise, StableHash(name)})));
  }
  const std::vector<ImagePair> pairs = AllScenePairs(synth);
  ds.matches = EmitMatches(synth, pairs, config.matches, DeriveSeed(seed, {kMatches}));
  if (config.challenge) {
    ChallengeFixtures fx = EmitChallengeFixtures(synth, DeriveSeed(seed, {kChallenge}));
    ds.images = std::move(fx.images);
    ds.masks = std::move(fx.masks);
    ds.known_labels = std::move(fx.known_labels);
    ds.dynamic_labels = std::move(fx.dynamic_labels);
  }
  if (scene_out != nullptr) *scene_out = std::move(synth);
  return ds;
}

}  // namespace vlbench
