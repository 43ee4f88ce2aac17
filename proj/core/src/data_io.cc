#include "vlbench/data_io.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "vlbench/text_format.h"

namespace fs = std::filesystem;

namespace vlbench {
namespace {

constexpr std::array<char, 8> kDescriptorMagic = {'V', 'L', 'B', 'D', 'E', 'S', 'C', '1'};

std::ofstream OpenForWrite(const fs::path& path,
                           std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void CheckWritten(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// Field access with errors that carry the file and line.
class Parser {
 public:
  explicit Parser(const fs::path& path) : path_(path), reader_(path) {
    if (!fs::exists(path)) throw MissingFileError(path);
    if (!reader_.is_open()) throw DataError("cannot open " + path.string());
  }

  bool Next(std::size_t min_fields, std::size_t max_fields) {
    if (!reader_.Next(&fields_)) return false;
    if (fields_.size() < min_fields || fields_.size() > max_fields) {
      std::ostringstream msg;
      msg << "expected " << min_fields;
      if (max_fields != min_fields) msg << " to " << max_fields;
      msg << " fields, got " << fields_.size();
      Fail(msg.str());
    }
    return true;
  }
  bool Next(std::size_t n) { return Next(n, n); }

  std::size_t size() const { return fields_.size(); }
  std::string_view Text(std::size_t i) const { return fields_[i]; }

  double Number(std::size_t i) const {
    const auto v = ParseDouble(fields_[i]);
    if (!v) Fail("field " + std::to_string(i + 1) + " is not a finite number: '" +
                 std::string(fields_[i]) + "'");
    return *v;
  }

  std::uint64_t Unsigned(std::size_t i) const {
    const auto v = ParseUint(fields_[i]);
    if (!v) Fail("field " + std::to_string(i + 1) + " is not an unsigned integer: '" +
                 std::string(fields_[i]) + "'");
    return *v;
  }

  int Integer(std::size_t i) const {
    const auto v = ParseInt(fields_[i]);
    if (!v) Fail("field " + std::to_string(i + 1) + " is not an integer: '" +
                 std::string(fields_[i]) + "'");
    return *v;
  }

  [[noreturn]] void Fail(const std::string& what) const {
    throw ParseError(path_, reader_.line_number(), what);
  }

  std::string Where() const {
    return path_.filename().string() + ":" + std::to_string(reader_.line_number());
  }

 private:
  fs::path path_;
  LineReader reader_;
  std::vector<std::string_view> fields_;
};

std::vector<fs::path> SortedEntries(const fs::path& dir, std::string_view ext) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void CheckFeatureName(const std::string& name) {
  const bool ok = !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
  if (!ok) throw InvalidArgument("feature name '" + name + "' is not [A-Za-z0-9_-]+");
}

bool SameIntrinsics(const CameraIntrinsics& a, const CameraIntrinsics& b) {
  return a.fx == b.fx && a.fy == b.fy && a.cx == b.cx && a.cy == b.cy &&
         a.width == b.width && a.height == b.height;
}

std::uint32_t ReadU32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void WriteU32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b = {static_cast<char>(v & 0xff),
                                 static_cast<char>((v >> 8) & 0xff),
                                 static_cast<char>((v >> 16) & 0xff),
                                 static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

LocalizationStatus ParseStatus(const Parser& p, std::string_view text) {
  for (auto s : {LocalizationStatus::kSuccess, LocalizationStatus::kInsufficientMatches,
                 LocalizationStatus::kNoConsensus, LocalizationStatus::kTooFewTracks,
                 LocalizationStatus::kRegistrationFailed}) {
    if (ToString(s) == text) return s;
  }
  p.Fail("unknown localization status '" + std::string(text) + "'");
}

// Reads the next header token of a PNM file, skipping comments.
std::string PnmToken(std::istream& in) {
  std::string token;
  while (in) {
    const int c = in.get();
    if (c == EOF) break;
    if (c == '#') {
      std::string rest;
      std::getline(in, rest);
      if (!token.empty()) break;
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

struct PnmData {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> bytes;
};

PnmData ReadPnmBytes(const fs::path& path) {
  if (!fs::exists(path)) throw MissingFileError(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  PnmData data;
  const std::string magic = PnmToken(in);
  if (magic == "P5") {
    data.channels = 1;
  } else if (magic == "P6") {
    data.channels = 3;
  } else {
    throw ParseError(path, 1, "unsupported image magic '" + magic + "'");
  }
  const auto w = ParseInt(PnmToken(in));
  const auto h = ParseInt(PnmToken(in));
  const auto maxval = ParseInt(PnmToken(in));
  if (!w || !h || !maxval || *w <= 0 || *h <= 0 || *maxval <= 0 || *maxval > 255) {
    throw ParseError(path, 1, "bad image header (8-bit P5/P6 expected)");
  }
  data.width = *w;
  data.height = *h;
  data.bytes.resize(static_cast<std::size_t>(*w) * static_cast<std::size_t>(*h) *
                    static_cast<std::size_t>(data.channels));
  in.read(reinterpret_cast<char*>(data.bytes.data()),
          static_cast<std::streamsize>(data.bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.bytes.size())) {
    throw ParseError(path, 1, "image data truncated");
  }
  return data;
}

void WritePgmBytes(const fs::path& path, int width, int height,
                   const std::vector<std::uint8_t>& bytes) {
  auto out = OpenForWrite(path, std::ios::binary);
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  CheckWritten(out, path);
}

}  // namespace

MissingFileError::MissingFileError(const fs::path& path)
    : DataError("missing file: " + path.string()), path_(path) {}

ParseError::ParseError(const fs::path& file, std::size_t line, const std::string& what)
    : DataError(file.string() + ":" + std::to_string(line) + ": " + what),
      file_(file),
      line_(line) {}

void WriteDescriptorMatrix(const fs::path& bin, const fs::path& ids,
                           const DescriptorTable& table) {
  const std::size_t cols = table.empty() ? 0 : table.begin()->second.size();
  auto out = OpenForWrite(bin, std::ios::binary);
  out.write(kDescriptorMagic.data(), kDescriptorMagic.size());
  WriteU32(out, static_cast<std::uint32_t>(table.size()));
  WriteU32(out, static_cast<std::uint32_t>(cols));
  for (const auto& [id, d] : table) {
    if (static_cast<std::size_t>(d.size()) != cols) {
      throw InvalidArgument("descriptor dimensions differ");
    }
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      WriteU32(out, std::bit_cast<std::uint32_t>(static_cast<float>(d[i])));
    }
  }
  CheckWritten(out, bin);

  auto id_out = OpenForWrite(ids);
  for (const auto& [id, d] : table) id_out << id.value << '\n';
  CheckWritten(id_out, ids);
}

DescriptorTable ReadDescriptorMatrix(const fs::path& bin, const fs::path& ids) {
  std::vector<ImageId> order;
  {
    Parser p(ids);
    while (p.Next(1)) order.emplace_back(p.Unsigned(0));
  }
  if (!fs::exists(bin)) throw MissingFileError(bin);
  std::ifstream in(bin, std::ios::binary);
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kDescriptorMagic) {
    throw ParseError(bin, 0, "bad descriptor magic at byte 0");
  }
  const std::uint32_t rows = ReadU32(in);
  const std::uint32_t cols = ReadU32(in);
  if (!in) throw ParseError(bin, 0, "truncated descriptor header at byte 8");
  const auto expected = 16 + 4 * static_cast<std::uintmax_t>(rows) * cols;
  const auto actual = fs::file_size(bin);
  if (actual != expected) {
    throw ParseError(bin, 0, "descriptor file has " + std::to_string(actual) +
                                 " bytes, header implies " + std::to_string(expected));
  }
  if (rows != order.size()) {
    throw IntegrityError(bin.string() + ": descriptor rows (" + std::to_string(rows) +
                         ") != id count (" + std::to_string(order.size()) + ")");
  }
  DescriptorTable table;
  for (std::uint32_t r = 0; r < rows; ++r) {
    Eigen::VectorXd d(cols);
    for (std::uint32_t c = 0; c < cols; ++c) {
      d[c] = static_cast<double>(std::bit_cast<float>(ReadU32(in)));
    }
    if (!table.emplace(order[r], std::move(d)).second) {
      throw IntegrityError(ids.string() + ": duplicate id " +
                           std::to_string(order[r].value));
    }
  }
  return table;
}

void WriteRanking(const fs::path& path, const Ranking& ranking) {
  auto out = OpenForWrite(path);
  for (const auto& [query, list] : ranking) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      out << query.value << ' ' << list[i].id.value << ' ' << FormatDouble(list[i].score)
          << ' ' << (i + 1) << ' ' << (list[i].relevant ? 1 : 0) << '\n';
    }
  }
  CheckWritten(out, path);
}

Ranking ReadRanking(const fs::path& path) {
  Parser p(path);
  Ranking ranking;
  while (p.Next(4, 5)) {
    const ImageId query(p.Unsigned(0));
    RankedImage r{ImageId(p.Unsigned(1)), p.Number(2), false};
    const std::uint64_t rank = p.Unsigned(3);
    if (p.size() == 5) {
      const std::uint64_t flag = p.Unsigned(4);
      if (flag > 1) p.Fail("relevant flag must be 0 or 1");
      r.relevant = flag == 1;
    }
    auto& list = ranking[query];
    if (rank != list.size() + 1) {
      p.Fail("rank " + std::to_string(rank) + " out of order for query " +
             std::to_string(query.value));
    }
    list.push_back(r);
  }
  return ranking;
}

void WriteMatches(const fs::path& path, const MatchStore& matches) {
  auto out = OpenForWrite(path);
  for (const auto& [pair, list] : matches.Pairs()) {
    for (const PixelMatch& m : list) {
      out << pair.first.value << ' ' << FormatDouble(m.first.x()) << ' '
          << FormatDouble(m.first.y()) << ' ' << pair.second.value << ' '
          << FormatDouble(m.second.x()) << ' ' << FormatDouble(m.second.y()) << '\n';
    }
  }
  CheckWritten(out, path);
}

void ReadMatches(const fs::path& path, MatchStore* matches) {
  Parser p(path);
  while (p.Next(6)) {
    const ImageId a(p.Unsigned(0));
    const ImageId b(p.Unsigned(3));
    if (a == b) p.Fail("match between an image and itself");
    matches->Add(a, {p.Number(1), p.Number(2)}, b, {p.Number(4), p.Number(5)});
  }
}

void WriteLocalizationResults(const fs::path& path,
                              const std::vector<LocalizationResult>& results) {
  auto out = OpenForWrite(path);
  for (const LocalizationResult& r : results) {
    const Eigen::Quaterniond& q = r.estimated.rotation;
    const Eigen::Vector3d& c = r.estimated.center;
    out << r.query.value << ' ' << ToString(r.status) << ' ' << FormatDouble(q.w()) << ' '
        << FormatDouble(q.x()) << ' ' << FormatDouble(q.y()) << ' ' << FormatDouble(q.z())
        << ' ' << FormatDouble(c.x()) << ' ' << FormatDouble(c.y()) << ' '
        << FormatDouble(c.z()) << ' ' << r.num_inliers << '\n';
  }
  CheckWritten(out, path);
}

std::vector<LocalizationResult> ReadLocalizationResults(const fs::path& path) {
  Parser p(path);
  std::vector<LocalizationResult> results;
  while (p.Next(10)) {
    LocalizationResult r;
    r.query = ImageId(p.Unsigned(0));
    r.status = ParseStatus(p, p.Text(1));
    r.estimated.rotation = Eigen::Quaterniond(p.Number(2), p.Number(3), p.Number(4),
                                              p.Number(5));
    r.estimated.center = {p.Number(6), p.Number(7), p.Number(8)};
    r.num_inliers = p.Unsigned(9);
    if (r.ok()) {
      try {
        NormalizeQuaternion(&r.estimated.rotation);
      } catch (const InvalidArgument& e) {
        p.Fail(e.what());
      }
    }
    results.push_back(r);
  }
  return results;
}

GrayImage ReadPnm(const fs::path& path) {
  const PnmData data = ReadPnmBytes(path);
  if (data.channels == 3) return GrayFromRgb(data.width, data.height, data.bytes);
  GrayImage image{data.width, data.height, std::vector<double>(data.bytes.size())};
  for (std::size_t i = 0; i < data.bytes.size(); ++i) image.pixels[i] = data.bytes[i];
  return image;
}

void WritePgm(const fs::path& path, const GrayImage& image) {
  std::vector<std::uint8_t> bytes(image.pixels.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    bytes[i] = static_cast<std::uint8_t>(std::clamp(std::lround(image.pixels[i]), 0L, 255L));
  }
  WritePgmBytes(path, image.width, image.height, bytes);
}

LabelMask ReadLabelMask(const fs::path& path) {
  PnmData data = ReadPnmBytes(path);
  if (data.channels != 1) throw ParseError(path, 1, "label masks must be P5");
  return {data.width, data.height, std::move(data.bytes)};
}

void WriteLabelMask(const fs::path& path, const LabelMask& mask) {
  WritePgmBytes(path, mask.width, mask.height, mask.labels);
}

Dataset LoadDataset(const fs::path& root) {
  if (!fs::is_directory(root)) throw MissingFileError(root);
  Dataset ds;

  // images.txt: roles.
  std::map<ImageId, bool> is_query;
  {
    Parser p(root / "images.txt");
    while (p.Next(2)) {
      const ImageId id(p.Unsigned(0));
      const std::string_view role = p.Text(1);
      if (role != "db" && role != "query") p.Fail("role must be 'db' or 'query'");
      if (!is_query.emplace(id, role == "query").second) {
        p.Fail("duplicate image id " + std::to_string(id.value));
      }
    }
  }

  std::map<std::uint64_t, CameraIntrinsics> cameras;
  {
    Parser p(root / "intrinsics.txt");
    while (p.Next(8)) {
      const std::uint64_t cam = p.Unsigned(0);
      if (p.Text(1) != "PINHOLE") p.Fail("only the PINHOLE model is supported");
      CameraIntrinsics intr{p.Number(2), p.Number(3), p.Number(4), p.Number(5),
                            p.Integer(6), p.Integer(7)};
      try {
        intr.Validate();
      } catch (const InvalidArgument& e) {
        p.Fail(e.what());
      }
      if (!cameras.emplace(cam, intr).second) {
        p.Fail("duplicate camera id " + std::to_string(cam));
      }
    }
  }

  std::map<ImageId, std::uint64_t> image_camera;
  {
    Parser p(root / "image_cameras.txt");
    while (p.Next(2)) {
      const ImageId id(p.Unsigned(0));
      const std::uint64_t cam = p.Unsigned(1);
      if (!is_query.contains(id)) {
        throw IntegrityError(p.Where() + ": unknown image " + std::to_string(id.value));
      }
      if (!cameras.contains(cam)) {
        throw IntegrityError(p.Where() + ": unknown camera " + std::to_string(cam));
      }
      if (!image_camera.emplace(id, cam).second) {
        p.Fail("duplicate image id " + std::to_string(id.value));
      }
    }
  }

  std::map<ImageId, Pose> poses;
  {
    Parser p(root / "poses.txt");
    while (p.Next(8)) {
      const ImageId id(p.Unsigned(0));
      if (!is_query.contains(id)) {
        throw IntegrityError(p.Where() + ": pose for unknown image " +
                             std::to_string(id.value));
      }
      Pose pose;
      pose.rotation = Eigen::Quaterniond(p.Number(1), p.Number(2), p.Number(3), p.Number(4));
      pose.center = {p.Number(5), p.Number(6), p.Number(7)};
      try {
        if (NormalizeQuaternion(&pose.rotation) == QuaternionStatus::kNormalized) {
          ds.warnings.push_back(p.Where() + ": quaternion renormalized");
        }
      } catch (const InvalidArgument& e) {
        p.Fail(e.what());
      }
      if (!poses.emplace(id, pose).second) {
        p.Fail("duplicate pose for image " + std::to_string(id.value));
      }
    }
  }

  for (const auto& [id, query] : is_query) {
    if (!poses.contains(id)) {
      throw IntegrityError("image " + std::to_string(id.value) + " has no pose");
    }
    if (!image_camera.contains(id)) {
      throw IntegrityError("image " + std::to_string(id.value) + " has no camera");
    }
    ds.scene.AddImage(id, {poses.at(id), cameras.at(image_camera.at(id))});
    (query ? ds.queries : ds.database).push_back(id);
  }

  const bool has_points = fs::exists(root / "points.txt");
  const bool has_obs = fs::exists(root / "observations.txt");
  if (has_points != has_obs) {
    throw IntegrityError("points.txt and observations.txt must be present together");
  }
  if (has_points) {
    Parser pp(root / "points.txt");
    while (pp.Next(4)) {
      const PointId id(pp.Unsigned(0));
      if (ds.scene.HasPoint(id)) pp.Fail("duplicate point id " + std::to_string(id.value));
      ds.scene.AddPoint(id, {pp.Number(1), pp.Number(2), pp.Number(3)});
    }
    Parser po(root / "observations.txt");
    while (po.Next(4)) {
      const ImageId image(po.Unsigned(0));
      const PointId point(po.Unsigned(1));
      if (!ds.scene.HasImage(image)) {
        throw IntegrityError(po.Where() + ": observation of unknown image " +
                             std::to_string(image.value));
      }
      if (!ds.scene.HasPoint(point)) {
        throw IntegrityError(po.Where() + ": observation of unknown point " +
                             std::to_string(point.value));
      }
      ds.scene.AddObservation({image, point, {po.Number(2), po.Number(3)}});
    }
    for (const std::string& issue : ds.scene.Validate()) {
      ds.warnings.push_back("map: " + issue);
    }
  }

  const fs::path desc_dir = root / "descriptors";
  if (fs::is_directory(desc_dir)) {
    for (const fs::path& bin : SortedEntries(desc_dir, ".bin")) {
      const std::string feature = bin.stem().string();
      fs::path ids = bin;
      ids.replace_extension(".ids");
      DescriptorTable table = ReadDescriptorMatrix(bin, ids);
      if (table.size() != is_query.size()) {
        throw IntegrityError(bin.string() + ": descriptor rows (" +
                             std::to_string(table.size()) + ") != image count (" +
                             std::to_string(is_query.size()) + ")");
      }
      for (auto& [id, d] : table) {
        if (!is_query.contains(id)) {
          throw IntegrityError(ids.string() + ": descriptor for unknown image " +
                               std::to_string(id.value));
        }
        const double norm = d.norm();
        if (!(norm > 1e-12) || !std::isfinite(norm)) {
          throw IntegrityError(bin.string() + ": zero or non-finite descriptor for image " +
                               std::to_string(id.value));
        }
        if (std::abs(norm - 1.0) > 1e-6) {
          d /= norm;
          ds.warnings.push_back(bin.filename().string() + ": descriptor of image " +
                                std::to_string(id.value) + " renormalized");
        }
      }
      ds.descriptors.emplace(feature, std::move(table));
    }
  }

  const fs::path match_dir = root / "matches";
  if (fs::is_directory(match_dir)) {
    for (const fs::path& file : SortedEntries(match_dir, ".txt")) {
      ReadMatches(file, &ds.matches);
    }
    for (const auto& [pair, list] : ds.matches.Pairs()) {
      if (!ds.scene.HasImage(pair.first) || !ds.scene.HasImage(pair.second)) {
        throw IntegrityError("matches reference unknown image pair " +
                             std::to_string(pair.first.value) + "-" +
                             std::to_string(pair.second.value));
      }
    }
  }

  const fs::path mask_dir = root / "masks";
  if (fs::is_directory(mask_dir)) {
    Parser p(mask_dir / "labels.txt");
    while (p.Next(3)) {
      const std::uint64_t label = p.Unsigned(0);
      if (label > 255) p.Fail("labels must fit in 8 bits");
      const std::string_view kind = p.Text(2);
      if (kind != "dynamic" && kind != "static") p.Fail("kind must be dynamic or static");
      ds.known_labels.insert(static_cast<std::uint8_t>(label));
      if (kind == "dynamic") ds.dynamic_labels.insert(static_cast<std::uint8_t>(label));
    }
    for (const fs::path& file : SortedEntries(mask_dir, ".pgm")) {
      const auto id = ParseUint(file.stem().string());
      if (!id || !is_query.contains(ImageId(*id))) {
        throw IntegrityError(file.string() + ": mask name is not a known image id");
      }
      ds.masks.emplace(ImageId(*id), ReadLabelMask(file));
    }
  }

  const fs::path image_dir = root / "images";
  if (fs::is_directory(image_dir)) {
    for (const char* ext : {".pgm", ".ppm"}) {
      for (const fs::path& file : SortedEntries(image_dir, ext)) {
        const auto id = ParseUint(file.stem().string());
        if (!id || !is_query.contains(ImageId(*id))) {
          throw IntegrityError(file.string() + ": image name is not a known image id");
        }
        ds.images.insert_or_assign(ImageId(*id), ReadPnm(file));
      }
    }
  }
  return ds;
}

void SaveDataset(const Dataset& ds, const fs::path& root) {
  fs::create_directories(root);
  std::vector<CameraIntrinsics> cameras;
  std::map<ImageId, std::size_t> camera_of;
  for (const auto& [id, record] : ds.scene.Images()) {
    auto it = std::find_if(cameras.begin(), cameras.end(), [&](const CameraIntrinsics& c) {
      return SameIntrinsics(c, record.intrinsics);
    });
    if (it == cameras.end()) it = cameras.insert(cameras.end(), record.intrinsics);
    camera_of[id] = static_cast<std::size_t>(it - cameras.begin()) + 1;
  }

  {
    const fs::path path = root / "intrinsics.txt";
    auto out = OpenForWrite(path);
    out << "# camera_id model fx fy cx cy width height\n";
    for (std::size_t i = 0; i < cameras.size(); ++i) {
      const CameraIntrinsics& c = cameras[i];
      out << (i + 1) << " PINHOLE " << FormatDouble(c.fx) << ' ' << FormatDouble(c.fy)
          << ' ' << FormatDouble(c.cx) << ' ' << FormatDouble(c.cy) << ' ' << c.width
          << ' ' << c.height << '\n';
    }
    CheckWritten(out, path);
  }
  {
    const std::set<ImageId> queries(ds.queries.begin(), ds.queries.end());
    const fs::path images = root / "images.txt";
    const fs::path cams = root / "image_cameras.txt";
    const fs::path poses = root / "poses.txt";
    auto out_images = OpenForWrite(images);
    auto out_cams = OpenForWrite(cams);
    auto out_poses = OpenForWrite(poses);
    out_poses << "# image_id qw qx qy qz cx cy cz\n";
    for (const auto& [id, record] : ds.scene.Images()) {
      out_images << id.value << ' ' << (queries.contains(id) ? "query" : "db") << '\n';
      out_cams << id.value << ' ' << camera_of.at(id) << '\n';
      const Eigen::Quaterniond& q = record.pose.rotation;
      const Eigen::Vector3d& c = record.pose.center;
      out_poses << id.value << ' ' << FormatDouble(q.w()) << ' ' << FormatDouble(q.x())
                << ' ' << FormatDouble(q.y()) << ' ' << FormatDouble(q.z()) << ' '
                << FormatDouble(c.x()) << ' ' << FormatDouble(c.y()) << ' '
                << FormatDouble(c.z()) << '\n';
    }
    CheckWritten(out_images, images);
    CheckWritten(out_cams, cams);
    CheckWritten(out_poses, poses);
  }
  if (ds.HasMap()) {
    const fs::path points = root / "points.txt";
    auto out = OpenForWrite(points);
    for (const auto& [id, x] : ds.scene.Points()) {
      out << id.value << ' ' << FormatDouble(x.x()) << ' ' << FormatDouble(x.y()) << ' '
          << FormatDouble(x.z()) << '\n';
    }
    CheckWritten(out, points);
    const fs::path obs = root / "observations.txt";
    auto out_obs = OpenForWrite(obs);
    for (const Observation& o : ds.scene.Observations()) {
      out_obs << o.image.value << ' ' << o.point.value << ' ' << FormatDouble(o.pixel.x())
              << ' ' << FormatDouble(o.pixel.y()) << '\n';
    }
    CheckWritten(out_obs, obs);
  }
  if (!ds.descriptors.empty()) {
    fs::create_directories(root / "descriptors");
    for (const auto& [feature, table] : ds.descriptors) {
      CheckFeatureName(feature);
      WriteDescriptorMatrix(root / "descriptors" / (feature + ".bin"),
                            root / "descriptors" / (feature + ".ids"), table);
    }
  }
  if (ds.matches.size() > 0) {
    fs::create_directories(root / "matches");
    WriteMatches(root / "matches" / "matches.txt", ds.matches);
  }
  if (!ds.masks.empty() || !ds.known_labels.empty()) {
    fs::create_directories(root / "masks");
    const fs::path labels = root / "masks" / "labels.txt";
    auto out = OpenForWrite(labels);
    for (std::uint8_t label : ds.known_labels) {
      const bool dynamic = ds.dynamic_labels.contains(label);
      out << static_cast<int>(label) << " label" << static_cast<int>(label) << ' '
          << (dynamic ? "dynamic" : "static") << '\n';
    }
    CheckWritten(out, labels);
    for (const auto& [id, mask] : ds.masks) {
      WriteLabelMask(root / "masks" / (std::to_string(id.value) + ".pgm"), mask);
    }
  }
  if (!ds.images.empty()) {
    fs::create_directories(root / "images");
    for (const auto& [id, image] : ds.images) {
      WritePgm(root / "images" / (std::to_string(id.value) + ".pgm"), image);
    }
  }
}

}  // namespace vlbench
