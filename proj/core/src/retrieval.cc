#include "vlbench/retrieval.h"

#include <algorithm>
#include <string>

namespace vlbench {
namespace {

const Eigen::VectorXd& Lookup(const DescriptorTable& descriptors, ImageId id) {
  const auto it = descriptors.find(id);
  if (it == descriptors.end()) {
    throw InvalidArgument("no descriptor for image " + std::to_string(id.value));
  }
  return it->second;
}

}  // namespace

Eigen::MatrixXd DescriptorColumns(std::span<const ImageId> ids,
                                  const DescriptorTable& descriptors) {
  if (ids.empty()) return {};
  const Eigen::Index dim = Lookup(descriptors, ids.front()).size();
  Eigen::MatrixXd out(dim, static_cast<Eigen::Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const Eigen::VectorXd& d = Lookup(descriptors, ids[i]);
    if (d.size() != dim) throw InvalidArgument("descriptor dimensions differ");
    out.col(static_cast<Eigen::Index>(i)) = d;
  }
  return out;
}

Ranking RankByDescriptors(std::span<const ImageId> queries,
                          std::span<const ImageId> database,
                          const DescriptorTable& descriptors,
                          std::size_t max_rank) {
  const Eigen::MatrixXd db = DescriptorColumns(database, descriptors);
  Ranking ranking;
  for (ImageId q : queries) {
    const Eigen::VectorXd& dq = Lookup(descriptors, q);
    if (db.size() > 0 && dq.size() != db.rows()) {
      throw InvalidArgument("descriptor dimensions differ");
    }
    std::vector<RankedImage> list;
    list.reserve(database.size());
    for (std::size_t i = 0; i < database.size(); ++i) {
      const auto col = db.col(static_cast<Eigen::Index>(i));
      const double denom = dq.norm() * col.norm();
      const double cosine = denom > 0.0 ? dq.dot(col) / denom : 0.0;
      list.push_back({database[i], cosine, false});
    }
    std::sort(list.begin(), list.end(),
              [](const RankedImage& a, const RankedImage& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.id < b.id;
              });
    if (list.size() > max_rank) list.resize(max_rank);
    ranking[q] = std::move(list);
  }
  return ranking;
}

}  // namespace vlbench
