#pragma once

#include <map>
#include <span>

#include <Eigen/Core>

#include "vlbench/gt_ranking.h"
#include "vlbench/types.h"

namespace vlbench {

// Global descriptor per image.
using DescriptorTable = std::map<ImageId, Eigen::VectorXd>;

// Database images ranked by cosine similarity to each query, highest first,
// ties by ascending id, truncated to `max_rank`. Throws InvalidArgument when
// a descriptor is missing or the dimensions disagree.
Ranking RankByDescriptors(std::span<const ImageId> queries,
                          std::span<const ImageId> database,
                          const DescriptorTable& descriptors,
                          std::size_t max_rank = 50);

// Descriptors of `ids` as the columns of one matrix.
Eigen::MatrixXd DescriptorColumns(std::span<const ImageId> ids,
                                  const DescriptorTable& descriptors);

}  // namespace vlbench
