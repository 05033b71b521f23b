#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "prederr/domain.hpp"

namespace support {

inline prederr::ObjectUniverse
universe(const std::vector<std::pair<std::string, std::map<std::string, double>>> &objs) {
  std::vector<prederr::Object> out;
  for (const auto &[id, attrs] : objs)
    out.push_back({id, attrs});
  return prederr::ObjectUniverse(std::move(out));
}

inline prederr::FeatureDef feature(const std::string &id, const std::string &expr) {
  return {id, prederr::Expression::parse(expr)};
}

inline prederr::FeaturizedTrainingSet
rows(std::size_t dim, const std::vector<std::pair<std::vector<double>, int>> &data) {
  prederr::FeaturizedTrainingSet r(dim);
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::string id = "r" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    r.add_row(data[i].first, prederr::label_from_int(data[i].second), id);
  }
  return r;
}

} // namespace support
