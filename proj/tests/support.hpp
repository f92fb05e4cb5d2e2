#pragma once

#include "oracles.hpp"

#include <twosample/sample.hpp>

#include <vector>

inline twosample::Sample sample1(const std::vector<double>& v) {
  return twosample::Sample::from_values(v);
}

inline twosample::Sample sample_of(const oracle::Points& p) {
  twosample::PointMatrix m(static_cast<Eigen::Index>(p.size()),
                           static_cast<Eigen::Index>(p.at(0).size()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t k = 0; k < p[i].size(); ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = p[i][k];
    }
  }
  return twosample::Sample(std::move(m));
}

inline oracle::Points points1(const std::vector<double>& v) {
  oracle::Points p;
  for (double e : v) p.push_back({e});
  return p;
}
