#pragma once

#include <span>
#include <vector>

#include "scd/grid.hpp"

namespace scd {

// Discretized conditional CDF of density levels:
//   H(z | x) = integral of f over {y : f(y|x) <= z},
// sampled on a uniform z-grid over [0, z_max].
struct Profile {
  double z_max = 1.0;
  std::vector<double> h_values;

  int size() const { return static_cast<int>(h_values.size()); }
  double z_step() const { return z_max / (size() - 1); }
  bool same_grid(const Profile& other) const {
    return z_max == other.z_max && h_values.size() == other.h_values.size();
  }
};

Profile compute_profile(const GridDensity& density, double z_max, int z_points);

// Squared L2 distance between profiles (trapezoid over the shared z-grid).
double profile_distance(const Profile& a, const Profile& b);

// k-means++ cells over profiles; assignment is nearest centroid.
struct Partition {
  std::vector<Profile> centroids;
  double z_max = 1.0;
  int z_points = 0;

  int cells() const { return static_cast<int>(centroids.size()); }
};

Partition kmeanspp_fit(std::span<const Profile> profiles, int j_cells, int n_iters,
                       std::uint64_t seed);

// Index of the nearest centroid; ties resolve to the lowest index.
int assign_cell(const Partition& partition, const Profile& profile);

}  // namespace scd
