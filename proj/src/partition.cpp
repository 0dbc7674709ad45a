#include "scd/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scd {

Profile compute_profile(const GridDensity& density, double z_max, int z_points) {
  if (z_points < 2) throw InvalidInput("compute_profile: need at least 2 z points");
  if (!(z_max > 0.0) || !std::isfinite(z_max)) {
    throw InvalidInput("compute_profile: z_max must be positive");
  }

  // Sweep the z-grid once, keeping cells whose value range straddles z in an
  // active list. Cell contributions match mass_at_or_below exactly.
  struct Cell {
    double lo, hi, f0, f1;
  };
  const double h = density.grid.step();
  const int n_cells = density.grid.n_points - 1;
  std::vector<Cell> by_lo(n_cells);
  for (int j = 0; j < n_cells; ++j) {
    const double f0 = density.values[j];
    const double f1 = density.values[j + 1];
    by_lo[j] = {std::min(f0, f1), std::max(f0, f1), f0, f1};
  }
  std::sort(by_lo.begin(), by_lo.end(), [](const Cell& a, const Cell& b) { return a.lo < b.lo; });

  Profile profile;
  profile.z_max = z_max;
  profile.h_values.resize(z_points);
  const double dz = z_max / (z_points - 1);

  std::vector<Cell> active;
  std::size_t next_lo = 0;
  double full_mass = 0.0;
  for (int i = 0; i < z_points; ++i) {
    const double z = i * dz;
    while (next_lo < by_lo.size() && by_lo[next_lo].lo <= z) {
      active.push_back(by_lo[next_lo]);
      ++next_lo;
    }
    double mass = 0.0;
    for (std::size_t a = 0; a < active.size();) {
      const Cell& c = active[a];
      if (c.hi <= z) {
        full_mass += 0.5 * (c.f0 + c.f1) * h;
        active[a] = active.back();
        active.pop_back();
        continue;
      }
      if (c.lo <= z && c.f0 != c.f1) {
        // sub-segment of the linear cell with f <= z
        const double theta = (z - c.lo) / (c.hi - c.lo);
        mass += 0.5 * (c.lo + z) * theta * h;
      }
      ++a;
    }
    profile.h_values[i] = full_mass + mass;
  }
  return profile;
}

double profile_distance(const Profile& a, const Profile& b) {
  if (!a.same_grid(b)) throw InvalidInput("profile_distance: mismatched z-grids");
  const int m = a.size();
  double d0 = a.h_values[0] - b.h_values[0];
  double dl = a.h_values[m - 1] - b.h_values[m - 1];
  double s = 0.5 * (d0 * d0 + dl * dl);
  for (int i = 1; i + 1 < m; ++i) {
    const double d = a.h_values[i] - b.h_values[i];
    s += d * d;
  }
  return s * a.z_step();
}

namespace {

int nearest_centroid(const std::vector<Profile>& centroids, const Profile& p) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = profile_distance(centroids[c], p);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

std::vector<Profile> seed_centroids(std::span<const Profile> profiles, int j_cells, Rng& rng) {
  std::vector<Profile> centroids;
  centroids.reserve(j_cells);
  centroids.push_back(profiles[rng.uniform_index(profiles.size())]);

  std::vector<double> d2(profiles.size());
  while (static_cast<int>(centroids.size()) < j_cells) {
    double total = 0.0;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const Profile& c : centroids) best = std::min(best, profile_distance(c, profiles[i]));
      d2[i] = best;
      total += best;
    }
    std::size_t pick;
    if (total > 0.0) {
      const double target = rng.uniform01() * total;
      double acc = 0.0;
      pick = profiles.size() - 1;
      for (std::size_t i = 0; i < profiles.size(); ++i) {
        acc += d2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      // all remaining profiles coincide with a centroid
      pick = rng.uniform_index(profiles.size());
    }
    centroids.push_back(profiles[pick]);
  }
  return centroids;
}

}  // namespace

Partition kmeanspp_fit(std::span<const Profile> profiles, int j_cells, int n_iters,
                       std::uint64_t seed) {
  const int n = static_cast<int>(profiles.size());
  if (j_cells < 1) throw InvalidInput("kmeanspp_fit: need at least one cell");
  if (n < j_cells) throw InvalidInput("kmeanspp_fit: fewer profiles than cells");
  for (int i = 1; i < n; ++i) {
    if (!profiles[i].same_grid(profiles[0])) {
      throw InvalidInput("kmeanspp_fit: profiles on mismatched z-grids");
    }
  }

  Rng rng(seed);
  std::vector<Profile> centroids = seed_centroids(profiles, j_cells, rng);
  const int m = profiles[0].size();

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < std::max(1, n_iters); ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      const int c = nearest_centroid(centroids, profiles[i]);
      if (c != assign[i]) {
        assign[i] = c;
        changed = true;
      }
    }

    // pointwise-mean centroid update
    std::vector<int> counts(j_cells, 0);
    std::vector<std::vector<double>> sums(j_cells, std::vector<double>(m, 0.0));
    for (int i = 0; i < n; ++i) {
      ++counts[assign[i]];
      for (int t = 0; t < m; ++t) sums[assign[i]][t] += profiles[i].h_values[t];
    }
    for (int c = 0; c < j_cells; ++c) {
      if (counts[c] == 0) {
        // reseed an empty cell at the profile farthest from its centroid
        int far = 0;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
          const double d = profile_distance(centroids[assign[i]], profiles[i]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centroids[c] = profiles[far];
        assign[far] = c;
        changed = true;
        continue;
      }
      for (int t = 0; t < m; ++t) centroids[c].h_values[t] = sums[c][t] / counts[c];
    }
    if (!changed && iter > 0) break;
  }

  Partition partition;
  partition.centroids = std::move(centroids);
  partition.z_max = profiles[0].z_max;
  partition.z_points = m;
  return partition;
}

int assign_cell(const Partition& partition, const Profile& profile) {
  if (partition.cells() < 1) throw InvalidInput("assign_cell: empty partition");
  return nearest_centroid(partition.centroids, profile);
}

}  // namespace scd
