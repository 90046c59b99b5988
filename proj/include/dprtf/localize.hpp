#ifndef DPRTF_LOCALIZE_HPP
#define DPRTF_LOCALIZE_HPP

#include <string>
#include <vector>

#include "dprtf/estimator.hpp"
#include "dprtf/sim.hpp"

namespace dprtf {

struct Direction {
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
};

// Lookup table of normalized direct-path features per training direction,
// plus the direct-path transfer functions used as steering responses.
struct TrainingSet {
  std::vector<Direction> directions;
  std::vector<DpRtfFeature> features;  // h == 1 throughout
  // steering[i][mic][k]: CTF tap-0 transfer of the direct-path response,
  // full-spectrum bin indexing.
  std::vector<std::vector<std::vector<cplx>>> steering;
  std::vector<std::size_t> bins;  // band bin indices shared by all features
  std::size_t num_mics = 0;
};

// Features computed analytically from truncated (direct-path-only)
// responses; bins invalid in any direction are excluded everywhere.
TrainingSet build_training_set(const std::vector<Brir> &hrirs,
                               const std::vector<Direction> &directions,
                               const EstimatorConfig &config);

// Azimuth grid -90..90 step 5 degrees on a circle of the given radius
// around the array center, elevation 0.
std::vector<Direction> default_training_directions();
std::array<double, 3> direction_to_position(const Direction &dir,
                                            const std::array<double, 3> &center,
                                            double radius);

// Anechoic training table for a scene's array geometry.
TrainingSet train_from_scene(const SceneConfig &scene,
                             const EstimatorConfig &config,
                             const std::vector<Direction> &directions,
                             double radius = 1.0);

// Masked nearest-neighbor search: argmin_i || h .* (c - c_i) ||.
// Ties resolved toward the lowest training index.
Direction nearest_neighbor(const DpRtfFeature &feature,
                           const TrainingSet &training);

// Versioned binary serialization of the training table.
void save_training_set(const std::string &path, const TrainingSet &training,
                       const EstimatorConfig &config);
TrainingSet load_training_set(const std::string &path, EstimatorConfig &config);

}  // namespace dprtf

#endif
