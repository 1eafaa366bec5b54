#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cloudifier/model/network.hpp"
#include "cloudifier/scene/scene.hpp"

namespace cloudifier::train {

// Metrics over one group of observations. Confusion rows are true classes,
// columns predicted classes.
struct KindReport {
  std::string kind;
  std::size_t observations = 0;
  std::uint64_t pixels = 0;
  std::vector<std::vector<std::uint64_t>> confusion;
  std::optional<double> accuracy;                // absent when there are no pixels
  std::vector<std::optional<double>> recall;     // absent for classes with no pixels
  std::optional<double> macro_recall;            // mean of the present recalls
  std::uint64_t scene_correct = 0;
  std::optional<double> scene_top1;
};

struct EvalReport {
  int num_classes = 0;
  scene::Granularity granularity = scene::Granularity::Coarse;
  KindReport overall, artificial, sketch;

  // Stable JSON document; identical reports give identical bytes.
  std::string to_json() const;
  // Plain-text table with ArtAcc / ArtRec / NatAcc / NatRec columns.
  std::string to_table() const;
};

// Scene-level prediction: the non-background class covering the most pixels
// (lowest id wins ties), or background when none is predicted.
std::uint16_t predicted_scene_label(const std::vector<std::uint16_t>& prediction, int num_classes);

// Pure metric computation from per-pixel predictions.
EvalReport evaluate_predictions(const std::vector<scene::Observation>& data,
                                const std::vector<std::vector<std::uint16_t>>& predictions,
                                int num_classes, scene::Granularity granularity);

// Argmax class map per observation, inference mode.
std::vector<std::uint16_t> predict(model::Network& net, const scene::Observation& obs);

EvalReport evaluate(model::Network& net, const std::vector<scene::Observation>& data,
                    scene::Granularity granularity);

}  // namespace cloudifier::train
