#include "cloudifier/common.hpp"
#include "cloudifier/rng.hpp"
#include "cloudifier/scene/scene.hpp"

namespace cloudifier::scene {
namespace {

void check(const GeneratorConfig& config) {
  if (config.count <= 0) throw ConfigError("generator: observation count must be positive");
  if (config.size <= 0 || config.size > 4096) throw ConfigError("generator: size must be in [1, 4096]");
  config.num_classes();
}

}  // namespace

Observation generate_observation(const GeneratorConfig& config, std::uint64_t index) {
  ScenePolicy policy;
  policy.coarse_limit = config.coarse_limit;
  return compose_random_scene(policy, theme_for_index(config.theme, index), config.size,
                              config.granularity, stream_seed(config.seed, index));
}

MetaBatch generate_meta_batch(const GeneratorConfig& config) {
  check(config);
  MetaBatch batch{config, {}};
  batch.observations.reserve(static_cast<std::size_t>(config.count));
  for_each_observation(config, [&](std::uint64_t, Observation&& obs) {
    batch.observations.push_back(std::move(obs));
  });
  return batch;
}

void for_each_observation(const GeneratorConfig& config,
                          const std::function<void(std::uint64_t, Observation&&)>& fn) {
  check(config);
  for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(config.count); ++i) {
    fn(i, generate_observation(config, i));
  }
}

}  // namespace cloudifier::scene
