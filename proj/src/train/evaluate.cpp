#include "cloudifier/train/evaluate.hpp"

#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cloudifier/common.hpp"
#include "cloudifier/train/train_loop.hpp"

namespace cloudifier::train {

using scene::Observation;

std::uint16_t predicted_scene_label(const std::vector<std::uint16_t>& prediction, int num_classes) {
  std::vector<std::size_t> count(static_cast<std::size_t>(num_classes), 0);
  for (auto p : prediction) ++count.at(p);
  std::uint16_t best = 0;
  std::size_t best_count = 0;
  for (int k = 1; k < num_classes; ++k) {
    if (count[static_cast<std::size_t>(k)] > best_count) {
      best = static_cast<std::uint16_t>(k);
      best_count = count[static_cast<std::size_t>(k)];
    }
  }
  return best;
}

namespace {

KindReport empty_report(const std::string& kind, int c) {
  KindReport r;
  r.kind = kind;
  r.confusion.assign(static_cast<std::size_t>(c), std::vector<std::uint64_t>(static_cast<std::size_t>(c), 0));
  return r;
}

void finish(KindReport& r) {
  const std::size_t c = r.confusion.size();
  std::uint64_t trace = 0, total = 0;
  r.recall.assign(c, std::nullopt);
  double recall_sum = 0.0;
  int present = 0;
  for (std::size_t k = 0; k < c; ++k) {
    std::uint64_t row = 0;
    for (std::size_t j = 0; j < c; ++j) row += r.confusion[k][j];
    trace += r.confusion[k][k];
    total += row;
    if (row > 0) {
      r.recall[k] = static_cast<double>(r.confusion[k][k]) / static_cast<double>(row);
      recall_sum += *r.recall[k];
      ++present;
    }
  }
  r.pixels = total;
  if (total > 0) r.accuracy = static_cast<double>(trace) / static_cast<double>(total);
  if (present > 0) r.macro_recall = recall_sum / present;
  if (r.observations > 0) r.scene_top1 = static_cast<double>(r.scene_correct) / static_cast<double>(r.observations);
}

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

nlohmann::json kind_json(const KindReport& r) {
  nlohmann::json j;
  j["observations"] = r.observations;
  j["pixels"] = r.pixels;
  j["pixel_accuracy"] = opt(r.accuracy);
  j["macro_recall"] = opt(r.macro_recall);
  j["scene_top1"] = opt(r.scene_top1);
  nlohmann::json rec = nlohmann::json::array();
  for (const auto& v : r.recall) rec.push_back(opt(v));
  j["recall"] = rec;
  j["confusion"] = r.confusion;
  return j;
}

}  // namespace

EvalReport evaluate_predictions(const std::vector<Observation>& data,
                                const std::vector<std::vector<std::uint16_t>>& predictions,
                                int num_classes, scene::Granularity granularity) {
  if (num_classes < 1) throw ConfigError("evaluate: num_classes must be positive");
  if (predictions.size() != data.size()) {
    throw ShapeError("evaluate: " + std::to_string(predictions.size()) + " predictions for " +
                     std::to_string(data.size()) + " observations");
  }
  EvalReport report;
  report.num_classes = num_classes;
  report.granularity = granularity;
  report.overall = empty_report("overall", num_classes);
  report.artificial = empty_report("artificial", num_classes);
  report.sketch = empty_report("sketch", num_classes);
  const auto c = static_cast<std::size_t>(num_classes);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Observation& obs = data[i];
    const auto& pred = predictions[i];
    if (pred.size() != obs.labels.size()) throw ShapeError("evaluate: prediction size mismatch");
    KindReport& group = scene::is_sketch(obs.theme) ? report.sketch : report.artificial;
    for (std::size_t p = 0; p < pred.size(); ++p) {
      const std::size_t t = obs.labels[p], y = pred[p];
      if (t >= c || y >= c) {
        throw ConfigError("evaluate: class id " + std::to_string(std::max(t, y)) + " outside [0, " +
                          std::to_string(num_classes) + ")");
      }
      ++report.overall.confusion[t][y];
      ++group.confusion[t][y];
    }
    const bool scene_ok = predicted_scene_label(pred, num_classes) == obs.scene_label;
    for (KindReport* r : {&report.overall, &group}) {
      ++r->observations;
      r->scene_correct += scene_ok ? 1 : 0;
    }
  }
  finish(report.overall);
  finish(report.artificial);
  finish(report.sketch);
  return report;
}

std::vector<std::uint16_t> predict(model::Network& net, const Observation& obs) {
  const Observation* one = &obs;
  const Tensor logits = net.infer(images_to_tensor(std::span(&one, 1)));
  const int c = logits.shape().c;
  std::vector<std::uint16_t> out(obs.pixels());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const real_t* f = logits.ptr() + p * static_cast<std::size_t>(c);
    int best = 0;
    for (int k = 1; k < c; ++k) best = f[k] > f[best] ? k : best;
    out[p] = static_cast<std::uint16_t>(best);
  }
  return out;
}

EvalReport evaluate(model::Network& net, const std::vector<Observation>& data, scene::Granularity granularity) {
  std::vector<std::vector<std::uint16_t>> predictions;
  predictions.reserve(data.size());
  for (const auto& obs : data) predictions.push_back(predict(net, obs));
  return evaluate_predictions(data, predictions, net.num_classes(), granularity);
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["num_classes"] = num_classes;
  j["granularity"] = scene::granularity_name(granularity);
  j["overall"] = kind_json(overall);
  j["artificial"] = kind_json(artificial);
  j["sketch"] = kind_json(sketch);
  return j.dump(2) + "\n";
}

std::string EvalReport::to_table() const {
  auto cell = [](const std::optional<double>& v) {
    std::ostringstream s;
    if (v) s << std::fixed << std::setprecision(4) << *v; else s << "n/a";
    return s.str();
  };
  std::ostringstream out;
  out << std::left << std::setw(10) << "ArtAcc" << std::setw(10) << "ArtRec" << std::setw(10) << "NatAcc"
      << std::setw(10) << "NatRec" << "Acc\n";
  out << std::setw(10) << cell(artificial.accuracy) << std::setw(10) << cell(artificial.macro_recall)
      << std::setw(10) << cell(sketch.accuracy) << std::setw(10) << cell(sketch.macro_recall)
      << cell(overall.accuracy) << '\n';
  return out.str();
}

}  // namespace cloudifier::train
