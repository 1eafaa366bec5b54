#include <CLI11.hpp>

#include <iostream>

#include "cloudifier/cli/commands.hpp"

using namespace cloudifier;

int main(int argc, char** argv) {
  CLI::App app{"cloudifier: synthetic UI scene generation and dense segmentation"};
  app.require_subcommand(1);

  cli::GenDataOptions gen;
  auto* g = app.add_subcommand("gen-data", "Generate labelled meta-batch files");
  g->add_option("--out", gen.out, "Output dataset file")->required();
  g->add_option("--meta-batches", gen.meta_batches, "Number of files; more than one appends -000, -001, ...")
      ->capture_default_str();
  g->add_option("--obs", gen.obs, "Observations per file")->capture_default_str();
  g->add_option("--size", gen.size, "Square observation side in pixels")->capture_default_str();
  g->add_option("--theme", gen.theme, "win95 | win98 | winxp | sketch | mixed")->capture_default_str();
  g->add_option("--granularity", gen.granularity, "coarse | fine")->capture_default_str();
  g->add_option("--seed", gen.seed, "Base seed; file b uses seed + b")->capture_default_str();
  g->add_option("--num-classes", gen.num_classes, "Keep only the first N coarse groups (0 = all)")
      ->capture_default_str();
  g->add_option("--preview-dir", gen.preview_dir, "Also write PNG previews and raw label maps here");
  g->add_option("--preview-count", gen.preview_count, "Number of previews")->capture_default_str();

  cli::TrainOptions tr;
  auto* t = app.add_subcommand("train", "Train a network on dataset files");
  t->add_option("--data", tr.data, "Dataset files")->required();
  t->add_option("--variant", tr.variant, "cloudifier50 | cloudifier109 | micro")->capture_default_str();
  t->add_option("--batch", tr.batch, "Batch size, 32 to 128")->capture_default_str();
  t->add_flag("--any-batch", tr.any_batch, "Allow batch sizes outside 32 to 128");
  t->add_option("--lr", tr.lr, "Initial learning rate")->capture_default_str();
  t->add_option("--loss", tr.loss, "nll | focal")->capture_default_str();
  t->add_option("--focal-gamma", tr.focal_gamma, "Focal focusing exponent")->capture_default_str();
  t->add_option("--background-weight", tr.background_weight, "Focal class weight of background")
      ->capture_default_str();
  t->add_option("--epochs", tr.epochs, "Training epochs")->capture_default_str();
  t->add_option("--seed", tr.seed, "Seed for initialisation, split, shuffling and augmentation")
      ->capture_default_str();
  t->add_option("--augment-policy", tr.augment_policy, "Augmentation policy file");
  t->add_option("--augment-routing", tr.augment_routing, "sketch | all | none")->capture_default_str();
  t->add_option("--monitor", tr.monitor, "Loss driving the plateau schedule: dev | train")->capture_default_str();
  t->add_option("--patience", tr.patience, "Plateau patience in epochs")->capture_default_str();
  t->add_option("--ckpt", tr.ckpt, "Output checkpoint")->required();
  t->add_option("--history", tr.history, "Output loss history CSV");

  cli::EvalOptions ev;
  auto* e = app.add_subcommand("eval", "Evaluate a checkpoint on dataset files");
  e->add_option("--ckpt", ev.ckpt, "Checkpoint")->required();
  e->add_option("--data", ev.data, "Dataset files")->required();
  e->add_option("--subset", ev.subset, "all | train | dev | test")->capture_default_str();
  e->add_option("--seed", ev.seed, "Split seed used for --subset")->capture_default_str();
  e->add_option("--json", ev.json_out, "Write the JSON report here instead of stdout");

  cli::InferOptions in;
  auto* i = app.add_subcommand("infer", "Dense prediction for one image");
  i->add_option("--ckpt", in.ckpt, "Checkpoint")->required();
  i->add_option("--image", in.image, "Input PNG or PPM")->required();
  i->add_option("--labels-out", in.labels_out, "Raw little-endian u16 class map");
  i->add_option("--overlay-out", in.overlay_out, "Overlay image (.ppm or PNG)");
  i->add_option("--logits-out", in.logits_out, "Raw little-endian float32 logits (h, w, classes)");
  i->add_option("--pad", in.pad, "reflect | none")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? cli::kOk : cli::kUsage;
  }
  try {
    if (*g) return cli::cmd_gen_data(gen, std::cout);
    if (*t) return cli::cmd_train(tr, std::cout);
    if (*e) return cli::cmd_eval(ev, std::cout);
    return cli::cmd_infer(in, std::cout);
  } catch (...) {
    return cli::report_exception(std::cerr);
  }
}
