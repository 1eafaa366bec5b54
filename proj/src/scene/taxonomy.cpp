#include "cloudifier/scene/taxonomy.hpp"

#include "cloudifier/common.hpp"

namespace cloudifier::scene {
namespace {

const char* const kCoarseNames[coarse::Count] = {
    "background", "window-frame", "button",    "text-input", "checkbox", "radio-button",
    "dropdown",   "list/table", "label/static-text", "scrollbar", "icon/image"};

}  // namespace

const char* granularity_name(Granularity g) { return g == Granularity::Coarse ? "coarse" : "fine"; }

Granularity parse_granularity(const std::string& s) {
  if (s == "coarse") return Granularity::Coarse;
  if (s == "fine") return Granularity::Fine;
  throw ConfigError("unknown granularity '" + s + "' (expected coarse or fine)");
}

const std::vector<WidgetClass>& taxonomy() {
  static const std::vector<WidgetClass> table = {
      {coarse::Background, 0, "background"},
      {coarse::WindowFrame, 1, "window.active"},
      {coarse::WindowFrame, 2, "window.inactive"},
      {coarse::Button, 3, "button.normal"},
      {coarse::Button, 4, "button.pressed"},
      {coarse::Button, 5, "button.default"},
      {coarse::Button, 6, "button.disabled"},
      {coarse::TextInput, 7, "text-input.empty"},
      {coarse::TextInput, 8, "text-input.filled"},
      {coarse::TextInput, 9, "text-input.multiline"},
      {coarse::Checkbox, 10, "checkbox.unchecked"},
      {coarse::Checkbox, 11, "checkbox.checked"},
      {coarse::Radio, 12, "radio.unselected"},
      {coarse::Radio, 13, "radio.selected"},
      {coarse::Dropdown, 14, "dropdown.enabled"},
      {coarse::Dropdown, 15, "dropdown.disabled"},
      {coarse::ListTable, 16, "list.listbox"},
      {coarse::ListTable, 17, "list.table"},
      {coarse::Label, 18, "label.plain"},
      {coarse::Label, 19, "label.heading"},
      {coarse::Scrollbar, 20, "scrollbar.vertical"},
      {coarse::Scrollbar, 21, "scrollbar.horizontal"},
      {coarse::Icon, 22, "icon.glyph"},
      {coarse::Icon, 23, "icon.picture"},
  };
  return table;
}

const char* coarse_name(int coarse_id) {
  if (coarse_id < 0 || coarse_id >= coarse::Count) {
    throw ConfigError("coarse class id out of range: " + std::to_string(coarse_id));
  }
  return kCoarseNames[coarse_id];
}

int num_coarse() { return coarse::Count; }
int num_fine() { return static_cast<int>(taxonomy().size()); }

int coarse_of(int fine_id) {
  if (fine_id < 0 || fine_id >= num_fine()) {
    throw ConfigError("fine class id out of range: " + std::to_string(fine_id));
  }
  return taxonomy()[static_cast<std::size_t>(fine_id)].coarse_id;
}

int project(int fine_id, Granularity g) {
  return g == Granularity::Fine ? (coarse_of(fine_id), fine_id) : coarse_of(fine_id);
}

int num_classes(Granularity g, int coarse_limit) {
  if (coarse_limit < 0 || coarse_limit > coarse::Count || coarse_limit == 1) {
    throw ConfigError("coarse class limit must be 0 or in [2, " + std::to_string(coarse::Count) +
                      "], got " + std::to_string(coarse_limit));
  }
  const int limit = coarse_limit == 0 ? coarse::Count : coarse_limit;
  if (g == Granularity::Coarse) return limit;
  int n = 0;
  for (const auto& wc : taxonomy()) n += wc.coarse_id < limit ? 1 : 0;
  return n;
}

}  // namespace cloudifier::scene
