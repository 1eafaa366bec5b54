#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cloudifier::scene {

enum class Granularity : std::uint8_t { Coarse = 0, Fine = 1 };
const char* granularity_name(Granularity g);
Granularity parse_granularity(const std::string& s);

// One fine class and the coarse group it belongs to. Id 0 is background at
// both granularities.
struct WidgetClass {
  int coarse_id;
  int fine_id;
  const char* name;
};

namespace coarse {
enum : int {
  Background = 0,
  WindowFrame,
  Button,
  TextInput,
  Checkbox,
  Radio,
  Dropdown,
  ListTable,
  Label,
  Scrollbar,
  Icon,
  Count
};
}  // namespace coarse

// Fine classes ordered by coarse group, so restricting to the first K coarse
// groups leaves a prefix of the fine table.
const std::vector<WidgetClass>& taxonomy();
const char* coarse_name(int coarse_id);
int num_coarse();
int num_fine();
int coarse_of(int fine_id);
// Label id of a fine class at the given granularity.
int project(int fine_id, Granularity g);
// Number of label ids when only the first `coarse_limit` coarse groups are
// generated (0 means all).
int num_classes(Granularity g, int coarse_limit = 0);

}  // namespace cloudifier::scene
