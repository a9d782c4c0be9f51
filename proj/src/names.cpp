#include "svr/names.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>

namespace svr {

NameSet::NameSet(std::initializer_list<std::string> names) {
  for (const auto& n : names) insert(n);
}

bool NameSet::contains(std::string_view name) const {
  return std::binary_search(names_.begin(), names_.end(), name,
                            [](const auto& a, const auto& b) { return std::string_view(a) < std::string_view(b); });
}

void NameSet::insert(const std::string& name) {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) names_.insert(it, name);
}

void NameSet::erase(std::string_view name) {
  auto it = std::lower_bound(names_.begin(), names_.end(), name,
                             [](const std::string& a, std::string_view b) { return std::string_view(a) < b; });
  if (it != names_.end() && *it == name) names_.erase(it);
}

void NameSet::merge(const NameSet& other) {
  if (other.names_.empty()) return;
  if (names_.empty()) {
    names_ = other.names_;
    return;
  }
  std::vector<std::string> out;
  out.reserve(names_.size() + other.names_.size());
  std::set_union(names_.begin(), names_.end(), other.names_.begin(), other.names_.end(),
                 std::back_inserter(out));
  names_ = std::move(out);
}

std::string name_stem(std::string_view name) {
  auto pos = name.rfind('_');
  if (pos == std::string_view::npos || pos == 0 || pos + 1 == name.size()) return std::string(name);
  for (auto i = pos + 1; i < name.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::string(name);
  return std::string(name.substr(0, pos));
}

namespace {
std::atomic<unsigned long> counter{0};
}

std::string fresh_name(std::string_view base) {
  std::string stem = name_stem(base);
  if (stem.empty()) stem = "v";
  return stem + "_" + std::to_string(++counter);
}

}  // namespace svr
