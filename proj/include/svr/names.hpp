#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace svr {

// Small sorted set of variable names.
class NameSet {
 public:
  NameSet() = default;
  NameSet(std::initializer_list<std::string> names);

  bool contains(std::string_view name) const;
  void insert(const std::string& name);
  void erase(std::string_view name);
  void merge(const NameSet& other);

  bool empty() const { return names_.empty(); }
  std::size_t size() const { return names_.size(); }
  auto begin() const { return names_.begin(); }
  auto end() const { return names_.end(); }

  bool operator==(const NameSet&) const = default;

 private:
  std::vector<std::string> names_;
};

// Strips a trailing "_<digits>" suffix.
std::string name_stem(std::string_view name);

// Draws a name from the process-wide supply. Every draw is distinct.
std::string fresh_name(std::string_view base);

// Draws fresh names until `taken` rejects none.
template <class Taken>
std::string fresh_name_avoiding(std::string_view base, const Taken& taken) {
  for (;;) {
    std::string n = fresh_name(base);
    if (!taken(n)) return n;
  }
}

}  // namespace svr
