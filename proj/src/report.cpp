#include "qww/report.hpp"

#include <cmath>

namespace qww {

double NormAccumulator::l2() const { return std::sqrt(sum_sq); }

void ResidualReport::add(const std::string& name, const NormAccumulator& acc) {
  add(name, acc.max_abs, acc.l2(), acc.count);
}

void ResidualReport::add(const std::string& name, double max_abs, double l2, std::size_t count) {
  for (auto& e : entries_) {
    if (e.name == name) {
      e = ResidualEntry{name, max_abs, l2, count};
      return;
    }
  }
  entries_.push_back(ResidualEntry{name, max_abs, l2, count});
}

bool ResidualReport::has(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.name == name) return true;
  return false;
}

const ResidualEntry& ResidualReport::get(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.name == name) return e;
  throw std::out_of_range("report '" + title_ + "' has no entry '" + name + "'");
}

std::string ResidualReport::note_or(const std::string& key, const std::string& fallback) const {
  auto it = notes_.find(key);
  return it == notes_.end() ? fallback : it->second;
}

nlohmann::ordered_json ResidualReport::to_json() const {
  nlohmann::ordered_json j;
  j["title"] = title_;
  auto& arr = j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : entries_)
    arr.push_back({{"name", e.name}, {"max_abs", e.max_abs}, {"l2", e.l2}, {"count", e.count}});
  auto& n = j["notes"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : notes_) n[k] = v;
  return j;
}

}  // namespace qww
