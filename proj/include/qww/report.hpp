#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qww/types.hpp"

namespace qww {

/// Running max-abs and sum-of-squares over complex residual samples.
struct NormAccumulator {
  double max_abs = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(cplx v) {
    const double a = std::abs(v);
    if (a > max_abs) max_abs = a;
    sum_sq += std::norm(v);
    ++count;
  }
  void merge(const NormAccumulator& o) {
    if (o.max_abs > max_abs) max_abs = o.max_abs;
    sum_sq += o.sum_sq;
    count += o.count;
  }
  double l2() const;
};

struct ResidualEntry {
  std::string name;
  double max_abs = 0.0;
  double l2 = 0.0;
  std::size_t count = 0;
};

/// Named per-term norms and per-variant residuals from one audit.
class ResidualReport {
 public:
  explicit ResidualReport(std::string title = {}) : title_(std::move(title)) {}

  const std::string& title() const { return title_; }

  void add(const std::string& name, const NormAccumulator& acc);
  void add(const std::string& name, double max_abs, double l2, std::size_t count = 0);
  bool has(const std::string& name) const;
  const ResidualEntry& get(const std::string& name) const;
  const std::vector<ResidualEntry>& entries() const { return entries_; }

  void note(const std::string& key, const std::string& value) { notes_[key] = value; }
  const std::map<std::string, std::string>& notes() const { return notes_; }
  std::string note_or(const std::string& key, const std::string& fallback) const;

  nlohmann::ordered_json to_json() const;

 private:
  std::string title_;
  std::vector<ResidualEntry> entries_;
  std::map<std::string, std::string> notes_;
};

}  // namespace qww
