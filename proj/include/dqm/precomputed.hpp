#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>

#include "dqm/scoring.hpp"

namespace dqm {

// Specificity scores read from JSONL, one object per line:
//   {"id_a": str, "id_b": str, "general": num, "specific": num, "other": num}
// A query for (b, a) is answered from the (a, b) row with general and
// specific swapped when only the forward row exists.
class PrecomputedClassifier final : public SpecificityClassifier {
 public:
  static PrecomputedClassifier load(const std::filesystem::path& path);
  void insert(std::string id_a, std::string id_b, SpecificityDistribution dist);

  std::vector<SpecificityDistribution> classify(std::span<const PairQuery> pairs) const override;
  size_t size() const noexcept { return table_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, SpecificityDistribution> table_;
};

}  // namespace dqm
