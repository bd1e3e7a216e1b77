#include "dqm/precomputed.hpp"

#include "dqm/error.hpp"
#include "dqm/jsonl.hpp"

namespace dqm {

PrecomputedClassifier PrecomputedClassifier::load(const std::filesystem::path& path) {
  PrecomputedClassifier out;
  size_t line_no = 0;
  for (const auto& row : read_jsonl(path)) {
    ++line_no;
    try {
      SpecificityDistribution d{row.at("general").get<double>(), row.at("specific").get<double>(),
                                row.at("other").get<double>()};
      d.validate(1e-3);
      out.insert(row.at("id_a").get<std::string>(), row.at("id_b").get<std::string>(), d);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void PrecomputedClassifier::insert(std::string id_a, std::string id_b, SpecificityDistribution dist) {
  table_[{std::move(id_a), std::move(id_b)}] = dist;
}

std::vector<SpecificityDistribution> PrecomputedClassifier::classify(
    std::span<const PairQuery> pairs) const {
  std::vector<SpecificityDistribution> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (auto it = table_.find({p.id_a, p.id_b}); it != table_.end()) {
      out.push_back(it->second);
    } else if (auto rev = table_.find({p.id_b, p.id_a}); rev != table_.end()) {
      out.push_back(rev->second.swapped());
    } else {
      throw BackendError("no precomputed score for pair (" + p.id_a + ", " + p.id_b + ")");
    }
  }
  return out;
}

}  // namespace dqm
