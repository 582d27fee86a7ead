#include "api2com/harness/stratify.hpp"

namespace api2com::harness {

Stratum stratum_for(std::size_t n) {
  switch (n) {
    case 0: return Stratum::Zero;
    case 1: return Stratum::One;
    case 2: return Stratum::Two;
    case 3: return Stratum::Three;
    default: return Stratum::FourPlus;
  }
}

std::string label(Stratum s) {
  switch (s) {
    case Stratum::Zero: return "0 APIs";
    case Stratum::One: return "1 API";
    case Stratum::Two: return "2 APIs";
    case Stratum::Three: return "3 APIs";
    case Stratum::FourPlus: return ">=4 APIs";
  }
  return "?";
}

std::size_t resolvable_api_count(const apikb::ApiDocKb& kb, const std::vector<javaparse::ApiCall>& calls) {
  return apikb::resolved_docs(kb, calls).size();
}

std::size_t Strata::total() const {
  std::size_t n = 0;
  for (const auto& m : members) n += m.size();
  return n;
}

Strata stratify_by_api_count(const std::vector<std::size_t>& api_counts) {
  Strata s;
  for (std::size_t i = 0; i < api_counts.size(); ++i) {
    s.members[static_cast<std::size_t>(stratum_for(api_counts[i]))].push_back(i);
  }
  return s;
}

std::array<double, 5> mean_doc_lengths(const Strata& strata, const std::vector<std::vector<std::string>>& docs) {
  std::array<double, 5> out{};
  for (std::size_t k = 0; k < 5; ++k) {
    const auto& m = strata.members[k];
    if (m.empty()) continue;
    std::size_t total = 0;
    for (auto i : m) {
      for (const auto& t : docs.at(i)) total += t != apikb::kSepToken;
    }
    out[k] = static_cast<double>(total) / static_cast<double>(m.size());
  }
  return out;
}

}  // namespace api2com::harness
