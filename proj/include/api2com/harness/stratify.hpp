#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "api2com/apikb/kb.hpp"

namespace api2com::harness {

/// Zero is bookkeeping only and is left out of the stratified tables.
enum class Stratum { Zero = 0, One, Two, Three, FourPlus };

inline constexpr std::array<Stratum, 4> kReportedStrata = {Stratum::One, Stratum::Two, Stratum::Three,
                                                           Stratum::FourPlus};

Stratum stratum_for(std::size_t resolvable_calls);
std::string label(Stratum s);  // "0 APIs", "1 API", "2 APIs", "3 APIs", ">=4 APIs"

/// Number of resolvable calls, with consecutive repeats of one API counted
/// once (the same units that make up the doc sequence).
std::size_t resolvable_api_count(const apikb::ApiDocKb& kb, const std::vector<javaparse::ApiCall>& calls);

struct Strata {
  std::array<std::vector<std::size_t>, 5> members;  // record indices, by Stratum value

  const std::vector<std::size_t>& operator[](Stratum s) const { return members[static_cast<std::size_t>(s)]; }
  std::size_t total() const;
};

Strata stratify_by_api_count(const std::vector<std::size_t>& api_counts);

/// Mean doc length per stratum, not counting separator tokens; 0 for an
/// empty stratum.
std::array<double, 5> mean_doc_lengths(const Strata& strata, const std::vector<std::vector<std::string>>& docs);

}  // namespace api2com::harness
