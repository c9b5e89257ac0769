#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "latcoh/series.hpp"
#include "latcoh/verify.hpp"

namespace latcoh {

using Json = nlohmann::ordered_json;

constexpr const char* kSchema = "latcoh/v1";

Json rat_vec_json(const RatVec& v);
Json int_vec_json(const IntVec& v);
Json invariants_json(const LatticeContext& ctx, const HClass& h);

Json module_json(const ZUModule& m);
Json root_json(const GradedRoot& r);
// per level betti numbers, torsion and components; Z[U]-modules; eu
Json homology_json(const SublevelModel& m);

// page = 0 exports every page, otherwise only E^page
Json row_json(const SpectralRow& r, int page = 0);
Json rows_json(const std::vector<SpectralRow>& rows, int page = 0);
std::string row_text(const SpectralRow& r, int page = 0);

Json series_json(const Series& s);
Json tail_json(const TailReport& t);
Json sw_json(const SwReport& r);
Json ar_json(const ArReport& r);
Json wbar_json(const ReducedContext& rc, const IntVec& rect);
Json verify_json(const VerifyReport& r);

}  // namespace latcoh
