#pragma once

#include <json.hpp>

#include "chaoslab/chaos.hpp"
#include "chaoslab/constructions.hpp"
#include "chaoslab/forms.hpp"
#include "chaoslab/inequalities.hpp"
#include "chaoslab/search.hpp"

namespace chaoslab {

// Stable-schema JSON views (ordered keys; exact rationals as strings).
using Json = nlohmann::ordered_json;

Json to_json(const ExactDyadic& d);
Json to_json(const MomentResult& m);
Json to_json(const NormCertificate& c);
Json to_json(const BoundReport& r);
Json to_json(const FitResult& f);
Json to_json(const KszCertificate& c);
Json to_json(const SliceLowerBound& s);
Json to_json(const SearchResult& s);
Json to_json(const CoefficientTensor& a);

}  // namespace chaoslab
