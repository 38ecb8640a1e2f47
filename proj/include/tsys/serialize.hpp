#pragma once

#include <json.hpp>

#include "tsys/colloc.hpp"
#include "tsys/family.hpp"
#include "tsys/karlin.hpp"
#include "tsys/moments.hpp"
#include "tsys/smooth.hpp"
#include "tsys/snake.hpp"
#include "tsys/zerocalc.hpp"

// JSON forms of the library types. Objects use std::map, so keys come out sorted and
// floats print in shortest round-trip form.
namespace tsys {

using Json = nlohmann::json;

void to_json(Json& j, const Domain& d);
void from_json(const Json& j, Domain& d);
void to_json(Json& j, const FamilySpec& f);  ///< throws InvalidArgument for custom families
void from_json(const Json& j, FamilySpec& f);
void to_json(Json& j, const SparsePoly& p);
void from_json(const Json& j, SparsePoly& p);
void to_json(Json& j, const Node& n);
void from_json(const Json& j, Node& n);
void to_json(Json& j, const GridSpec& g);
void from_json(const Json& j, GridSpec& g);
void to_json(Json& j, const SystemCertificate& c);
void to_json(Json& j, const Zero& z);
void to_json(Json& j, const ZeroConfig& z);
void to_json(Json& j, const KarlinDecomposition& k);
void to_json(Json& j, const SnakeSolution& s);
void to_json(Json& j, const BestApproximation& b);
void to_json(Json& j, const Atom& a);
void from_json(const Json& j, Atom& a);
void to_json(Json& j, const AtomicMeasure& m);
void from_json(const Json& j, AtomicMeasure& m);
void to_json(Json& j, const MomentFunctional& m);
void from_json(const Json& j, MomentFunctional& m);
void to_json(Json& j, const HankelVerdict& h);
void to_json(Json& j, const FeasibilityVerdict& v);
void to_json(Json& j, const RecoveryResult& r);
void to_json(Json& j, const RatioResult& r);
void to_json(Json& j, const TpVerdict& v);

/// Curve from a number (constant), {"x": [...], "y": [...]} (piecewise linear) or a SparsePoly object.
[[nodiscard]] Curve curve_from_json(const Json& j);

/// Throws Errc::Parse naming the key when it is missing.
[[nodiscard]] const Json& require(const Json& j, const char* key);

}  // namespace tsys
