#pragma once

#include <json.hpp>
#include <vector>

#include "crossreg/acceptance.hpp"
#include "crossreg/bifurcation.hpp"
#include "crossreg/classify.hpp"
#include "crossreg/equilibria.hpp"
#include "crossreg/flow.hpp"

namespace crossreg {

using Json = nlohmann::ordered_json;

// Non-finite numbers become the strings "nan", "inf", "-inf".
Json number(double v);

Json to_json(const ClassificationResult& r);
Json to_json(const OriginData& d);
Json to_json(const ClosedForm& c);
Json to_json(const HyperbolicityVerdict& v);
Json to_json(const EquilibriumScan& s);
Json to_json(const std::vector<Equilibrium>& eq);
Json to_json(const BifurcationCertificate& c);
Json to_json(const FamilyTranscritical& t);
Json to_json(const FamilySaddleNode& t);
Json to_json(const FixedEtaSaddleNode& t);
Json to_json(const HopfAnalysis& h);
Json to_json(const Trajectory& t);  // events and end state, not the samples
Json to_json(const std::vector<CriterionResult>& r);

}  // namespace crossreg
