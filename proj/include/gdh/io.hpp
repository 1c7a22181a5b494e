#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "gdh/coeffs.hpp"
#include "gdh/factorization.hpp"
#include "gdh/geometry.hpp"
#include "gdh/nehari.hpp"
#include "gdh/norms.hpp"
#include "gdh/operators.hpp"

namespace gdh {

using Json = nlohmann::json;

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

MultiSequence multisequence_from_json(const Json& j);
Json to_json(const MultiSequence& a);
MultiSequence load_multisequence(const std::string& path);
void save_multisequence(const MultiSequence& a, const std::string& path);

Kernel kernel_from_json(const Json& j);
Json to_json(const Kernel& f);

Polytope polytope_from_json(const Json& j);
Json to_json(const Polytope& p);
StaircaseSpec staircase_from_json(const Json& j);
/// {"d", "cells": [[...], ...], optional "spacing", "origin"}.
GridMask mask_from_json(const Json& j);
Json to_json(const GridMask& m);

struct Domain {
  GridMask mask;
  DomainKind kind = DomainKind::BoundedMask;
};

/// Dispatches on the keys present: "boxes" (staircase), "vertices" (polytope)
/// or "cells" (explicit mask).
Domain domain_from_json(const Json& j, double spacing);

CubeFunction cube_function_from_json(const Json& j);
Json to_json(const CubeFunction& g);

Json to_json(const NormEstimate& e);
Json to_json(const ExtensionResult& r);
Json to_json(const CertifiedExtension& r);
Json to_json(const FactorizationResult& r);
Json to_json(const CertificateSweep& s);
Json to_json(const SweepReport& r);
void write_sweep_csv(const SweepReport& r, std::ostream& out);

}  // namespace gdh
