#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gdh/geometry.hpp"
#include "gdh/io.hpp"
#include "gdh/operators.hpp"

namespace gdh {

struct CaseRecord {
  std::string name;
  /// Generator parameters, enough to re-run the case.
  Json params;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  /// Short description of the identity being checked.
  std::string anchor;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  int count = 0;
  std::vector<CaseRecord> cases;
  bool passed = false;
  double wall_s = 0.0;

  /// Largest deviation / tolerance over the cases.
  double worst_ratio() const;
  std::size_t failures() const;
};

struct InvariantInfo {
  std::string id;
  std::string module;
  std::string text;
};

struct SuiteInfo {
  std::string name;
  std::string description;
  std::vector<std::string> covers;
  int default_count = 10;
  std::function<void(std::uint64_t seed, int count, SuiteReport& out)> body;
};

/// Every invariant of every module, by id.
const std::vector<InvariantInfo>& invariant_checklist();
const std::vector<SuiteInfo>& suite_registry();
/// Invariant ids not covered by any registered suite.
std::vector<std::string> uncovered_invariants();

SuiteReport run_suite(const std::string& name, std::uint64_t seed, int count);

Json to_json(const SuiteReport& r);
std::string junit_xml(const std::vector<SuiteReport>& reports);

// Random instance generators shared by the suites and the tests.
namespace gen {

Complex gaussian(std::mt19937_64& rng);
Kernel kernel(std::mt19937_64& rng, const Box& box);
Box box(std::mt19937_64& rng, int d, int max_extent, int max_offset);
/// Axis-connected random blob of about `cells` cells grown by a random walk from `start`.
GridMask blob(std::mt19937_64& rng, int d, int cells, MultiIndex start = {});
/// Convex polygon with `n` vertices on a circle.
Polytope polygon(std::mt19937_64& rng, int n, const Point& center, double radius);

}  // namespace gen

}  // namespace gdh
