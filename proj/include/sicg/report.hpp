#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sicg/fiducial.hpp"
#include "sicg/galois.hpp"
#include "sicg/reference.hpp"

namespace sicg {

// 2a and the qutrit orbits 3b, 3c built from their closed forms; NotConverged otherwise.
FiducialProjector special_fiducial(const std::string& label);

// Orbit type implied by a box: the order-3 elements of <F0> with det 1 and trace -1.
OrbitType record_type(const OrbitRecord& r);

struct ReportOptions {
  int threads = 0;
  bool discover = true;          // run the Galois discovery and, for doublets, the switch map
  bool use_bundled = true;       // prefer data/fiducials/<label>.fid over a fresh search
  std::uint64_t seed = 1;
  std::string fiducial_path;     // explicit fiducial file for a single-orbit report
};

// Fiducial for an orbit label: explicit path, bundled file, closed form, or search
// accepting |S~| equal to the box value. source receives "file", "bundled", "closed-form" or "searched".
FiducialProjector orbit_fiducial(const std::string& label, const ReportOptions& options, std::string* source = nullptr);

struct ReportCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct OrbitReport {
  std::string label;
  long d = 0;
  std::string source;
  std::size_t s_tilde = 0, s_bar = 0, centralizer = 0, normalizer = 0;
  bool s_bar_abelian = false;
  std::string orbit_type;
  std::string quotient;  // C / S-bar invariants, or "undefined" when S-bar is non-abelian
  std::optional<long> a_radicand;
  std::optional<int> structure_case;
  std::string discovered;  // discovered quotient invariants, empty when not run
  std::vector<ReportCheck> checks;
  double seconds = 0;

  bool pass() const;
  std::string text() const;
  std::vector<std::pair<std::string, std::string>> key_values() const;
};

// Structured report for one orbit label ("5a", "9b", "2a"); FormatError for unknown labels.
OrbitReport report_orbit(const std::string& label, const ReportOptions& options);
// 2a, 3b, 3c when in range, then every bundled label with d in [dmin, dmax] in record order.
std::vector<std::string> report_labels(long dmin, long dmax);

}  // namespace sicg
