#ifndef CKFZ_TESTS_HOLONOMY_CASES_HPP_
#define CKFZ_TESTS_HOLONOMY_CASES_HPP_

#include <string>
#include <vector>

#include "ckfz/ckf.hpp"
#include "ckfz/flows.hpp"
#include "ckfz/potential.hpp"

namespace ckfz::testing {

// A closed orbit of an admissible field together with a parallel potential.
struct HolonomyCase {
  std::string label;
  CkfParams field;
  PotentialSpec potential;
  Vector3d x0;
};

inline PotentialSpec ro_bump_potential() {
  return PotentialSpec::axial(Profile::smooth_bump(0.5, 6.0, 2.0), Profile::smooth_bump(-1.5, 1.5, 1.0));
}

inline PotentialSpec cr_modulated_potential(double mu) {
  return PotentialSpec::modulated(PotentialSpec::hopf_base(mu), Profile::smooth_bump(0.05, 0.95, 1.5),
                                  Profile::cosine(2.0, 0.4, 1.0));
}

inline std::vector<HolonomyCase> holonomy_cases() {
  return {
      {"ro/axial r=0.5", ro_field(), ro_bump_potential(), Vector3d(0.5, 0.0, 0.3)},
      {"ro/axial r=1", ro_field(), ro_bump_potential(), Vector3d(0.0, 1.0, -0.2)},
      {"ro/axial r=2", ro_field(), ro_bump_potential(), Vector3d(-1.2, 1.6, 0.0)},
      {"cr:0.5/hopf rho=0.5", cr_field(0.5), PotentialSpec::hopf_base(0.5), cr_curve_point(0.5, 0.5, 0.3, 0.0)},
      {"cr:1/hopf rho=0.1", cr_field(1.0), PotentialSpec::hopf_base(1.0), cr_curve_point(1.0, 0.1, 0.0, 0.0)},
      {"cr:1/hopf rho=0.9", cr_field(1.0), PotentialSpec::hopf_base(1.0), cr_curve_point(1.0, 0.9, 2.0, 0.0)},
      {"cr:1/modulated rho=0.5", cr_field(1.0), cr_modulated_potential(1.0), cr_curve_point(1.0, 0.5, 1.0, 0.0)},
      {"cr:2/hopf rho=0.5", cr_field(2.0), PotentialSpec::hopf_base(2.0), cr_curve_point(2.0, 0.5, 0.0, 0.0)},
      {"cr:2/modulated rho=0.9", cr_field(2.0), cr_modulated_potential(2.0), cr_curve_point(2.0, 0.9, -1.0, 0.0)},
  };
}

// Orbit through the case's starting point at the resolution used throughout the checks.
inline CurveTrace holonomy_orbit(const HolonomyCase& c) {
  return integrate_curve(c.field, c.x0, 100.0, 1e-11);
}

}  // namespace ckfz::testing

#endif  // CKFZ_TESTS_HOLONOMY_CASES_HPP_
