#ifndef CKFZ_TOOLS_SPEC_IO_HPP_
#define CKFZ_TOOLS_SPEC_IO_HPP_

// JSON forms of the library's parameter types, plus the text shorthands the CLI
// accepts for them. Parse failures throw ckfz::Error(InvalidArgument).

#include <string>
#include <vector>

#include <json.hpp>

#include "ckfz/ckf.hpp"
#include "ckfz/dirac_grid.hpp"
#include "ckfz/potential.hpp"
#include "ckfz/profile.hpp"
#include "ckfz/spinor_field.hpp"

namespace ckfz::io {

using nlohmann::json;

json to_json(const Vector3d& v);
Vector3d vector_from_json(const json& j);
// "x,y,z"
Vector3d parse_vector(const std::string& text);
std::vector<double> parse_list(const std::string& text);

json to_json(const CkfParams& p);
// {"a": [..], "b0": .., "b": [..], "c": [..]}; absent keys are zero.
CkfParams ckf_from_json(const json& j);
// ud | ro | cr:<mu> | ro+cr:<mu> | JSON object text
CkfParams parse_ckf(const std::string& text);

json to_json(const Profile& p);
Profile profile_from_json(const json& j);

json to_json(const PotentialSpec& s);
PotentialSpec potential_from_json(const json& j);
// zero | losyau | hopf:<mu> | axial-bump | modulated:<mu> | JSON object text
PotentialSpec parse_potential(const std::string& text);

json to_json(const SpinorField& f);
SpinorField spinor_from_json(const json& j);
// packet | torus | ball | JSON object text
SpinorField parse_spinor(const std::string& text);

// "n,L"
GridSpec parse_grid(const std::string& text, int stencil);
json to_json(const GridSpec& g);

// "a:b:step", inclusive of b up to rounding.
std::vector<double> parse_range(const std::string& text);

}  // namespace ckfz::io

#endif  // CKFZ_TOOLS_SPEC_IO_HPP_
