#ifndef CKFZ_IDENTITIES_HPP_
#define CKFZ_IDENTITIES_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ckfz/ckf.hpp"

namespace ckfz {

inline constexpr double kIdentityTol = 1e-10;

enum class IdentityScope {
  // Holds for every conformal Killing field.
  General,
  // Requires X . curl X == 0.
  SimpleRotation,
};

struct IdentityInfo {
  std::string id;
  // The identity as a formula; Y = curl X, w = |X|, grad_V U = (V . grad) U.
  std::string formula;
  IdentityScope scope;
};

struct IdentityReport {
  std::string identity_id;
  Vector3d point;
  double residual = 0.0;
  double tolerance = kIdentityTol;
  bool pass = false;
};

// Every registered identity, in a fixed order.
const std::vector<IdentityInfo>& identity_registry();

// Max-norm of LHS - RHS with all derivatives taken by automatic differentiation.
// Throws UnknownIdentity for an unregistered id and FrameUndefined when the
// identity involves w^-1 (or the unit frame) at a point where it is not defined.
IdentityReport check_identity(const std::string& id, const CkfParams& p, const Vector3d& x,
                              double tolerance = kIdentityTol);

// Samples n_points uniformly in [-2, 2]^3 (rejecting w <= kFrameEps) and checks every
// applicable identity at each point. SimpleRotation identities are skipped unless p
// satisfies the simple-rotation condition; identities undefined at a sampled point
// (for example the unit frame where curl X = 0) are skipped at that point.
std::vector<IdentityReport> run_identity_suite(const CkfParams& p, int n_points, std::uint64_t seed,
                                               double tolerance = kIdentityTol);

struct IdentityCampaign {
  long checks = 0;
  long failures = 0;
  double worst_residual = 0.0;
  std::string worst_id;
  std::vector<IdentityReport> failed;
};

// Every general identity at n_general random (field, point) pairs, then every
// identity at one point for each of n_simple random simple-rotation fields (kinds
// in turn). Deterministic in the seed.
IdentityCampaign identity_campaign(int n_general, int n_simple, std::uint64_t seed,
                                   double tolerance = kIdentityTol);

// (a.sigma)(b.sigma) - (a.b) I - i (a x b).sigma, max-norm.
double pauli_product_residual(const Vector3d& a, const Vector3d& b);
// a x (b x c) - (a.c) b + (a.b) c, max-norm.
double triple_product_residual(const Vector3d& a, const Vector3d& b, const Vector3d& c);

}  // namespace ckfz

#endif  // CKFZ_IDENTITIES_HPP_
