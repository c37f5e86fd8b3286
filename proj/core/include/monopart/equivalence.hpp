#pragma once

#include <cstddef>

#include "monopart/primitive.hpp"

namespace monopart {

struct DualityResidual {
  double max_abs_U;
  double max_abs_V;
  std::size_t grid_size;
};

/// Persuasion primitive whose marginals are dU_P/dx(t, x) = -dU_D/dx(x, t)
/// (and likewise for V). The state of the result is the delegation decision.
Primitive delegation_to_persuasion(const Primitive& p);
/// Inverse of delegation_to_persuasion.
Primitive persuasion_to_delegation(const Primitive& p);

/// Largest |dU_D/dx(tD, tP) + dU_P/dx(tP, tD)| (and the V analogue) over an
/// n x n grid of delegation states tD and persuasion states tP.
DualityResidual duality_residual(const Primitive& pD, const Primitive& pP, std::size_t n = 64);

/// Composes the state parts with the quantile function so that the state
/// becomes uniform on [0, 1]. Identity when no distribution is attached.
Primitive quantile_reparameterize(const Primitive& p);

}  // namespace monopart
