#pragma once

#include <string_view>

#include "monopart/monotone_set.hpp"
#include "monopart/primitive.hpp"

namespace monopart {

/// Selection from the agent's argmax set when it has several elements.
enum class TieBreak { PrincipalPreferred, PrincipalWorst, Lowest };
std::string_view to_string(TieBreak tb) noexcept;

Element partition_element(const MonotoneSet& pi, double t);

/// c(t) for a separated state, the mean of c over the pooling interval otherwise.
double posterior_mean(const MonotoneSet& pi, double t, const PiecewisePoly& c);

/// Agent's choice from the delegation set pi at state t.
double best_decision_delegation(const Primitive& p, const MonotoneSet& pi, double t,
                                TieBreak tb = TieBreak::PrincipalPreferred);

/// Receiver's choice after learning the partition cell of t.
double best_decision_persuasion(const Primitive& p, const MonotoneSet& pi, double t,
                                TieBreak tb = TieBreak::PrincipalPreferred);

/// Receiver's choice for a given partition cell.
double best_decision_element(const Primitive& p, const Element& e,
                             TieBreak tb = TieBreak::PrincipalPreferred);

/// Delegation state at which the agent is indifferent between x1 and x2.
/// Clamped to the state domain when no such state exists.
double indifference_state(const Primitive& p, double x1, double x2);

}  // namespace monopart
