// Exception hierarchy for singode. Every failure mode of the library maps to
// one concrete type so callers can discriminate without string matching.
#pragma once

#include <stdexcept>
#include <string>

namespace singode {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Evaluation of F/zeta requested on or too close to the singular set.
struct SingularEvaluation : Error {
    using Error::Error;
};

// integrate_singular called with zeta(U0) <= 0.
struct InvalidInitialState : Error {
    using Error::Error;
};

// Adaptive step controller underflowed the minimum step without a
// classifiable termination.
struct StepFailure : Error {
    using Error::Error;
};

// Time rescaling requested on a trajectory where zeta <= 0 somewhere.
struct NotDiffeomorphism : Error {
    using Error::Error;
};

// Newton projection onto the singular set diverged for every seed.
struct SeedingFailed : Error {
    using Error::Error;
};

// The continuous extension of (grad zeta . F)/zeta does not exist near the
// requested point (directional quotients disagree).
struct ExtensionUndefined : Error {
    using Error::Error;
};

// No intersection of the equilibrium manifold with the singular set found.
struct NoIntersection : Error {
    using Error::Error;
};

// Spectral subspace separation below the conditioning threshold.
struct IllConditioned : Error {
    using Error::Error;
};

// Center manifold requested but the center subspace is trivial.
struct NoCenterDirections : Error {
    using Error::Error;
};

// A homological (order-matching) solve was singular.
struct ResolutionFailure : Error {
    using Error::Error;
};

// The quotient field on the center manifold has a pole on its singular slice.
struct DivisionDefect : Error {
    using Error::Error;
};

// No stable directions at a fiber base point.
struct NoStableDirections : Error {
    using Error::Error;
};

// Forward integration contradicted the predicted fiber decay.
struct ValidationFailure : Error {
    using Error::Error;
};

struct NotOnManifold : Error {
    using Error::Error;
};

struct NoAsymptoticEquilibrium : Error {
    using Error::Error;
};

// Block viscosity matrix b failed the invertibility audit.
struct NonInvertibleB : Error {
    using Error::Error;
};

struct InsufficientSamples : Error {
    using Error::Error;
};

// Residual of a reduced profile against the second-order equations does not
// converge; the block derivation is inconsistent.
struct DerivationInconsistency : Error {
    using Error::Error;
};

// A profile crossed the singular value of zeta.
struct SignViolation : Error {
    using Error::Error;
};

struct NonPositiveEnergy : Error {
    using Error::Error;
};

struct UnknownName : Error {
    using Error::Error;
};

}  // namespace singode
