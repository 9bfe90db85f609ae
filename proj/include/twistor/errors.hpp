#pragma once

#include <stdexcept>
#include <string>

namespace twistor {

// Every failure mode carries a stable code name so batch runs can report
// per-point diagnostics without string matching on messages.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

#define TWISTOR_ERROR(NAME)                                        \
    class NAME : public Error {                                    \
    public:                                                        \
        explicit NAME(const std::string& what) : Error(#NAME, what) {} \
    }

// annulus_kernel
TWISTOR_ERROR(NearZeroOnCircle);
TWISTOR_ERROR(PhaseJumpTooLarge);
TWISTOR_ERROR(NonzeroIndex);
TWISTOR_ERROR(TArgumentOutOfDisk);
TWISTOR_ERROR(SpectralTailTooFat);

// interpolation_scaffold
TWISTOR_ERROR(DuplicateNodes);
TWISTOR_ERROR(LambdaZero);
TWISTOR_ERROR(FMinusNearZero);
TWISTOR_ERROR(NodePlacement);

// riemann_solver
TWISTOR_ERROR(IndexNotOne);
TWISTOR_ERROR(MaxItersExceeded);
TWISTOR_ERROR(LeftTDisk);
TWISTOR_ERROR(PathLeftValidityRegion);

// pde_core
TWISTOR_ERROR(DegenerateLambdas);
TWISTOR_ERROR(CoincidentPoints);
TWISTOR_ERROR(RatioDegenerate);
TWISTOR_ERROR(GridTooSmall);
TWISTOR_ERROR(LambdaContainsZeroOrInfinity);
TWISTOR_ERROR(UnknownFixture);

// gluing_builder
TWISTOR_ERROR(DerivativeBlowup);
TWISTOR_ERROR(LeftDomain);
TWISTOR_ERROR(MuTooCloseToPole);
TWISTOR_ERROR(ODEStepFailure);
TWISTOR_ERROR(NondegeneracyLost);
TWISTOR_ERROR(QEqualsOne);
TWISTOR_ERROR(InverseOutOfRange);

// backlund
TWISTOR_ERROR(ProportionalTriples);
TWISTOR_ERROR(HypothesisViolated);

#undef TWISTOR_ERROR

// Config-level numeric constants.  Gathered here so no module hides a
// magic number; see README for what each one gates.
namespace config {
inline constexpr double index_floor = 1e-10;       // min |phi| on circle samples
inline constexpr double phase_jump_max = 1.5707963267948966;  // pi/2
inline constexpr double tail_mass_rel = 1e-10;     // spectral tail adequacy
inline constexpr double node_clearance = 0.05;     // node distance to unit circle
inline constexpr double inner_value_margin = 0.9;  // |t~| < margin * delta
inline constexpr double mu_pole_clearance = 0.05;  // eps_1 of the gluing ODE family
inline constexpr int default_half_order = 32;      // N (64 samples)
inline constexpr double default_tol = 1e-12;
inline constexpr int default_max_iters = 50;
inline constexpr int default_homotopy_steps = 64;
inline constexpr double default_t_max = 0.02;
inline constexpr int default_cheb_degree = 12;
inline constexpr double ode_tol = 1e-10;
}  // namespace config

}  // namespace twistor
