#pragma once

#include <stdexcept>
#include <string>

namespace distlab {

#define DISTLAB_DEFINE_ERROR(Name)                                    \
  struct Name : std::runtime_error {                                  \
    explicit Name(const std::string& detail)                          \
        : std::runtime_error(std::string(#Name) + ": " + detail) {}   \
  }

// Chain analysis
DISTLAB_DEFINE_ERROR(NotIrreducible);
DISTLAB_DEFINE_ERROR(NotAperiodic);

// Representations
DISTLAB_DEFINE_ERROR(DimensionMismatch);
DISTLAB_DEFINE_ERROR(InvalidBlock);
DISTLAB_DEFINE_ERROR(EmptySupport);
DISTLAB_DEFINE_ERROR(IndefiniteKernel);

// Fixed points and runners
DISTLAB_DEFINE_ERROR(ConvergenceFailure);
DISTLAB_DEFINE_ERROR(RegimeUnsupported);
DISTLAB_DEFINE_ERROR(DegenerateSampling);
DISTLAB_DEFINE_ERROR(PhaseSupportViolation);

// Bound calculator
DISTLAB_DEFINE_ERROR(SelectionFailed);
DISTLAB_DEFINE_ERROR(NonpositiveDrift);
DISTLAB_DEFINE_ERROR(WindowViolated);
DISTLAB_DEFINE_ERROR(InadmissibleSchedule);
DISTLAB_DEFINE_ERROR(OptimizerStalled);

// Oracles
DISTLAB_DEFINE_ERROR(AtomBudgetExceeded);
DISTLAB_DEFINE_ERROR(OracleScaleExceeded);

// Configuration ingestion
DISTLAB_DEFINE_ERROR(ConfigError);

#undef DISTLAB_DEFINE_ERROR

}  // namespace distlab
