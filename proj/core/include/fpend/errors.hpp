#pragma once

#include <stdexcept>
#include <string>

namespace fpend {

/// Base for all numerical failures raised by the library. Sweeps catch this
/// and record the failure per row instead of aborting.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct NoConvergence : NumericalError {
    explicit NoConvergence(const std::string& what) : NumericalError(what) {}
};

struct SingularJacobian : NumericalError {
    explicit SingularJacobian(const std::string& what) : NumericalError(what) {}
};

struct GridTooCoarse : NumericalError {
    explicit GridTooCoarse(const std::string& what) : NumericalError(what) {}
};

struct ManifoldEscape : NumericalError {
    explicit ManifoldEscape(const std::string& what) : NumericalError(what) {}
};

struct NonUnitaryInput : NumericalError {
    explicit NonUnitaryInput(const std::string& what) : NumericalError(what) {}
};

struct PoleAtDegeneracy : NumericalError {
    explicit PoleAtDegeneracy(const std::string& what) : NumericalError(what) {}
};

struct InvalidRegime : NumericalError {
    explicit InvalidRegime(const std::string& what) : NumericalError(what) {}
};

struct IndeterminateLabel : NumericalError {
    explicit IndeterminateLabel(const std::string& what) : NumericalError(what) {}
};

}  // namespace fpend
