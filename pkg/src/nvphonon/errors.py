"""Exception and warning types shared across the package.

Numerical failures (root finding, quadrature, truncation) derive from
NumericalError so the CLI can map them to a dedicated exit code; bad user
input derives from ConfigError.
"""


class NvPhononError(Exception):
    """Base class for all package errors."""


class ConfigError(NvPhononError):
    """Malformed or contradictory run configuration (CLI exit code 2)."""

    def __init__(self, message, *, line=None, key=None):
        self.line = line
        self.key = key
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if key is not None:
            prefix += f"key '{key}': "
        super().__init__(prefix + message)


class NumericalError(NvPhononError):
    """A numerical invariant failed (CLI exit code 3)."""


# ---- geometry / material ----

class NonPositiveDimension(ConfigError):
    """A length, density or rate that must be positive is not."""

    def __init__(self, message, **kw):
        super().__init__(message, **kw)


# ---- sphere eigenproblem ----

class InvalidQuantumNumber(NvPhononError):
    """Quantum numbers outside the allowed range (e.g. torsional l = 0)."""


class NoRootInBracket(NumericalError):
    """The sign-change scan exhausted its window without enough roots."""


class DegenerateNullspace(NumericalError):
    """Both rows of the spheroidal boundary matrix vanish at a root."""


class PointOutsideSphere(NvPhononError):
    """Field evaluation requested outside the particle."""


class QuadratureNotConverged(NumericalError):
    """Adaptive quadrature did not reach the requested tolerance."""


# ---- Hamiltonians ----

class TruncationTooSmall(NvPhononError):
    """Declared Fock truncation cannot hold the expected phonon excursion."""


class PerturbationInvalid(NvPhononError):
    """An adiabatic-elimination ratio is >= 1; the effective model is void."""


class ZeroSeparation(NvPhononError):
    """Dipolar couplings requested at zero emitter separation."""


class DressedResonance(NvPhononError):
    """A drive detuning collides with the optically dressed splitting j/2."""


class QuasiResonantDoubleExcitation(NvPhononError):
    """kappa1^2 * (j/eps) too large: doubly excited state not eliminable."""


class WeakDriving(NvPhononError):
    """Microwave Rabi frequency below the gate/shift scales it must beat."""


# ---- dynamics ----

class UnknownFrame(NvPhononError):
    """Dissipator frame must be 'lab' or 'effective_I'."""


class StepSizeUnderflow(NumericalError):
    """The integrator collapsed its step below the floor without progress."""


class TruncationLeak(NumericalError):
    """Population reached the top of the Fock ladder during evolution."""


class NoAdmissibleM(NvPhononError):
    """No phonon-closure index m satisfies the stated constraints."""


# ---- warnings ----

class HierarchyWarning(UserWarning):
    """A stated scale separation (eps >> Omega, eps << nu, ...) is violated."""


class PerturbationWarning(UserWarning):
    """An elimination ratio is large enough to distort effective models."""
