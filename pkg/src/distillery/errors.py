"""Exception hierarchy shared by all distillery modules."""


class DistilleryError(ValueError):
    """Base class for every error raised by the package."""


class DomainError(DistilleryError):
    """A parameter lies outside the range where a formula is defined."""


class InvalidStateError(DistilleryError):
    """A pure state is malformed (zero norm, non-finite entries, ...)."""


class DivergentStateError(DomainError):
    """A squeezing-type parameter >= 1 would give an unnormalizable state."""


class TruncationMismatchError(DistilleryError):
    """Two operands of a binary operation use different Fock cutoffs."""


class InvalidDensityError(DistilleryError):
    """A density matrix is not Hermitian or not positive semidefinite."""


class DegenerateResourceError(DistilleryError):
    """The resource state has no vacuum component, so the mashing map is singular."""


class CapacityError(DistilleryError):
    """A dense reference computation was requested at too large a cutoff."""


class OverCoupledError(DomainError):
    """A memory coupling implies a beamsplitter reflectivity above one."""
