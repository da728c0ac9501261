"""Exception hierarchy shared by every cvmetro module."""

from __future__ import annotations


class CvMetroError(Exception):
    """Base class for all errors raised by cvmetro."""


class DomainError(CvMetroError, ValueError):
    """A parameter lies outside the domain where the quantity is defined."""


class NonConverged(CvMetroError):
    """The Fock-space truncation is too small for the requested accuracy.

    The offending tail mass (or the shift observed when the cutoff was
    raised) is attached as ``detail`` so callers can decide how far to raise
    the cutoff.
    """

    def __init__(self, message: str, detail: float | None = None):
        super().__init__(message)
        self.detail = detail


class CutoffMismatch(CvMetroError, ValueError):
    """Operators and states were built with different cutoffs."""


class HermiticityError(CvMetroError):
    """A matrix that must be Hermitian is not, beyond tolerance."""


class UnitarityError(CvMetroError):
    """A truncated unitary fails the lower-block unitarity check."""


class NotPure(CvMetroError):
    """A pure-state formula was applied to a mixed state."""


class NotGaussian(CvMetroError):
    """A Gaussian-only formula was applied to a non-Gaussian descriptor."""


class CPViolation(CvMetroError):
    """A Gaussian channel violates the complete-positivity condition."""


class SingularCovariance(CvMetroError):
    """A covariance matrix that has to be inverted is singular."""


class SingularObservableCovariance(CvMetroError):
    """The covariance of an observable set is singular even after regularisation."""


class SingularSchurComplement(CvMetroError):
    """The Schur complement in the block decomposition is singular."""


class MisalignedConfiguration(CvMetroError):
    """Supplied directions are not eigenvectors of the covariance matrix."""


class NotDichotomic(CvMetroError):
    """The observable does not have exactly two distinct eigenvalues."""


class NoClosedForm(CvMetroError):
    """No analytic expression is available for this state family."""


class UnknownTable(CvMetroError, KeyError):
    """The requested table identifier is not known."""
