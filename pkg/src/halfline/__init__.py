"""Measures on the half-line: convolution algebra, Laplace transforms,
matrices over the algebra, shear factorizations, null-homotopies and the
spectrum of a measure whose transform does not generate its deformations."""

from .errors import (CertificateError, DegenerateError, DeterminantError,
                     DomainError, FormatError, HalfPlaneError, MembershipError,
                     NeumannError)
from .measure import (AlgebraClass, AlgebraKind, Density, HalfLineMeasure,
                      add, atom_at_zero, convolve, convolve_with_report, deform,
                      dirac, dirac_at, distance, from_function, scale, sub,
                      tv_norm, zero)
from .laplace import HalfPlanePoint, laplace_eval
from .matrix import MeasureMatrix, MeasureVector, det, frobenius_bound
from .elementary import ElementaryFactor, factor_complex, factor_poly
from .homotopy import HomotopyPath, approx_path, null_homotopy
from .spectra import nonexample_measure, spectrum_curve

__version__ = "0.1.0"
