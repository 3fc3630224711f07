"""quatlab: quaternion-valued quantum mechanics on a lattice.

Wavefunctions take values in the quaternions, evolve under the
Schroedinger equation with the imaginary unit multiplying the time
derivative from the right, and live in a real Hilbert space where the
expectation value of any operator is real by construction.  The package
provides the algebra, the lattice calculus, gauge and scalar potentials
(including the quaternionic magnetic field and its monopole density),
the operator layer, two evolution laws (right and left multiplied i),
and a battery of balance-law and operator-identity checks.
"""

__version__ = "0.1.0"

from .quaternion import Quaternion, QVector3, SymplecticPair, qcross
from .lattice import Grid, QField, QVectorField
from .operators import LinearOp, Units, expect, expect_physical

__all__ = [
    "__version__",
    "Quaternion", "QVector3", "SymplecticPair", "qcross",
    "Grid", "QField", "QVectorField",
    "LinearOp", "Units", "expect", "expect_physical",
]
