"""Default tolerances.

Coefficients are double-precision complex, so every verdict is taken
relative to an explicit tolerance.  The defaults below are deliberate
module-level constants: membership tests are the loosest, rank decisions
sit below them, and analyticity checks are the tightest since they compare
against exact zeros.
"""

from __future__ import annotations

MEMBERSHIP_TOL = 1e-8
RANK_TOL = 1e-9
ANALYTICITY_TOL = 1e-10

# Used where a quantity is zero in exact arithmetic and only rounding noise
# is admissible.
EXACT_TOL = 1e-12
