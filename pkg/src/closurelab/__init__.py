"""closurelab: closure operations on sheaves over affine schemes, computed exactly.

The layers build on each other:

* :mod:`closurelab.algebra`: sparse polynomials over F_p and Q
* :mod:`closurelab.groebner`: Buchberger engine, membership, saturation
* :mod:`closurelab.rings`: presented rings, localization, R-circle tests
* :mod:`closurelab.closure`: closure oracles and axiom/gluing checkers
* :mod:`closurelab.tight`: Frobenius and bounded tight closure
* :mod:`closurelab.sheaf`: distinguished opens, closure sheaves, probes
"""

from .algebra import Poly, PolyRing, ceil_scale, frobenius_vector_power
from .groebner import (
    IdealPresentation,
    SubmodulePresentation,
    divide,
    elimination_ideal,
    express_in_ideal,
    groebner_basis,
    ideal_membership,
    ideal_quotient,
    module_membership,
    radical_membership,
    saturation,
)
from .rings import PresentedRing, Submodule, element_in_rcirc, is_unit_cover, local_membership, localize, make_ring
from .verdict import IN, NOT_IN, UNKNOWN, Verdict

__version__ = "0.1.0"
