"""Certificate-producing calculus for large subsets of the positive integers.

Sets are described by immutable :mod:`lsc.setcalc` expressions, judged by the
three-valued deciders in :mod:`lsc.certify`, and built by the procedures in
:mod:`lsc.constructions` and :mod:`lsc.words`.
"""

__version__ = "0.1.0"

from lsc.errors import (  # noqa: F401
    CarveError,
    DSLError,
    InputError,
    LscError,
    StructuralError,
)
from lsc.schedules import Explicit, Geometric, Layout, Separated, Stride  # noqa: F401
from lsc.setcalc import (  # noqa: F401
    Compl,
    Dilate,
    Empty,
    Finite,
    Full,
    Inter,
    Quotient,
    Residue,
    Return,
    ShiftDown,
    ShiftUp,
    Thick,
    Union,
    Window,
    difference_set_window,
    eventually_periodic_normalize,
    member,
    window,
)
from lsc.wordspec import FIBONACCI, THUE_MORSE, Periodic, Sturmian, Substitution, expand  # noqa: F401
