"""anderson_forge: exact and v-adically certified arithmetic for Drinfeld
modules, Anderson t-modules and their dual t-motives over F_q[theta]."""

__version__ = "0.1.0"

from .algebra import AlgCoeff, AlgFrac  # noqa: E402
from .drinfeld import DrinfeldModule, exp_phi, log_phi  # noqa: E402
from .errors import ForgeError  # noqa: E402
from .ff import FieldParams  # noqa: E402
from .laurent import LaurentApprox  # noqa: E402
from .tate import TateSeries  # noqa: E402

__all__ = [
    "AlgCoeff",
    "AlgFrac",
    "DrinfeldModule",
    "FieldParams",
    "ForgeError",
    "LaurentApprox",
    "TateSeries",
    "__version__",
    "exp_phi",
    "log_phi",
]
