"""Asymptotic structure of finite-dimensional quantum channels.

Peripheral spectra, attractor algebras under the Choi-Effros product,
decoherence-free algebras and faithfulness, with every structural identity
cross-checked numerically.
"""
from .asalg import AnalysisReport, CStarPresentation, classify
from .channel import Channel, builtin, load_channel, make_channel, random_ucp, save_channel
from .errors import ConsistencyError, InvalidChannelError, NumericFailure, QdfaError
from .matcore import DEFAULT_TOL, OperatorSubspace, Tolerances
from .spectral import PeripheralData, peripheral_projection, spectrum

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "CStarPresentation",
    "Channel",
    "ConsistencyError",
    "DEFAULT_TOL",
    "InvalidChannelError",
    "NumericFailure",
    "OperatorSubspace",
    "PeripheralData",
    "QdfaError",
    "Tolerances",
    "builtin",
    "classify",
    "load_channel",
    "make_channel",
    "peripheral_projection",
    "random_ucp",
    "save_channel",
    "spectrum",
]
