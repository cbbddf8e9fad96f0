"""p-homogeneous penalties and their proximal maps."""

from randtomo.regularization.penalty import Penalty, Subgradient, besov_weights
from randtomo.regularization.prox import prox_power, signed_power

__all__ = ["Penalty", "Subgradient", "besov_weights", "prox_power", "signed_power"]
