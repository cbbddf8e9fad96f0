"""Linear operators: the discrete Radon transform and orthonormal analysis transforms."""

from randtomo.operators.radon import RadonOperator, SubsampledRadon, as_operator, estimate_op_norm
from randtomo.operators.wavelet import AnalysisTransform

__all__ = [
    "AnalysisTransform",
    "RadonOperator",
    "SubsampledRadon",
    "as_operator",
    "estimate_op_norm",
]
