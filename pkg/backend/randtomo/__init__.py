"""randtomo: p-homogeneous regularization for tomography with randomly sampled angles."""

__version__ = "0.1.0"

__all__ = ["__version__"]
