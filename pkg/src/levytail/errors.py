"""Exception types shared across the package."""


class InfiniteSecondMomentError(ValueError):
    """Raised when an untruncated squared distance hits a reference with a pole.

    A power-law reference with exponent at most 2 has no second moment, so
    the untruncated squared Wasserstein distance to it is infinite.
    """


class QuadratureError(ArithmeticError):
    """Raised when adaptive quadrature exhausts its evaluation budget."""
