"""Exception types raised across the package."""


class FreqGCError(Exception):
    """Base class for all errors raised by freqgc."""


class InvalidSpec(FreqGCError, ValueError):
    pass


class UnstableSystem(FreqGCError):
    def __init__(self, radius, msg=None):
        self.radius = float(radius)
        super().__init__(msg or f"system is unstable (spectral radius {self.radius:.6g} >= 1)")


class EigenFailure(FreqGCError):
    pass


class NonPosDefSigma(FreqGCError, ValueError):
    pass


class NonDiagonalSigma(FreqGCError, ValueError):
    pass


class InsufficientData(FreqGCError, ValueError):
    pass


class SingularRegressors(FreqGCError):
    pass


class SingularAtFrequency(FreqGCError):
    def __init__(self, bin_index, freq=None):
        self.bin_index = int(bin_index)
        self.freq = freq
        where = f"bin {self.bin_index}" + (f" ({freq:.6g} Hz)" if freq is not None else "")
        super().__init__(f"matrix is numerically singular at {where}")


class NoConvergence(FreqGCError):
    def __init__(self, residual, iterations):
        self.residual = float(residual)
        self.iterations = int(iterations)
        super().__init__(
            f"Riccati iteration did not converge after {self.iterations} "
            f"iterations (last update {self.residual:.3e})"
        )


class IndefiniteIterate(FreqGCError):
    pass


class GridMismatch(FreqGCError, ValueError):
    pass
