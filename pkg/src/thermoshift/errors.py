class ThermoshiftError(Exception):
    exit_code = 1
    tag = "error"


class ConfigError(ThermoshiftError, ValueError):
    exit_code = 2
    tag = "config-error"


class InvalidTransitions(ConfigError):
    tag = "invalid-transitions"


class MissingTailDescriptor(ConfigError):
    tag = "missing-tail-descriptor"

    def __init__(self, potential):
        super(MissingTailDescriptor, self).__init__(
            "Potential %r has no tail descriptor; summability cannot be decided." % (potential,))


class NumericalError(ThermoshiftError, ArithmeticError):
    exit_code = 3
    tag = "numerical-error"


class NonConvergence(NumericalError):
    tag = "non-convergence"

    def __init__(self, iterations, residual):
        self.iterations = iterations
        self.residual = residual
        super(NonConvergence, self).__init__(
            "Power iteration did not converge after %s iterations (residual %.3g)." % (iterations, residual))


class NoSignChange(NumericalError):
    tag = "no-sign-change"

    def __init__(self, lo, hi, f_lo, f_hi):
        self.bracket = lo, hi
        self.values = f_lo, f_hi
        super(NoSignChange, self).__init__(
            "Pressure does not change sign on [%r, %r]: P=%r and P=%r." % (lo, hi, f_lo, f_hi))


class NotPrimitive(NumericalError):
    tag = "not-primitive"

    def __init__(self, pair, bound):
        self.pair = pair
        self.bound = bound
        super(NotPrimitive, self).__init__(
            "No connector of length <= %s joins symbol %r to symbol %r." % (bound, pair[0], pair[1]))


class NotSummable(NumericalError):
    tag = "not-summable"

    def __init__(self, beta, beta_infinity):
        self.beta = beta
        self.beta_infinity = beta_infinity
        super(NotSummable, self).__init__(
            "beta=%r is not above beta_infinity=%r; Z_1 diverges on the full alphabet." % (beta, beta_infinity))


class CapExceeded(ThermoshiftError):
    exit_code = 4
    tag = "cap-exceeded"

    def __init__(self, count, cap, what="words"):
        self.count = count
        self.cap = cap
        super(CapExceeded, self).__init__(
            "Enumeration of %s would produce %s items (cap is %s)." % (what, count, cap))


class OutputError(ThermoshiftError, OSError):
    exit_code = 5
    tag = "io-error"
