"""
The Gauss map T(x) = 1/x − ⌊1/x⌋ as the full shift on continued-fraction digits.

φ = −log|T′| = 2 log x. A digit word ω spells the cylinder with endpoints p_n/q_n and
(p_n + p_{n−1})/(q_n + q_{n−1}); every bound below comes from these integer continuants.
"""
from __future__ import division

import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np
from scipy.integrate import quad

from ..errors import CapExceeded
from ..errors import ConfigError
from ..potential import Observable
from ..potential import Potential
from ..shift import DEFAULT_CAP
from ..shift import TransitionStructure
from ..tails import FiniteTail
from ..tails import PowerTail
from . import Model

LN2 = math.log(2)


def continuants(digits):
    """``(p_n, q_n, p_{n−1}, q_{n−1})`` for x = [0; a_1, ..., a_n]."""
    p, q, p_prev, q_prev = 0, 1, 1, 0
    for a in digits:
        p, q, p_prev, q_prev = a * p + p_prev, a * q + q_prev, p, q
    return p, q, p_prev, q_prev


def cylinder_endpoints(digits):
    """
    Exact closure of the cylinder spelled by ``digits``.

    >>> cylinder_endpoints((1,))
    (Fraction(1, 2), Fraction(1, 1))
    >>> cylinder_endpoints((1, 1))
    (Fraction(1, 2), Fraction(2, 3))
    """
    p, q, p_prev, q_prev = continuants(digits)
    a, b = Fraction(p, q), Fraction(p + p_prev, q + q_prev)
    return (a, b) if a <= b else (b, a)


class QuadraticIrrational(object):
    """
    x = (P + √D)/Q with integers P, Q and a positive non-square D, where Q divides D − P².
    """

    def __init__(self, P, D, Q):
        if Q == 0 or (D - P * P) % Q:
            raise ValueError("(P + sqrt(D))/Q needs Q | D - P^2 (got P=%s, D=%s, Q=%s)." % (P, D, Q))
        if D <= 0 or math.isqrt(D) ** 2 == D:
            raise ValueError("Discriminant %s must be positive and not a square." % D)
        self.P = P
        self.D = D
        self.Q = Q

    @classmethod
    def periodic(cls, digits):
        """
        The purely periodic point [0; ω, ω, ...]: the positive root of q_{n−1}x² + (q_n − p_{n−1})x − p_n = 0.
        """
        digits = tuple(digits)
        if not digits or min(digits) < 1:
            raise ConfigError("Period words need digits >= 1 (got %r)." % (digits,))
        p, q, p_prev, q_prev = continuants(digits)
        A, B, C = q_prev, q - p_prev, p
        point = cls(-B, B * B + 4 * A * C, 2 * A)
        point.digits = digits
        point.continuants = (p, q, p_prev, q_prev)
        return point

    def __eq__(self, other):
        return isinstance(other, QuadraticIrrational) and (self.P, self.D, self.Q) == (other.P, other.D, other.Q)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.P, self.D, self.Q))

    def __repr__(self):
        return "QuadraticIrrational((%s + sqrt(%s))/%s)" % (self.P, self.D, self.Q)

    def __float__(self):
        root = math.sqrt(self.D)
        if self.P >= 0:
            return (self.P + root) / self.Q
        return (self.D - self.P * self.P) / (self.Q * (root - self.P))

    def mp(self):
        return (self.P + mpmath.sqrt(self.D)) / self.Q

    def digit(self):
        """⌊1/x⌋, exactly."""
        P, Q = -self.P, (self.D - self.P * self.P) // self.Q
        return (P + math.isqrt(self.D)) // Q

    def gauss_step(self):
        """T x = 1/x − ⌊1/x⌋ in closed form."""
        P, Q = -self.P, (self.D - self.P * self.P) // self.Q
        a = (P + math.isqrt(self.D)) // Q
        return QuadraticIrrational(P - a * Q, self.D, Q)

    def orbit(self, n):
        point = self
        for _ in range(n):
            yield point
            point = point.gauss_step()

    def is_periodic(self, n):
        """T^n x = x, decided on the integer representation."""
        point = self
        for _ in range(n):
            point = point.gauss_step()
        return point == self

    def as_dict(self):
        return {"P": self.P, "D": self.D, "Q": self.Q, "value": float(self)}


class PeriodicPoint(object):
    def __init__(self, point, log_weight, prime_period):
        self.point = point
        self.log_weight = log_weight
        self.prime_period = prime_period

    @property
    def digits(self):
        return self.point.digits

    @property
    def weight(self):
        return math.exp(self.log_weight)

    def crosscheck(self, dps=40):
        """∏ (T^i x)² at ``dps`` digits, independent of the continuant formula."""
        with mpmath.workdps(dps):
            product = mpmath.mpf(1)
            for point in self.point.orbit(len(self.digits)):
                product *= point.mp() ** 2
            return product

    def __repr__(self):
        return "PeriodicPoint(%r, weight=%r)" % (self.digits, self.weight)


def periodic_log_weight(digits, point=None):
    """log |(T^n)′x|^{−1} = −2 log(q_n + q_{n−1}x) at the periodic point of ``digits``."""
    if point is None:
        point = QuadraticIrrational.periodic(digits)
    _, q, _, q_prev = point.continuants
    return -2.0 * math.log(q + q_prev * float(point))


def prime_period(word):
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word == word[d:] + word[:d]:
            return d


def gauss_periodic_points(n, digit_set, cap=DEFAULT_CAP):
    """One entry per point of Per_n, in lexicographic digit order."""
    digit_set = sorted(set(digit_set))
    count = len(digit_set) ** n
    if count > cap:
        raise CapExceeded(count, cap, "Gauss periodic %s-points" % n)
    points = []
    for digits in itertools.product(digit_set, repeat=n):
        point = QuadraticIrrational.periodic(digits)
        points.append(PeriodicPoint(point, periodic_log_weight(digits, point), prime_period(digits)))
    return points


def gauss_integral_oracle(psi, tol=1e-10):
    """
    ∫ψ dμ_Gauss for the Gauss measure dx/((1+x) log 2).

    ``psi`` is a callable on (0, 1) (adaptive quadrature) or a digit word, for which the indicator of
    its cylinder integrates in closed form to log2((1+b)/(1+a)).
    """
    if callable(psi):
        value, _ = quad(lambda x: psi(x) / (1 + x), 0.0, 1.0, epsabs=tol, epsrel=tol, limit=200)
        return value / LN2
    lo, hi = cylinder_endpoints(tuple(psi))
    return math.log((1 + hi) / (1 + lo)) / LN2


class GaussPotential(Potential):
    name = "-log|T'|"

    def __init__(self, tail=None):
        self.tail = PowerTail(2.0) if tail is None else tail

    def birkhoff_bounds(self, word, n=None):
        n = len(word) if n is None else n
        _, q, _, q_prev = continuants(word[:n])
        rest = word[n:]
        lo, hi = cylinder_endpoints(rest) if rest else (0, 1)
        # S_nφ(x) = −2 log(q_n + q_{n−1}·T^n x)
        return -2.0 * math.log(q + q_prev * hi), -2.0 * math.log(q + q_prev * lo)

    def representative(self, word, n=1):
        word = tuple(word)
        point = QuadraticIrrational.periodic(word)
        if n == len(word):
            return periodic_log_weight(word, point)
        return 2.0 * math.fsum(math.log(float(x)) for x in point.orbit(n))

    def orbit_bounds(self, word):
        value = periodic_log_weight(tuple(word))
        return value, value

    def word_bounds(self, symbols, words, n):
        if n == 1 and words.shape[1] == 1:
            digits = np.asarray(symbols.labels, dtype=float)[words[:, 0]]
            return -2.0 * np.log(digits + 1), -2.0 * np.log(digits)
        return super(GaussPotential, self).word_bounds(symbols, words, n)


def _midpoint(word):
    lo, hi = cylinder_endpoints(word)
    return float(lo + hi) / 2


class GaussModel(Model):
    type = "gauss"
    default_q = 2
    default_coding = "window"
    default_bound = "representative"

    def __init__(self, K=64, digits=None):
        if digits is not None:
            digits = sorted(set(int(d) for d in digits))
            if not digits or digits[0] < 1:
                raise ConfigError("Restricted digits must be positive integers (got %r)." % (digits,))
            self.digits = digits
            self.K = digits[-1]
            tail = FiniteTail()
        else:
            if K < 1:
                raise ConfigError("Digit cutoff K must be at least 1 (got %r)." % K)
            self.digits = None
            self.K = K
            tail = PowerTail(2.0)
        self.max_p = self.K
        super(GaussModel, self).__init__(GaussPotential(tail), "gauss")

    @classmethod
    def from_config(cls, descriptor):
        digits = descriptor.get("digits")
        K = descriptor.get("K")
        if K is None:
            K = max(digits) if digits else 64
        if not isinstance(K, int) or isinstance(K, bool):
            raise ConfigError("Gauss K must be an integer (got %r)." % (K,))
        return cls(K, digits)

    def labels_upto(self, p):
        if self.digits is None:
            return list(range(1, min(p, self.K) + 1))
        return [d for d in self.digits if d <= p]

    def transitions(self, labels):
        return TransitionStructure.full(labels)

    def observable(self, name):
        if name.startswith("digit:"):
            digit = int(name[len("digit:"):])
            return Observable(name, 1, lambda word: 1.0 if word[0] == digit else 0.0, (0.0, 1.0))
        elif name == "x" or name.startswith("x:"):
            level = int(name[2:]) if name.startswith("x:") else 3
            return Observable(name, level, _midpoint, (0.0, 1.0))
        return super(GaussModel, self).observable(name)

    def periodic_point(self, word):
        return QuadraticIrrational.periodic(word)

    def target(self, name):
        """The Gauss-measure integral of a named observable."""
        if name == "one":
            return 1.0
        elif name.startswith("digit:"):
            return gauss_integral_oracle((int(name[len("digit:"):]),))
        elif name == "x" or name.startswith("x:"):
            return gauss_integral_oracle(lambda x: x)
        return None

    def as_dict(self):
        return {"type": self.type, "K": self.K, "digits": self.digits}
