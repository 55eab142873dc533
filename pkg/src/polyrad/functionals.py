"""Weighted norms, Rayleigh quotients and the extremal profile family.

Improper integrals over (0, inf) are evaluated by adaptive Gauss-Kronrod
quadrature on [0, split] plus the inversion substitution r -> 1/u for the
tail, which turns the algebraically decaying integrands of this calculus
into smooth integrands on a finite interval.

Radial profiles carry their symbolic structure: a profile is a finite sum of
pieces ``coeff * expr(alpha; r / scale)`` with ``expr`` in the exact term
algebra of :mod:`polyrad.radial`.  Because the weighted Laplacian scales as
``Delta_alpha [f(./eps)](r) = eps^-2 (Delta_alpha f)(r/eps)`` (and d/dr as
eps^-1), the m-th order gradient of a piece is again a piece with the same
scale and the coefficient multiplied by scale^-m.  This gives every profile
an exact derivative chain at numeric alpha, which is how seminorms of the
extremal family

    w_eps(r) = P^((alpha-2m+1)/(4m)) * (eps / (eps^2 + r^2))^((alpha-2m+1)/2)

are computed (the amplitude P^(...) is irrational, so it lives in the float
coefficient, never in the rational algebra).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import integrate as _integrate

from .coefficients import base_profile_expr
from .constants import critical_exponent, p_value, require_sobolev, sobolev_gap
from .errors import (
    DivisionGuardError,
    DomainError,
    NonConvergenceError,
    UnsupportedProfileError,
)
from .radial import ExponentAffine, RadialExpr, apply_polyharmonic, differentiate, nabla_m


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy contract for adaptive quadrature."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000
    split_point: float = 1.0  # domain split for the r -> 1/r tail transform

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if not self.split_point > 0:
            raise ValueError("split_point must be positive")


@dataclass(frozen=True)
class NormReport:
    value: float
    err_estimate: float
    truncation_radius: Optional[float] = None

    def __post_init__(self):
        if self.err_estimate < 0:
            raise ValueError("error estimate must be nonnegative")


# ---------------------------------------------------------------------------
# Radial profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProfilePiece:
    """coeff * expr(alpha; r / scale)."""

    coeff: float
    expr: RadialExpr
    scale: float = 1.0


@dataclass(frozen=True)
class RadialProfile:
    """A radial function: either a sum of symbolic pieces bound to a numeric
    alpha, or a black-box evaluator with declared decay metadata (and, when
    gradient norms are wanted from a black box, a supplied derivative chain
    mapping the gradient order to an evaluator)."""

    alpha: float
    pieces: Tuple[ProfilePiece, ...] = ()
    func: Optional[Callable[[float], float]] = None
    decay_exponent: Optional[float] = None  # |f(r)| ~ r^-decay for large r
    gradient_evaluators: Optional[dict] = None  # order m -> callable

    @classmethod
    def from_expr(cls, expr: RadialExpr, alpha: float, coeff: float = 1.0,
                  scale: float = 1.0, decay_exponent: Optional[float] = None
                  ) -> "RadialProfile":
        return cls(alpha=float(alpha),
                   pieces=(ProfilePiece(float(coeff), expr, float(scale)),),
                   decay_exponent=decay_exponent)

    @classmethod
    def from_callable(cls, func: Callable[[float], float], alpha: float,
                      decay_exponent: Optional[float] = None,
                      gradient_evaluators: Optional[dict] = None
                      ) -> "RadialProfile":
        return cls(alpha=float(alpha), func=func, decay_exponent=decay_exponent,
                   gradient_evaluators=gradient_evaluators)

    @classmethod
    def zero(cls, alpha: float) -> "RadialProfile":
        return cls(alpha=float(alpha), decay_exponent=np.inf)

    @property
    def is_symbolic(self) -> bool:
        return self.func is None

    def __call__(self, r):
        if self.func is not None:
            if np.ndim(r) == 0:
                return self.func(float(r))
            return np.array([self.func(float(x)) for x in np.asarray(r).ravel()]
                            ).reshape(np.shape(r))
        if not self.pieces:
            return np.zeros_like(np.asarray(r, dtype=float)) if np.ndim(r) else 0.0
        total = 0.0
        for p in self.pieces:
            total = total + p.coeff * p.expr.evaluate(self.alpha, r / p.scale)
        return total

    def nabla(self, m: int) -> "RadialProfile":
        """The m-th order gradient as a profile: through the exact symbolic
        chain, or through a supplied evaluator for black-box profiles."""
        if not self.is_symbolic:
            supplied = (self.gradient_evaluators or {}).get(m)
            if supplied is None:
                raise UnsupportedProfileError(
                    "black-box profile has no derivative chain for order "
                    f"{m}; supply one or use a symbolic profile"
                )
            return RadialProfile(alpha=self.alpha, func=supplied,
                                 decay_exponent=None)
        pieces = tuple(
            ProfilePiece(p.coeff * p.scale ** (-m), nabla_m(p.expr, m), p.scale)
            for p in self.pieces
        )
        decay = None if self.decay_exponent is None else self.decay_exponent + m
        return RadialProfile(alpha=self.alpha, pieces=pieces, decay_exponent=decay)

    def derivative(self) -> "RadialProfile":
        if not self.is_symbolic:
            raise UnsupportedProfileError(
                "black-box profile has no derivative chain; supply a symbolic one"
            )
        pieces = tuple(
            ProfilePiece(p.coeff / p.scale, differentiate(p.expr), p.scale)
            for p in self.pieces
        )
        decay = None if self.decay_exponent is None else self.decay_exponent + 1
        return RadialProfile(alpha=self.alpha, pieces=pieces, decay_exponent=decay)

    def __add__(self, other: "RadialProfile") -> "RadialProfile":
        if not isinstance(other, RadialProfile):
            return NotImplemented
        if self.alpha != other.alpha:
            raise DomainError("cannot add profiles bound to different alpha")
        if not (self.is_symbolic and other.is_symbolic):
            raise UnsupportedProfileError("can only add symbolic profiles")
        decays = [d for d in (self.decay_exponent, other.decay_exponent) if d is not None]
        return RadialProfile(
            alpha=self.alpha,
            pieces=self.pieces + other.pieces,
            decay_exponent=min(decays) if len(decays) == 2 else None,
        )

    def __mul__(self, scalar) -> "RadialProfile":
        if not isinstance(scalar, (int, float)):
            return NotImplemented
        if not self.is_symbolic:
            f = self.func
            return RadialProfile(alpha=self.alpha,
                                 func=lambda r: scalar * f(r),
                                 decay_exponent=self.decay_exponent)
        return RadialProfile(
            alpha=self.alpha,
            pieces=tuple(ProfilePiece(scalar * p.coeff, p.expr, p.scale)
                         for p in self.pieces),
            decay_exponent=self.decay_exponent,
        )

    __rmul__ = __mul__


# ---------------------------------------------------------------------------
# Extremal family
# ---------------------------------------------------------------------------


def bliss_amplitude(m: int, alpha: float, eps: float) -> float:
    """w_eps(0) = P^((alpha-2m+1)/(4m)) * eps^(-(alpha-2m+1)/2)."""
    require_sobolev(m, alpha)
    if not eps > 0:
        raise DomainError(f"dilation parameter must be positive, got {eps!r}")
    gap = sobolev_gap(m, alpha)
    return p_value(m, alpha) ** (gap / (4.0 * m)) * eps ** (-gap / 2.0)


def bliss_profile(m: int, alpha: float, eps: float) -> RadialProfile:
    """The extremal profile w_eps, with its exact derivative chain via the
    dilation scaling laws."""
    amp = bliss_amplitude(m, alpha, eps)
    return RadialProfile.from_expr(
        base_profile_expr(m), alpha, coeff=amp, scale=eps,
        decay_exponent=sobolev_gap(m, alpha),
    )


class BlissChain:
    """Closed-form evaluator for the iterated-Laplacian family of w_eps.

    u_j = (-Delta_alpha)^j w_eps for j = 0..m, with exact symbolic expansions
    specialized at numeric alpha and dilated by eps:

        u_j(r) = amp * eps^(-2j) * E_j(alpha; r/eps),
        u_j'(r) = amp * eps^(-2j-1) * E_j'(alpha; r/eps).
    """

    def __init__(self, m: int, alpha: float, eps: float):
        require_sobolev(m, alpha)
        self.m = m
        self.alpha = float(alpha)
        self.eps = float(eps)
        self.amplitude = bliss_amplitude(m, alpha, eps)
        exprs = [base_profile_expr(m)]
        for _ in range(m):
            exprs.append(apply_polyharmonic(exprs[-1], 1, signed=True))
        self._exprs = exprs
        self._dexprs = [differentiate(e) for e in exprs]

    def value(self, j: int, r):
        """u_j(r) = (-Delta_alpha)^j w_eps at r (vectorized)."""
        return (self.amplitude * self.eps ** (-2 * j)
                * self._exprs[j].evaluate(self.alpha, r / self.eps))

    def derivative(self, j: int, r):
        """u_j'(r) (vectorized)."""
        return (self.amplitude * self.eps ** (-2 * j - 1)
                * self._dexprs[j].evaluate(self.alpha, r / self.eps))

    def initial_values(self) -> list:
        """[u_0(0), ..., u_{m-1}(0)]: the even-order seed of the equivalent
        first-order system."""
        return [float(self.value(j, 0.0)) for j in range(self.m)]


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

_BENIGN_QUAD = "roundoff error is detected"


def _quad(func, lo: float, hi: float, spec: QuadratureSpec) -> Tuple[float, float]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _integrate.IntegrationWarning)
        out = _integrate.quad(
            func, lo, hi,
            epsabs=spec.abs_tol, epsrel=spec.rel_tol,
            limit=spec.max_subdivisions, full_output=1,
        )
    if len(out) > 3:
        message = out[3]
        if _BENIGN_QUAD not in message:
            raise NonConvergenceError(
                f"quadrature on [{lo:g}, {hi:g}] did not converge: {message.strip()}"
            )
    return out[0], out[1]


def _check_tail_decay(g, split: float) -> None:
    """Reject tails that decay no faster than 1/r.

    The integrands of this calculus have algebraic tails, so the log-log
    slope over geometrically growing radii is a reliable integrability
    probe; it catches divergent cases that float underflow would otherwise
    disguise as convergent.
    """
    prev = None
    slope = None
    for k in range(1, 8):
        r = split * 10.0 ** k
        try:
            v = abs(g(r))
        except OverflowError:
            raise NonConvergenceError(
                f"integrand overflows at r={r:g}; tail not integrable as written"
            ) from None
        if v == 0.0 or not math.isfinite(v):
            return  # decayed below floating range (or NaN: leave to quad)
        if prev is not None:
            slope = (math.log(v) - math.log(prev)) / math.log(10.0)
            if slope < -1.5:
                return  # clearly integrable already
        prev = v
    if slope is None or slope > -1.02:
        raise NonConvergenceError(
            "integrand tail decays like r^-p with p <= 1; integral diverges "
            f"(measured log-log slope {slope if slope is not None else 'n/a'})"
        )


def improper_integral(f, spec: Optional[QuadratureSpec] = None) -> NormReport:
    """int_0^inf f(r) dr by adaptive quadrature on [0, split] plus the
    transformed tail int_0^(1/split) f(1/u) u^-2 du.

    ``f`` may be a plain callable or a :class:`RadialProfile` used as the
    integrand.  Divergent or pathological integrands surface as
    :class:`NonConvergenceError`.
    """
    spec = spec or QuadratureSpec()
    g = f if callable(f) else None
    if g is None:
        raise TypeError(f"integrand must be callable, got {type(f).__name__}")
    c = spec.split_point
    _check_tail_decay(g, c)
    head_val, head_err = _quad(g, 0.0, c, spec)
    tail_val, tail_err = _quad(lambda u: g(1.0 / u) / (u * u), 0.0, 1.0 / c, spec)
    return NormReport(value=head_val + tail_val, err_estimate=head_err + tail_err)


def _weighted_power_integral(f, q: float, theta: float,
                             spec: QuadratureSpec) -> NormReport:
    """int_0^inf |f(r)|^q r^theta dr."""
    def integrand(r: float) -> float:
        return abs(f(r)) ** q * r ** theta

    return improper_integral(integrand, spec)


def weighted_lebesgue_norm(f, q: float, theta: float,
                           spec: Optional[QuadratureSpec] = None) -> NormReport:
    """( int_0^inf |f|^q r^theta dr )^(1/q) for q >= 1, theta > -1."""
    if q < 1:
        raise DomainError(f"Lebesgue exponent must be >= 1, got {q!r}")
    if theta <= -1:
        raise DomainError(f"weight exponent must exceed -1, got {theta!r}")
    spec = spec or QuadratureSpec()
    report = _weighted_power_integral(f, q, theta, spec)
    if report.value <= 0.0:
        return NormReport(value=0.0, err_estimate=report.err_estimate ** (1.0 / q))
    value = report.value ** (1.0 / q)
    return NormReport(value=value,
                      err_estimate=value * report.err_estimate / (q * report.value))


def gradient_seminorm(f: RadialProfile, m: int, alpha: float,
                      spec: Optional[QuadratureSpec] = None) -> NormReport:
    """( int_0^inf |nabla_m f|^2 r^alpha dr )^(1/2) through the symbolic
    derivative chain of ``f``."""
    _check_profile_alpha(f, alpha)
    g = f.nabla(m)
    report = _weighted_power_integral(g, 2.0, alpha, spec or QuadratureSpec())
    if report.value <= 0.0:
        return NormReport(value=0.0, err_estimate=report.err_estimate ** 0.5)
    value = report.value ** 0.5
    return NormReport(value=value,
                      err_estimate=value * report.err_estimate / (2.0 * report.value))


def rayleigh_quotient(f: RadialProfile, m: int, alpha: float,
                      spec: Optional[QuadratureSpec] = None) -> float:
    """||nabla_m f||^2_{L^2_alpha} / ||f||^2_{L^{2*}_alpha}."""
    spec = spec or QuadratureSpec()
    _check_profile_alpha(f, alpha)
    two_star = critical_exponent(m, alpha)
    num = _weighted_power_integral(f.nabla(m), 2.0, alpha, spec).value
    den_q = _weighted_power_integral(f, two_star, alpha, spec).value
    if den_q ** (1.0 / two_star) < spec.abs_tol:
        raise DivisionGuardError(
            f"profile norm {den_q ** (1.0 / two_star):.3e} below abs_tol; "
            "Rayleigh quotient undefined"
        )
    return num / den_q ** (2.0 / two_star)


def _check_profile_alpha(f: RadialProfile, alpha: float) -> None:
    if not isinstance(f, RadialProfile):
        raise UnsupportedProfileError(
            "gradient operations need a RadialProfile with a derivative chain"
        )
    if abs(f.alpha - alpha) > 1e-12 * max(1.0, abs(alpha)):
        raise DomainError(
            f"profile is bound to alpha={f.alpha!r}, operation requested alpha={alpha!r}"
        )


# ---------------------------------------------------------------------------
# Pointwise radial bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundCheckReport:
    """sup over a log grid of |f(r)| r^((alpha-2m+1)/2), optionally divided
    by the gradient seminorm; tail_variation is (max-min)/mean of the ratio
    over the last grid decade (flat tail <=> saturated decay rate)."""

    sup_ratio: float
    argmax_r: float
    seminorm: Optional[float]
    tail_variation: float


def radial_bound_check(f: RadialProfile, m: int, alpha: float,
                       spec: Optional[QuadratureSpec] = None,
                       r_grid=None, normalize: bool = True) -> BoundCheckReport:
    require_sobolev(m, alpha)
    if r_grid is None:
        r_grid = np.geomspace(1e-3, 1e3, 601)
    r_grid = np.asarray(r_grid, dtype=float)
    ratio = np.abs(np.asarray(f(r_grid), dtype=float)) * r_grid ** (sobolev_gap(m, alpha) / 2.0)
    seminorm = None
    values = ratio
    if normalize:
        seminorm = gradient_seminorm(f, m, alpha, spec).value
        if seminorm > 0.0:
            values = ratio / seminorm
    idx = int(np.argmax(values))
    tail = ratio[r_grid >= r_grid[-1] / 10.0]
    mean = float(np.mean(tail))
    variation = float((tail.max() - tail.min()) / mean) if mean > 0 else 0.0
    return BoundCheckReport(
        sup_ratio=float(values[idx]),
        argmax_r=float(r_grid[idx]),
        seminorm=seminorm,
        tail_variation=variation,
    )


# ---------------------------------------------------------------------------
# Versioned perturbation directions for minimality probes
# ---------------------------------------------------------------------------

#: Ten fixed directions phi = r^(2a) (1+r^2)^(-(alpha-2m+1+2b)/2), indexed by
#: (a, b).  All decay at least as fast as the extremal profile and are smooth
#: and even at the origin, so they live in the energy space.  Versioned: do
#: not reorder or edit entries, append only.
PERTURBATION_DIRECTIONS: Tuple[Tuple[int, int], ...] = (
    (0, 1), (0, 2), (0, 3), (0, 4), (1, 1),
    (1, 2), (1, 3), (2, 2), (2, 3), (3, 3),
)


def perturbation_direction(index: int, m: int, alpha: float) -> RadialProfile:
    """The index-th versioned probe direction as a symbolic profile."""
    require_sobolev(m, alpha)
    a, b = PERTURBATION_DIRECTIONS[index]
    expr = RadialExpr.single(1, 2 * a, ExponentAffine(1, 1 - 2 * m + 2 * b))
    return RadialProfile.from_expr(
        expr, alpha, decay_exponent=sobolev_gap(m, alpha) + 2 * (b - a)
    )
