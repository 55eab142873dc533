"""Exact symbolic algebra of weighted radial expressions.

The algebra manipulates finite sums of terms

    c(alpha) * r^rho * (1 + r^2)^(-sigma/2)

where ``c`` is a polynomial in the formal parameter alpha with rational
coefficients and ``sigma = a*alpha + b`` is affine in alpha with
``a in {0, 1}``.  This family is closed under the weighted radial Laplacian

    Delta_alpha u = u'' + (alpha/r) u' ,

under d/dr, and hence under the m-th order gradient
``nabla_m = Delta_alpha^k`` (m = 2k) or ``(Delta_alpha^k)'`` (m = 2k+1).

A single application of the Laplacian follows the product rule identity

    Delta_alpha [r^rho (1+r^2)^(-sigma/2)]
        = (1+r^2)^(-(sigma+4)/2) [ r^(rho+2) A(rho, alpha, sigma)
                                   + r^rho     B(rho, alpha, sigma)
                                   + r^(rho-2) C(rho, alpha) ]

with

    A(x, y, z) = x(x + y - 1) + z(z - 2x + 1 - y)
    B(x, y, z) = 2x(x + y - 1) - z(2x + y + 1)
    C(x, y)    = x(x + y - 1).

All arithmetic on coefficients is exact (``fractions.Fraction``); no floats
enter the symbolic path.  Canonical forms rewrite r^2 = (1+r^2) - 1 until
every stored power of r is 0 or 1, so algebraic cancellations (for example
Delta_alpha r^2 = 2(alpha+1)) happen exactly.  Negative powers of r are
representable (Delta_alpha r = alpha/r is a legitimate value) but never
arise from the even-power expressions this toolkit derives; use
:meth:`RadialExpr.require_nonnegative_powers` as a defensive check on such
pipelines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Scalar = Union[int, Fraction]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"exact coefficient expected, got {type(x).__name__}")


class AlphaPoly:
    """Polynomial in the formal symbol alpha over the rationals.

    Coefficients are stored dense by degree with the trailing (leading-degree)
    zeros stripped, so the zero polynomial has an empty coefficient tuple and
    the leading coefficient is nonzero otherwise.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self._coeffs = tuple(cs)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls) -> "AlphaPoly":
        return cls(())

    @classmethod
    def one(cls) -> "AlphaPoly":
        return cls((1,))

    @classmethod
    def alpha(cls) -> "AlphaPoly":
        return cls((0, 1))

    @classmethod
    def constant(cls, c) -> "AlphaPoly":
        return cls((c,))

    @classmethod
    def linear(cls, a, b) -> "AlphaPoly":
        """The polynomial a*alpha + b."""
        return cls((b, a))

    # -- structure ----------------------------------------------------------

    @property
    def coefficients(self) -> tuple:
        return self._coeffs

    @property
    def degree(self) -> int:
        """Degree, with the convention degree(0) = -1."""
        return len(self._coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    def __eq__(self, other) -> bool:
        if isinstance(other, AlphaPoly):
            return self._coeffs == other._coeffs
        if isinstance(other, (int, Fraction)):
            return self == AlphaPoly.constant(other)
        return NotImplemented

    def __hash__(self):
        return hash(self._coeffs)

    def __bool__(self):
        return not self.is_zero

    # -- arithmetic (exact) -------------------------------------------------

    def __add__(self, other) -> "AlphaPoly":
        if isinstance(other, (int, Fraction)):
            other = AlphaPoly.constant(other)
        if not isinstance(other, AlphaPoly):
            return NotImplemented
        a, b = self._coeffs, other._coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return AlphaPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "AlphaPoly":
        return AlphaPoly(tuple(-c for c in self._coeffs))

    def __sub__(self, other) -> "AlphaPoly":
        return self + (-other if isinstance(other, AlphaPoly) else AlphaPoly.constant(-_as_fraction(other)))

    def __rsub__(self, other) -> "AlphaPoly":
        return (-self) + other

    def __mul__(self, other) -> "AlphaPoly":
        if isinstance(other, (int, Fraction)):
            return AlphaPoly(tuple(c * other for c in self._coeffs))
        if not isinstance(other, AlphaPoly):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return AlphaPoly.zero()
        out = [Fraction(0)] * (len(self._coeffs) + len(other._coeffs) - 1)
        for i, a in enumerate(self._coeffs):
            for j, b in enumerate(other._coeffs):
                out[i + j] += a * b
        return AlphaPoly(out)

    __rmul__ = __mul__

    def __call__(self, value):
        """Evaluate by Horner's rule; exact for int/Fraction arguments."""
        if not self._coeffs:
            return Fraction(0) if isinstance(value, (int, Fraction)) else 0.0
        if isinstance(value, (int, Fraction)):
            acc = Fraction(0)
            for c in reversed(self._coeffs):
                acc = acc * value + c
            return acc
        acc = 0.0
        for c in reversed(self._coeffs):
            acc = acc * value + float(c)
        return acc

    # -- io -------------------------------------------------------------

    def to_strings(self) -> list:
        """Degree-indexed rational strings, e.g. ['-3', '-2', '1']."""
        return [str(c) for c in self._coeffs]

    @classmethod
    def from_strings(cls, strings: Sequence[str]) -> "AlphaPoly":
        return cls(Fraction(s) for s in strings)

    def __str__(self) -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for d in range(len(self._coeffs) - 1, -1, -1):
            c = self._coeffs[d]
            if c == 0:
                continue
            mag = abs(c)
            if d == 0:
                body = f"{mag}"
            else:
                var = "a" if d == 1 else f"a^{d}"
                body = var if mag == 1 else f"{mag}*{var}"
            parts.append(("-" if c < 0 else "+", body))
        sign0, body0 = parts[0]
        text = ("-" if sign0 == "-" else "") + body0
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"AlphaPoly({self})"


ALPHA = AlphaPoly.alpha()


@dataclass(frozen=True, order=True)
class ExponentAffine:
    """Exponent sigma = alpha_multiplier * alpha + constant_shift.

    Restricting the multiplier to {0, 1} covers every exponent the weighted
    polyharmonic calculus produces and rejects unsupported inputs early.
    """

    alpha_multiplier: int
    constant_shift: int

    def __post_init__(self):
        if self.alpha_multiplier not in (0, 1):
            raise ValueError(
                f"alpha multiplier must be 0 or 1, got {self.alpha_multiplier}"
            )
        if not isinstance(self.constant_shift, int):
            raise TypeError("constant shift must be an integer")

    def shifted(self, delta: int) -> "ExponentAffine":
        return ExponentAffine(self.alpha_multiplier, self.constant_shift + delta)

    def as_poly(self) -> AlphaPoly:
        return AlphaPoly.linear(self.alpha_multiplier, self.constant_shift)

    def value_at(self, alpha):
        return self.alpha_multiplier * alpha + self.constant_shift

    def __str__(self) -> str:
        if self.alpha_multiplier == 0:
            return str(self.constant_shift)
        if self.constant_shift == 0:
            return "a"
        return f"a{self.constant_shift:+d}"


SIGMA_ZERO = ExponentAffine(0, 0)


def _as_sigma(sigma) -> ExponentAffine:
    if isinstance(sigma, ExponentAffine):
        return sigma
    if isinstance(sigma, tuple) and len(sigma) == 2:
        return ExponentAffine(*sigma)
    if isinstance(sigma, int):
        return ExponentAffine(0, sigma)
    raise TypeError(f"cannot interpret {sigma!r} as an affine exponent")


@dataclass(frozen=True)
class RadialTerm:
    """One summand coeff(alpha) * r^r_power * (1+r^2)^(-sigma/2)."""

    coeff: AlphaPoly
    r_power: int
    sigma: ExponentAffine

    def __str__(self) -> str:
        bits = [f"({self.coeff})"]
        if self.r_power:
            bits.append(f"r^{self.r_power}")
        if self.sigma != SIGMA_ZERO:
            bits.append(f"(1+r^2)^(-({self.sigma})/2)")
        return "*".join(bits)


class RadialExpr:
    """Canonicalized finite sum of :class:`RadialTerm`.

    Canonical form: every power of r at least 2 is rewritten through
    r^2 = (1+r^2) - 1, like terms are merged on the (r_power, sigma) key,
    zero coefficients are dropped, and terms are sorted lexicographically on
    (sigma, r_power).  Two expressions built from nonnegative powers of r are
    equal as functions of (alpha, r) iff their canonical forms coincide.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[RadialTerm] = ()):
        merged: dict = {}
        stack = [(t.coeff, t.r_power, t.sigma) for t in terms]
        while stack:
            coeff, rho, sigma = stack.pop()
            if coeff.is_zero:
                continue
            if rho >= 2:
                # r^rho (1+r^2)^(-s/2) = r^(rho-2) (1+r^2)^(-(s-2)/2)
                #                        - r^(rho-2) (1+r^2)^(-s/2)
                stack.append((coeff, rho - 2, sigma.shifted(-2)))
                stack.append((-coeff, rho - 2, sigma))
                continue
            key = (rho, sigma)
            acc = merged.get(key)
            merged[key] = coeff if acc is None else acc + coeff
        out = [
            RadialTerm(c, rho, sigma)
            for (rho, sigma), c in merged.items()
            if not c.is_zero
        ]
        out.sort(key=lambda t: (t.sigma, t.r_power))
        self._terms = tuple(out)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls) -> "RadialExpr":
        return cls(())

    @classmethod
    def constant(cls, c) -> "RadialExpr":
        return cls.single(c, 0, SIGMA_ZERO)

    @classmethod
    def single(cls, coeff, r_power: int = 0, sigma=SIGMA_ZERO) -> "RadialExpr":
        if not isinstance(coeff, AlphaPoly):
            coeff = AlphaPoly.constant(coeff)
        return cls((RadialTerm(coeff, r_power, _as_sigma(sigma)),))

    # -- structure ----------------------------------------------------------

    @property
    def terms(self) -> tuple:
        return self._terms

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, RadialExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(self._terms)

    def __bool__(self):
        return not self.is_zero

    def min_r_power(self) -> int:
        return min((t.r_power for t in self._terms), default=0)

    def require_nonnegative_powers(self) -> "RadialExpr":
        """Defensive check: no negative power of r survived canonicalization.

        Expressions derived from even powers of r never contain one; hitting
        this on such a pipeline signals an implementation bug.
        """
        bad = [t for t in self._terms if t.r_power < 0]
        if bad:
            raise ValueError(
                f"negative r-powers survived canonicalization: {[str(t) for t in bad]}"
            )
        return self

    # -- exact linear arithmetic ---------------------------------------------

    def __add__(self, other) -> "RadialExpr":
        if not isinstance(other, RadialExpr):
            return NotImplemented
        return RadialExpr(self._terms + other._terms)

    def __sub__(self, other) -> "RadialExpr":
        return self + (-other)

    def __neg__(self) -> "RadialExpr":
        return RadialExpr(
            tuple(RadialTerm(-t.coeff, t.r_power, t.sigma) for t in self._terms)
        )

    def __mul__(self, scalar) -> "RadialExpr":
        """Scale by a rational number or an AlphaPoly."""
        if isinstance(scalar, (int, Fraction, AlphaPoly)):
            return RadialExpr(
                tuple(
                    RadialTerm(t.coeff * scalar, t.r_power, t.sigma)
                    for t in self._terms
                )
            )
        return NotImplemented

    __rmul__ = __mul__

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, alpha_value, r):
        """Numeric value at (alpha, r).

        If both arguments are exact (int / Fraction) and every exponent
        sigma(alpha) is an even integer, the result is an exact Fraction;
        otherwise ordinary floating arithmetic is used (r may be a numpy
        array in that case).
        """
        exact = isinstance(alpha_value, (int, Fraction)) and isinstance(
            r, (int, Fraction)
        )
        if exact:
            sigmas = [t.sigma.value_at(Fraction(alpha_value)) for t in self._terms]
            exact = all(s.denominator == 1 and s.numerator % 2 == 0 for s in sigmas)
        if exact:
            rq = Fraction(r)
            total = Fraction(0)
            base = 1 + rq * rq
            for t, s in zip(self._terms, sigmas):
                total += t.coeff(Fraction(alpha_value)) * rq ** t.r_power * base ** (
                    -(s // 2)
                )
            return total
        a = float(alpha_value)
        base = 1.0 + r * r
        total = 0.0
        for t in self._terms:
            sv = t.sigma.value_at(a)
            total = total + t.coeff(a) * r ** t.r_power * base ** (-0.5 * sv)
        return total

    # -- io -------------------------------------------------------------

    def to_json_obj(self) -> list:
        return [
            {
                "coeff": t.coeff.to_strings(),
                "r_power": t.r_power,
                "sigma": {
                    "a": t.sigma.alpha_multiplier,
                    "b": t.sigma.constant_shift,
                },
            }
            for t in self._terms
        ]

    @classmethod
    def from_json_obj(cls, obj) -> "RadialExpr":
        return cls(
            RadialTerm(
                AlphaPoly.from_strings(entry["coeff"]),
                int(entry["r_power"]),
                ExponentAffine(int(entry["sigma"]["a"]), int(entry["sigma"]["b"])),
            )
            for entry in obj
        )

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "RadialExpr":
        return cls.from_json_obj(json.loads(text))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(str(t) for t in self._terms)

    def __repr__(self) -> str:
        return f"RadialExpr({self})"


# ---------------------------------------------------------------------------
# Operator algebra
# ---------------------------------------------------------------------------


def abc_coefficients(rho: int, sigma) -> tuple:
    """The three expansion polynomials of one Laplacian application.

    Returns (A(rho, alpha, sigma), B(rho, alpha, sigma), C(rho, alpha)) as
    exact polynomials in alpha, with sigma substituted symbolically when it
    carries an alpha multiplier.
    """
    sigma = _as_sigma(sigma)
    sp = sigma.as_poly()
    base = AlphaPoly((rho * (rho - 1), rho))  # rho * (rho + alpha - 1)
    a = base + sp * (sp - ALPHA + (1 - 2 * rho))
    b = 2 * base - sp * (ALPHA + (2 * rho + 1))
    c = base
    return a, b, c


def apply_laplacian(expr: RadialExpr) -> RadialExpr:
    """Apply Delta_alpha exactly.

    Each input term maps to at most three output terms whose sigma constant
    shift grows by exactly 4; like terms are merged.
    """
    out = []
    for t in expr.terms:
        a, b, c = abc_coefficients(t.r_power, t.sigma)
        sig = t.sigma.shifted(4)
        out.append(RadialTerm(t.coeff * a, t.r_power + 2, sig))
        out.append(RadialTerm(t.coeff * b, t.r_power, sig))
        out.append(RadialTerm(t.coeff * c, t.r_power - 2, sig))
    return RadialExpr(out)


def apply_polyharmonic(expr: RadialExpr, j: int, signed: bool = True) -> RadialExpr:
    """Iterate the Laplacian j times; with ``signed`` the result is
    (-Delta_alpha)^j expr."""
    if j < 1:
        raise ValueError(f"iteration count must be >= 1, got {j}")
    out = expr
    for _ in range(j):
        out = apply_laplacian(out)
    if signed and j % 2 == 1:
        out = -out
    return out


def differentiate(expr: RadialExpr) -> RadialExpr:
    """Exact d/dr:  r^rho (1+r^2)^(-s/2)  maps to
    rho r^(rho-1) (1+r^2)^(-s/2) - s r^(rho+1) (1+r^2)^(-(s+2)/2)."""
    out = []
    for t in expr.terms:
        out.append(RadialTerm(t.coeff * t.r_power, t.r_power - 1, t.sigma))
        out.append(
            RadialTerm(-(t.coeff * t.sigma.as_poly()), t.r_power + 1, t.sigma.shifted(2))
        )
    return RadialExpr(out)


def nabla_m(expr: RadialExpr, m: int) -> RadialExpr:
    """The m-th order gradient: Delta_alpha^k for m = 2k, and the radial
    derivative of Delta_alpha^k for m = 2k + 1."""
    if m < 1:
        raise ValueError(f"order must be >= 1, got {m}")
    k, odd = divmod(m, 2)
    out = expr
    for _ in range(k):
        out = apply_laplacian(out)
    if odd:
        out = differentiate(out)
    return out


def evaluate(expr: RadialExpr, alpha_value, r):
    """Functional form of :meth:`RadialExpr.evaluate`."""
    return expr.evaluate(alpha_value, r)
