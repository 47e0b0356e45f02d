"""Differential operators between density modules, their normal forms,
and the Lie-derivative actions on them.

Classical operators are stored as ``sum_i p_i(x) d_x^i``.  Super operators
are stored in eta-normal form ``sum_i q_i(x,theta) eta^i`` with
coefficients on the left; the powers of the contact derivation form a free
basis over superfunction coefficients (``eta^2`` acts as ``-d_x``), so the
stored form is canonical and equality is coefficient-wise.  A second
presentation over ``(d_x, d_theta)`` is kept for cross-checks and for the
parity-decomposition identities of the odd 2-cocycle family.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Optional, Sequence, Union

from .geometry import (
    CLASSICAL,
    SUPER,
    ContactField,
    Density,
    P_ZERO,
    Poly,
    SP_ZERO,
    SuperPoly,
    VectorField,
    eta_bar,
)
from .kernel import UsageError


class DiffOp:
    """Finite-order differential operator from F_lam to F_mu."""

    __slots__ = ("lam", "mu", "coeffs")

    def __init__(self, lam, mu, coeffs: Sequence[Poly] = ()):
        self.lam = Fraction(lam)
        self.mu = Fraction(mu)
        cs = [c if isinstance(c, Poly) else Poly(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(lam, mu) -> "DiffOp":
        return DiffOp(lam, mu)

    @staticmethod
    def multiplication(p: Poly, lam, mu) -> "DiffOp":
        return DiffOp(lam, mu, [p])

    @staticmethod
    def partial(order: int, lam, mu, coeff: Poly = None) -> "DiffOp":
        top = coeff if coeff is not None else Poly([1])
        return DiffOp(lam, mu, [P_ZERO] * order + [top])

    @staticmethod
    def identity(lam) -> "DiffOp":
        return DiffOp(lam, lam, [Poly([1])])

    # -- structure -----------------------------------------------------------

    @property
    def order(self) -> Optional[int]:
        return len(self.coeffs) - 1 if self.coeffs else None

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        return (self.lam, self.mu) == (other.lam, other.mu) and self.coeffs == other.coeffs

    def coefficient(self, i: int) -> Poly:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else P_ZERO

    def parity(self) -> Optional[int]:
        return 0 if self.coeffs else None

    # -- arithmetic ------------------------------------------------------------

    def _check_same_block(self, other: "DiffOp"):
        if (self.lam, self.mu) != (other.lam, other.mu):
            raise UsageError("operators act between different density modules")

    def __add__(self, other: "DiffOp") -> "DiffOp":
        self._check_same_block(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return DiffOp(self.lam, self.mu, [self.coefficient(i) + other.coefficient(i) for i in range(n)])

    def __neg__(self) -> "DiffOp":
        return DiffOp(self.lam, self.mu, [-c for c in self.coeffs])

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def scale(self, s) -> "DiffOp":
        return DiffOp(self.lam, self.mu, [c.scale(s) for c in self.coeffs])

    def apply_poly(self, f: Poly) -> Poly:
        out = P_ZERO
        der = f
        for i, p in enumerate(self.coeffs):
            if i:
                der = der.derivative()
            if p:
                out = out + p * der
        return out

    def substitute(self, assignment) -> "DiffOp":
        return DiffOp(self.lam, self.mu, [c.substitute(assignment) for c in self.coeffs])

    def truncate_params(self, max_degree: int) -> "DiffOp":
        return DiffOp(self.lam, self.mu, [c.truncate_params(max_degree) for c in self.coeffs])

    def max_param_degree(self) -> int:
        return max((c.max_param_degree() for c in self.coeffs), default=0)

    def __repr__(self):
        if not self.coeffs:
            return "DiffOp(0)"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c:
                parts.append(f"({c})" + ("" if i == 0 else f" dx^{i}" if i > 1 else " dx"))
        return "DiffOp(" + " + ".join(parts) + ")"

    def to_json(self) -> dict:
        from .kernel import format_rational

        return {
            "lambda": format_rational(self.lam),
            "mu": format_rational(self.mu),
            "coeffs": [c.to_strings() for c in self.coeffs],
        }


class SuperDiffOp:
    """Super differential operator in eta-normal form."""

    __slots__ = ("lam", "mu", "coeffs")

    def __init__(self, lam, mu, coeffs: Sequence[SuperPoly] = ()):
        self.lam = Fraction(lam)
        self.mu = Fraction(mu)
        cs = [c if isinstance(c, SuperPoly) else SuperPoly(*c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(lam, mu) -> "SuperDiffOp":
        return SuperDiffOp(lam, mu)

    @staticmethod
    def multiplication(q: SuperPoly, lam, mu) -> "SuperDiffOp":
        return SuperDiffOp(lam, mu, [q])

    @staticmethod
    def eta_power_term(q: SuperPoly, power: int, lam, mu) -> "SuperDiffOp":
        return SuperDiffOp(lam, mu, [SP_ZERO] * power + [q])

    @staticmethod
    def identity(lam) -> "SuperDiffOp":
        return SuperDiffOp(lam, lam, [SuperPoly.const(1)])

    # -- structure -----------------------------------------------------------

    @property
    def order(self) -> Optional[int]:
        return len(self.coeffs) - 1 if self.coeffs else None

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SuperDiffOp):
            return NotImplemented
        return (self.lam, self.mu) == (other.lam, other.mu) and self.coeffs == other.coeffs

    def coefficient(self, i: int) -> SuperPoly:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else SP_ZERO

    def parity(self) -> Optional[int]:
        """Total parity (coefficient parity + eta exponent); None for zero."""
        parities = set()
        for i, q in enumerate(self.coeffs):
            if q:
                p = q.parity()
                parities.add((p + i) & 1)
        if not parities:
            return None
        if len(parities) > 1:
            raise UsageError("super operator is not parity-homogeneous")
        return parities.pop()

    # -- arithmetic ------------------------------------------------------------

    def _check_same_block(self, other: "SuperDiffOp"):
        if (self.lam, self.mu) != (other.lam, other.mu):
            raise UsageError("operators act between different density modules")

    def __add__(self, other: "SuperDiffOp") -> "SuperDiffOp":
        self._check_same_block(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return SuperDiffOp(self.lam, self.mu, [self.coefficient(i) + other.coefficient(i) for i in range(n)])

    def __neg__(self) -> "SuperDiffOp":
        return SuperDiffOp(self.lam, self.mu, [-c for c in self.coeffs])

    def __sub__(self, other: "SuperDiffOp") -> "SuperDiffOp":
        return self + (-other)

    def scale(self, s) -> "SuperDiffOp":
        return SuperDiffOp(self.lam, self.mu, [c.scale(s) for c in self.coeffs])

    def apply_super(self, f: SuperPoly) -> SuperPoly:
        out = SP_ZERO
        power = f
        for i, q in enumerate(self.coeffs):
            if i:
                power = eta_bar(power)
            if q:
                out = out + q * power
        return out

    def substitute(self, assignment) -> "SuperDiffOp":
        return SuperDiffOp(self.lam, self.mu, [c.substitute(assignment) for c in self.coeffs])

    def truncate_params(self, max_degree: int) -> "SuperDiffOp":
        return SuperDiffOp(self.lam, self.mu, [c.truncate_params(max_degree) for c in self.coeffs])

    def max_param_degree(self) -> int:
        return max((c.max_param_degree() for c in self.coeffs), default=0)

    def __repr__(self):
        if not self.coeffs:
            return "SuperDiffOp(0)"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c:
                parts.append(f"({c})" + ("" if i == 0 else f" eta^{i}" if i > 1 else " eta"))
        return "SuperDiffOp(" + " + ".join(parts) + ")"

    def to_json(self) -> dict:
        from .kernel import format_rational

        parity = self.parity()
        return {
            "lambda": format_rational(self.lam),
            "mu": format_rational(self.mu),
            "parity": {0: "even", 1: "odd", None: "zero"}[parity],
            "coeffs": [c.to_json() for c in self.coeffs],
        }

    def to_raw(self) -> "RawOp":
        """Rewrite into the (d_x, d_theta) presentation."""
        out = RawOp()
        for i, q in enumerate(self.coeffs):
            if not q:
                continue
            half, rem = divmod(i, 2)
            sign = Fraction(-1) ** half
            if rem == 0:
                # eta^{2h} = (-1)^h d_x^h
                out.add_term(q.scale(sign), half, 0)
            else:
                # eta^{2h+1} = (-1)^h (d_x^h d_theta - theta d_x^{h+1})
                out.add_term(q.scale(sign), half, 1)
                out.add_term((q * SuperPoly(P_ZERO, Poly([1]))).scale(-sign), half + 1, 0)
        return out


AnyOp = Union[DiffOp, SuperDiffOp]


class RawOp:
    """Operator on the superline presented as ``sum q_{i,e} d_x^i d_theta^e``.

    Used for cross-checks: contact-field composition, the parity
    decomposition of odd 2-cocycles, and as the target of the eta-form
    conversion.  Not weight-tagged; it is a plain operator on functions.
    """

    __slots__ = ("terms",)

    def __init__(self):
        self.terms: dict[tuple[int, int], SuperPoly] = {}

    def add_term(self, q: SuperPoly, dx: int, dtheta: int) -> "RawOp":
        if q:
            key = (dx, dtheta)
            acc = self.terms.get(key)
            total = q if acc is None else acc + q
            if total:
                self.terms[key] = total
            else:
                self.terms.pop(key, None)
        return self

    @staticmethod
    def multiplication(q: SuperPoly) -> "RawOp":
        return RawOp().add_term(q, 0, 0)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, RawOp):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other: "RawOp") -> "RawOp":
        out = RawOp()
        for (i, e), q in self.terms.items():
            out.add_term(q, i, e)
        for (i, e), q in other.terms.items():
            out.add_term(q, i, e)
        return out

    def scale(self, s) -> "RawOp":
        out = RawOp()
        for (i, e), q in self.terms.items():
            out.add_term(q.scale(s), i, e)
        return out

    def __sub__(self, other: "RawOp") -> "RawOp":
        return self + other.scale(-1)

    def compose(self, other: "RawOp") -> "RawOp":
        out = RawOp()
        for (i, e), q in self.terms.items():
            for (j, d), r in other.terms.items():
                if e and d:
                    continue  # d_theta^2 = 0
                # move d_x^i d_theta^e across mult(r)
                if e:
                    moved = [(r.partial_theta(), 0), (r.involute(), 1)]
                else:
                    moved = [(r, 0)]
                for base, extra_theta in moved:
                    # now move d_x^i across mult(base) by Leibniz
                    der = base
                    for s in range(i + 1):
                        if s:
                            der = der.derivative_x()
                        if not der:
                            continue
                        coeff = q * der.scale(comb(i, s))
                        out.add_term(coeff, i - s + j, extra_theta + d)
        return out

    def apply_super(self, f: SuperPoly) -> SuperPoly:
        out = SP_ZERO
        for (i, e), q in self.terms.items():
            g = f
            for _ in range(i):
                g = g.derivative_x()
            if e:
                g = g.partial_theta()
        # note: d_x and d_theta commute, order irrelevant
            out = out + q * g
        return out

    def __repr__(self):
        if not self.terms:
            return "RawOp(0)"
        parts = []
        for (i, e) in sorted(self.terms):
            q = self.terms[(i, e)]
            tag = "".join(["" if i == 0 else f" dx^{i}" if i > 1 else " dx", " dth" if e else ""])
            parts.append(f"({q}){tag}")
        return "RawOp(" + " + ".join(parts) + ")"


# ---------------------------------------------------------------------------
# Composition and application
# ---------------------------------------------------------------------------


def _compose_classical(a: DiffOp, b: DiffOp) -> DiffOp:
    if b.mu != a.lam:
        raise UsageError("compose: inner target weight must match outer source weight")
    if not a.coeffs or not b.coeffs:
        return DiffOp.zero(b.lam, a.mu)
    out: dict[int, Poly] = {}
    for i, p in enumerate(a.coeffs):
        if not p:
            continue
        for j, r in enumerate(b.coeffs):
            if not r:
                continue
            # d_x^i o mult(r) = sum_s C(i,s) mult(r^{(s)}) d_x^{i-s}
            der = r
            for s in range(i + 1):
                if s:
                    der = der.derivative()
                if not der:
                    break
                term = p * der.scale(comb(i, s))
                key = i - s + j
                out[key] = out.get(key, P_ZERO) + term
    top = max(out, default=-1)
    return DiffOp(b.lam, a.mu, [out.get(k, P_ZERO) for k in range(top + 1)])


def _compose_super(a: SuperDiffOp, b: SuperDiffOp) -> SuperDiffOp:
    if b.mu != a.lam:
        raise UsageError("compose: inner target weight must match outer source weight")
    if not a.coeffs or not b.coeffs:
        return SuperDiffOp.zero(b.lam, a.mu)
    out: dict[int, SuperPoly] = {}
    for j, r in enumerate(b.coeffs):
        if not r:
            continue
        # table[e] holds c_e with eta^i o mult(r) = sum_e mult(c_e) eta^e,
        # built one application of eta o mult(u) = mult(eta u) + mult(u^) eta
        # at a time.
        table: dict[int, SuperPoly] = {0: r}
        for i, q in enumerate(a.coeffs):
            if i:
                new_table: dict[int, SuperPoly] = {}
                for e, c in table.items():
                    bumped = eta_bar(c)
                    if bumped:
                        acc = new_table.get(e)
                        new_table[e] = bumped if acc is None else acc + bumped
                    inv = c.involute()
                    if inv:
                        acc = new_table.get(e + 1)
                        new_table[e + 1] = inv if acc is None else acc + inv
                table = new_table
            if not q:
                continue
            for e, c in table.items():
                term = q * c
                if term:
                    key = e + j
                    acc = out.get(key)
                    out[key] = term if acc is None else acc + term
    top = max(out, default=-1)
    return SuperDiffOp(b.lam, a.mu, [out.get(k, SP_ZERO) for k in range(top + 1)])


def compose(a: AnyOp, b: AnyOp) -> AnyOp:
    """Normal-form product: apply(compose(a, b), d) == apply(a, apply(b, d))."""
    if isinstance(a, DiffOp) and isinstance(b, DiffOp):
        return _compose_classical(a, b)
    if isinstance(a, SuperDiffOp) and isinstance(b, SuperDiffOp):
        return _compose_super(a, b)
    raise UsageError("cannot compose operators of different flavors")


def apply(a: AnyOp, d: Density) -> Density:
    """Apply an operator to a density of its source weight."""
    if isinstance(a, DiffOp):
        if d.flavor != CLASSICAL:
            raise UsageError("classical operator applied to a super density")
        if d.weight != a.lam:
            raise UsageError("density weight does not match the operator's source weight")
        return Density(a.mu, a.apply_poly(d.value), CLASSICAL)
    if d.flavor != SUPER:
        raise UsageError("super operator applied to a classical density")
    if d.weight != a.lam:
        raise UsageError("density weight does not match the operator's source weight")
    return Density(a.mu, a.apply_super(d.value), SUPER)


def supercommutator(a: AnyOp, b: AnyOp) -> AnyOp:
    """a o b - (-1)^{p(a)p(b)} b o a (plain commutator in the classical case)."""
    pa, pb = a.parity(), b.parity()
    sign = -1 if (pa and pb) else 1
    first = compose(a, b)
    second = compose(b, a)
    return first - second.scale(sign)


# ---------------------------------------------------------------------------
# Lie-derivative operators and actions on operator modules
# ---------------------------------------------------------------------------


def lie_op(x: VectorField, lam) -> DiffOp:
    """L^lam_{g d/dx} = g d_x + lam g' as an operator on F_lam."""
    return DiffOp(lam, lam, [x.g.derivative().scale(Fraction(lam)), x.g])


def super_lie_op(x: ContactField, lam) -> SuperDiffOp:
    """The density action of a contact field as an eta-form operator.

    X_G + lam G' rewrites to  mult(lam G') + mult(b) eta - mult(a + b*theta) eta^2
    via d_x = -eta^2 and d_theta = eta - theta eta^2.
    """
    lam = Fraction(lam)
    c0 = x.generator.derivative_x().scale(lam)
    c1 = x.b
    c2 = -(x.a + x.b.times_theta())
    return SuperDiffOp(lam, lam, [c0, c1, c2])


def lie_derivative_op(x: VectorField, a: DiffOp) -> DiffOp:
    """Action on operator modules: L^mu_X o A - A o L^lam_X."""
    return _compose_classical(lie_op(x, a.mu), a) - _compose_classical(a, lie_op(x, a.lam))


def super_lie_derivative_op(x: ContactField, a: SuperDiffOp) -> SuperDiffOp:
    """Super action: L^mu_X o A - (-1)^{p(A)p(X)} A o L^lam_X."""
    pa = a.parity()
    if pa is None:
        return a
    sign = -1 if (pa and x.parity) else 1
    left = _compose_super(super_lie_op(x, a.mu), a)
    right = _compose_super(a, super_lie_op(x, a.lam))
    return left - right.scale(sign)


def principal_symbol(a: DiffOp) -> Density:
    """Top coefficient as a density of weight mu - lam - order."""
    if not a.coeffs:
        raise UsageError("the zero operator has no principal symbol")
    k = a.order
    return Density(a.mu - a.lam - k, a.coeffs[k], CLASSICAL)


# ---------------------------------------------------------------------------
# Graded operators on a window of the symbol module
# ---------------------------------------------------------------------------


class GradedOp:
    """Block matrix of operators on a finite window of the symbol module.

    Component ``k`` of the window carries weight ``delta - k`` in the
    classical flavor and ``delta - k/2`` in the super flavor; the block
    keyed ``(j, i)`` maps component ``j`` to component ``i``.
    """

    __slots__ = ("flavor", "delta", "kmax", "blocks")

    def __init__(self, flavor: str, delta, kmax: int, blocks=None):
        self.flavor = flavor
        self.delta = Fraction(delta)
        self.kmax = kmax
        self.blocks: dict[tuple[int, int], AnyOp] = {}
        for (j, i), op in (blocks or {}).items():
            self.set_block(j, i, op)

    def weight_of(self, index: int) -> Fraction:
        if not 0 <= index <= self.kmax:
            raise UsageError(f"component {index} outside window 0..{self.kmax}")
        step = Fraction(1) if self.flavor == CLASSICAL else Fraction(1, 2)
        return self.delta - step * index

    def set_block(self, j: int, i: int, op: AnyOp) -> None:
        expected = (self.weight_of(j), self.weight_of(i))
        if (op.lam, op.mu) != expected:
            raise UsageError(
                f"block ({j},{i}) must map weight {expected[0]} to {expected[1]}, "
                f"got {op.lam} to {op.mu}"
            )
        if op:
            self.blocks[(j, i)] = op
        else:
            self.blocks.pop((j, i), None)

    def block(self, j: int, i: int) -> AnyOp:
        op = self.blocks.get((j, i))
        if op is not None:
            return op
        zero = DiffOp.zero if self.flavor == CLASSICAL else SuperDiffOp.zero
        return zero(self.weight_of(j), self.weight_of(i))

    def _check_compatible(self, other: "GradedOp"):
        if (self.flavor, self.delta, self.kmax) != (other.flavor, other.delta, other.kmax):
            raise UsageError("graded operators live on different windows")

    def __bool__(self):
        return bool(self.blocks)

    def __eq__(self, other):
        if not isinstance(other, GradedOp):
            return NotImplemented
        return (
            (self.flavor, self.delta, self.kmax) == (other.flavor, other.delta, other.kmax)
            and self.blocks == other.blocks
        )

    def __add__(self, other: "GradedOp") -> "GradedOp":
        self._check_compatible(other)
        out = GradedOp(self.flavor, self.delta, self.kmax)
        for key, op in self.blocks.items():
            out.set_block(*key, op)
        for key, op in other.blocks.items():
            existing = out.blocks.get(key)
            out.set_block(*key, op if existing is None else existing + op)
        return out

    def __neg__(self) -> "GradedOp":
        return self.scale(-1)

    def __sub__(self, other: "GradedOp") -> "GradedOp":
        return self + other.scale(-1)

    def scale(self, s) -> "GradedOp":
        out = GradedOp(self.flavor, self.delta, self.kmax)
        for (j, i), op in self.blocks.items():
            out.set_block(j, i, op.scale(s))
        return out

    def compose(self, other: "GradedOp") -> "GradedOp":
        """Block-wise composition self o other (apply `other` first)."""
        self._check_compatible(other)
        out = GradedOp(self.flavor, self.delta, self.kmax)
        acc: dict[tuple[int, int], AnyOp] = {}
        for (j, mid), b_op in other.blocks.items():
            for (mid2, i), a_op in self.blocks.items():
                if mid2 != mid:
                    continue
                term = compose(a_op, b_op)
                if not term:
                    continue
                key = (j, i)
                acc[key] = term if key not in acc else acc[key] + term
        for (j, i), op in acc.items():
            out.set_block(j, i, op)
        return out

    def parity(self) -> Optional[int]:
        parities = {op.parity() for op in self.blocks.values() if op}
        parities.discard(None)
        if not parities:
            return None
        if len(parities) > 1:
            raise UsageError("graded operator is not parity-homogeneous")
        return parities.pop()

    def bracket(self, other: "GradedOp", sign: int) -> "GradedOp":
        """self o other - sign * other o self with an explicit Koszul sign."""
        return self.compose(other) - other.compose(self).scale(sign)

    def supercommutator(self, other: "GradedOp") -> "GradedOp":
        pa, pb = self.parity(), other.parity()
        return self.bracket(other, -1 if (pa and pb) else 1)

    def substitute(self, assignment) -> "GradedOp":
        out = GradedOp(self.flavor, self.delta, self.kmax)
        for (j, i), op in self.blocks.items():
            out.set_block(j, i, op.substitute(assignment))
        return out

    def truncate_params(self, max_degree: int) -> "GradedOp":
        out = GradedOp(self.flavor, self.delta, self.kmax)
        for (j, i), op in self.blocks.items():
            out.set_block(j, i, op.truncate_params(max_degree))
        return out

    def max_param_degree(self) -> int:
        return max((op.max_param_degree() for op in self.blocks.values()), default=0)

    def param_component(self, degree: int) -> "GradedOp":
        """Keep only coefficient terms of the given total parameter degree."""
        out = GradedOp(self.flavor, self.delta, self.kmax)
        for (j, i), op in self.blocks.items():
            low = op.truncate_params(degree)
            if degree > 0:
                low = low - op.truncate_params(degree - 1)
            out.set_block(j, i, low)
        return out

    def __repr__(self):
        body = ", ".join(f"({j}->{i}): {op!r}" for (j, i), op in sorted(self.blocks.items()))
        return f"GradedOp[{self.flavor}, delta={self.delta}, K={self.kmax}]{{{body}}}"

    def to_json(self) -> dict:
        from .kernel import format_rational

        return {
            "flavor": self.flavor,
            "delta": format_rational(self.delta),
            "window": self.kmax,
            "blocks": [
                {"source_k": j, "target_k": i, "op": op.to_json()}
                for (j, i), op in sorted(self.blocks.items())
            ],
        }


def graded_identity(flavor: str, delta, kmax: int) -> GradedOp:
    out = GradedOp(flavor, delta, kmax)
    ident = DiffOp.identity if flavor == CLASSICAL else SuperDiffOp.identity
    for k in range(kmax + 1):
        out.set_block(k, k, ident(out.weight_of(k)))
    return out


def graded_action(x: Union[VectorField, ContactField], g: GradedOp) -> GradedOp:
    """Block-wise Lie derivative of a graded operator."""
    out = GradedOp(g.flavor, g.delta, g.kmax)
    for (j, i), op in g.blocks.items():
        if g.flavor == CLASSICAL:
            out.set_block(j, i, lie_derivative_op(x, op))
        else:
            out.set_block(j, i, super_lie_derivative_op(x, op))
    return out


def undeformed_action(x: Union[VectorField, ContactField], flavor: str, delta, kmax: int) -> GradedOp:
    """The diagonal Lie-derivative action on a window of the symbol module."""
    out = GradedOp(flavor, delta, kmax)
    for k in range(kmax + 1):
        w = out.weight_of(k)
        if flavor == CLASSICAL:
            out.set_block(k, k, lie_op(x, w))
        else:
            out.set_block(k, k, super_lie_op(x, w))
    return out
