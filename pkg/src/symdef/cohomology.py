"""Chevalley-Eilenberg cochains of sl(2) and osp(1|2) with operator
values, their differentials, bounded coboundary solving, and truncated
cohomology dimensions.

The super differential follows one fixed convention, for a cochain c of
parity p(c) and homogeneous arguments:

    (d0 b)(X)    = (-1)^{p(X)p(b)} rho(X) b
    (d1 c)(X,Y)  = (-1)^{p(c)p(X)} rho(X) c(Y)
                   - (-1)^{p(Y)(p(c)+p(X))} rho(Y) c(X) - c([X,Y])
    (d2 w)(X,Y,Z)= (-1)^{p(w)p(X)} rho(X) w(Y,Z)
                   - (-1)^{p(Y)(p(w)+p(X))} rho(Y) w(X,Z)
                   + (-1)^{p(Z)(p(w)+p(X)+p(Y))} rho(Z) w(X,Y)
                   - w([X,Y],Z) + (-1)^{p(Z)p(Y)} w([X,Z],Y) + w(X,[Y,Z])

Two global sign toggles (one on the action sum, one on the bracket sum)
are kept as configuration so the convention can be calibrated against the
named cocycle families; the calibration lives in ``catalog`` and the
record it produces is embedded in every report.

All linear algebra is done exactly, sliced by the weight grading of the
Euler element, under explicit operator-order and coefficient-degree
bounds.  A failed solve is therefore always *within bounds*, never a
claim about the untruncated complex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

from .geometry import (
    CLASSICAL,
    SUPER,
    Poly,
    SuperPoly,
    contact_bracket,
    osp_basis,
    sl2_basis,
    vf_bracket,
)
from .kernel import InternalError, UsageError, scalar_as_fraction
from .operators import (
    AnyOp,
    DiffOp,
    GradedOp,
    SuperDiffOp,
    graded_action,
    lie_derivative_op,
    super_lie_derivative_op,
)

SL2 = "sl2"
OSP12 = "osp12"


@dataclass(frozen=True)
class SignConvention:
    action_sign: int = 1
    bracket_sign: int = 1

    def to_json(self) -> dict:
        return {"action_sign": self.action_sign, "bracket_sign": self.bracket_sign}


DEFAULT_CONVENTION = SignConvention(1, 1)


@dataclass(frozen=True)
class BoundsSpec:
    """Truncation控制: witness operator order and coefficient degree caps."""

    max_operator_order: int
    max_coefficient_degree: int

    def __post_init__(self):
        if self.max_operator_order < 0 or self.max_coefficient_degree < 0:
            raise UsageError("bounds must be non-negative")

    def bumped(self, extra: int = 2) -> "BoundsSpec":
        return BoundsSpec(self.max_operator_order + extra, self.max_coefficient_degree + extra)

    def to_json(self) -> dict:
        return {"max_operator_order": self.max_operator_order,
                "max_coefficient_degree": self.max_coefficient_degree}


# ---------------------------------------------------------------------------
# Algebra contexts
# ---------------------------------------------------------------------------


class AlgebraContext:
    """A finite basis of the acting algebra with brackets expanded over it."""

    def __init__(self, name: str):
        if name == SL2:
            self.name = name
            self.flavor = CLASSICAL
            self.basis = sl2_basis()
            self.parities = (0, 0, 0)
            self.euler_index = 1
            self.weights2 = (-2, 0, 2)
        elif name == OSP12:
            self.name = name
            self.flavor = SUPER
            self.basis = osp_basis()
            self.parities = (0, 1, 0, 1, 0)
            self.euler_index = 2
            self.weights2 = (-2, -1, 0, 1, 2)
        else:
            raise UsageError(f"unknown algebra {name!r}")
        self.dim = len(self.basis)
        self.structure = self._structure_constants()

    def _structure_constants(self) -> dict[tuple[int, int], tuple[Fraction, ...]]:
        out = {}
        for i in range(self.dim):
            for j in range(self.dim):
                if self.flavor == CLASSICAL:
                    g = vf_bracket(self.basis[i], self.basis[j]).g
                    if (g.degree or 0) > 2:
                        raise InternalError("sl(2) bracket left the span")
                    coeffs = tuple(Fraction(g.coefficient(n)) for n in range(3))
                else:
                    h = contact_bracket(self.basis[i], self.basis[j]).generator
                    if (h.f0.degree or 0) > 2 or (h.f1.degree or 0) > 1:
                        raise InternalError("osp(1|2) bracket left the span")
                    coeffs = tuple(
                        Fraction(scalar_as_fraction(c))
                        for c in (
                            h.f0.coefficient(0),
                            h.f1.coefficient(0),
                            h.f0.coefficient(1),
                            h.f1.coefficient(1),
                            h.f0.coefficient(2),
                        )
                    )
                out[(i, j)] = coeffs
        return out

    def act(self, index: int, value):
        """The module action of basis element `index` on an operator value."""
        x = self.basis[index]
        if isinstance(value, GradedOp):
            return graded_action(x, value)
        if isinstance(value, DiffOp):
            return lie_derivative_op(x, value)
        if isinstance(value, SuperDiffOp):
            return super_lie_derivative_op(x, value)
        raise UsageError(f"cannot act on {type(value).__name__}")

    def canonical_pairs(self) -> list[tuple[int, int]]:
        pairs = [(i, j) for i in range(self.dim) for j in range(i + 1, self.dim)]
        pairs.extend((i, i) for i in range(self.dim) if self.parities[i])
        return sorted(pairs)

    def canonical_triples(self) -> list[tuple[int, int, int]]:
        out = []
        for i in range(self.dim):
            for j in range(i, self.dim):
                if i == j and not self.parities[i]:
                    continue
                for k in range(j, self.dim):
                    if j == k and not self.parities[j]:
                        continue
                    out.append((i, j, k))
        return out


@lru_cache(maxsize=None)
def get_algebra(name: str) -> AlgebraContext:
    return AlgebraContext(name)


def algebra_for_flavor(flavor: str) -> AlgebraContext:
    return get_algebra(SL2 if flavor == CLASSICAL else OSP12)


# ---------------------------------------------------------------------------
# Cochains
# ---------------------------------------------------------------------------


def _infer_parity(values, slot_parities, declared: Optional[int]) -> int:
    inferred = set()
    for value, slot_parity in values:
        if not value:
            continue
        p = value.parity()
        if p is None:
            continue
        inferred.add((p + slot_parity) & 1)
    if len(inferred) > 1:
        raise UsageError("cochain images have inconsistent parities")
    if inferred:
        parity = inferred.pop()
        if declared is not None and declared != parity:
            raise UsageError("declared cochain parity contradicts the images")
        return parity
    return declared if declared is not None else 0


class Cochain0:
    """Degree-0 cochain: a single operator value."""

    def __init__(self, algebra: str, value, parity: Optional[int] = None):
        self.algebra = algebra
        self.value = value
        self.parity = _infer_parity([(value, 0)], None, parity)

    def is_zero(self) -> bool:
        return not self.value


class Cochain1:
    """Degree-1 cochain: one operator value per algebra basis element."""

    def __init__(self, algebra: str, images: Sequence, parity: Optional[int] = None):
        ctx = get_algebra(algebra)
        images = list(images)
        if len(images) != ctx.dim:
            raise UsageError(f"expected {ctx.dim} images for {algebra}")
        self.algebra = algebra
        self.images = images
        self.parity = _infer_parity(zip(images, ctx.parities), None, parity)

    def zero_value(self):
        return self.images[0].scale(0)

    def is_zero(self) -> bool:
        return not any(self.images)

    def __add__(self, other: "Cochain1") -> "Cochain1":
        if self.algebra != other.algebra:
            raise UsageError("cochains over different algebras")
        return Cochain1(self.algebra, [a + b for a, b in zip(self.images, other.images)], None)

    def __sub__(self, other: "Cochain1") -> "Cochain1":
        return self + other.scale(-1)

    def scale(self, s) -> "Cochain1":
        # parity is re-inferred: scaling by an odd parameter flips it
        return Cochain1(self.algebra, [im.scale(s) for im in self.images])

    def __eq__(self, other):
        if not isinstance(other, Cochain1):
            return NotImplemented
        return self.algebra == other.algebra and self.images == other.images


class Cochain2:
    """Degree-2 cochain stored on canonical pairs (i < j, odd diagonals).

    Super-antisymmetry is a storage convention: evaluation at a swapped
    pair flips by -(-1)^{p(X)p(Y)}, and diagonal images at even elements
    are identically zero.
    """

    def __init__(self, algebra: str, images: dict, parity: Optional[int] = None):
        ctx = get_algebra(algebra)
        expected = set(ctx.canonical_pairs())
        if set(images) != expected:
            raise UsageError("degree-2 cochain must provide every canonical pair image")
        self.algebra = algebra
        self.images = dict(images)
        slot_parities = {(i, j): (ctx.parities[i] + ctx.parities[j]) & 1 for (i, j) in expected}
        self.parity = _infer_parity(
            [(v, slot_parities[k]) for k, v in images.items()], None, parity
        )

    def zero_value(self):
        return next(iter(self.images.values())).scale(0)

    def at(self, i: int, j: int):
        ctx = get_algebra(self.algebra)
        if (i, j) in self.images:
            return self.images[(i, j)]
        if (j, i) in self.images:
            sign = -1 if not (ctx.parities[i] and ctx.parities[j]) else 1
            return self.images[(j, i)].scale(sign)
        return self.zero_value()  # even diagonal

    def is_zero(self) -> bool:
        return not any(self.images.values())

    def __add__(self, other: "Cochain2") -> "Cochain2":
        if self.algebra != other.algebra:
            raise UsageError("cochains over different algebras")
        return Cochain2(
            self.algebra, {k: v + other.images[k] for k, v in self.images.items()}, None
        )

    def __sub__(self, other: "Cochain2") -> "Cochain2":
        return self + other.scale(-1)

    def scale(self, s) -> "Cochain2":
        # parity is re-inferred: scaling by an odd parameter flips it
        return Cochain2(self.algebra, {k: v.scale(s) for k, v in self.images.items()})

    def __eq__(self, other):
        if not isinstance(other, Cochain2):
            return NotImplemented
        return self.algebra == other.algebra and self.images == other.images


Cochain = Union[Cochain1, Cochain2]


def _sign(exponent: int) -> int:
    return -1 if exponent & 1 else 1


def d0(b: Cochain0, convention: SignConvention = DEFAULT_CONVENTION) -> Cochain1:
    """(d0 b)(X) = (-1)^{p(X)p(b)} rho(X) b."""
    ctx = get_algebra(b.algebra)
    sa = convention.action_sign
    images = []
    for i in range(ctx.dim):
        term = ctx.act(i, b.value).scale(sa * _sign(ctx.parities[i] * b.parity))
        images.append(term)
    return Cochain1(b.algebra, images, (b.parity or 0))


def d1(c: Cochain1, convention: SignConvention = DEFAULT_CONVENTION) -> Cochain2:
    ctx = get_algebra(c.algebra)
    sa, sb = convention.action_sign, convention.bracket_sign
    p = c.parity
    par = ctx.parities
    images = {}
    for (i, j) in ctx.canonical_pairs():
        term = ctx.act(i, c.images[j]).scale(sa * _sign(p * par[i]))
        term = term - ctx.act(j, c.images[i]).scale(sa * _sign(par[j] * (p + par[i])))
        for g, coeff in enumerate(ctx.structure[(i, j)]):
            if coeff:
                term = term - c.images[g].scale(sb * coeff)
        images[(i, j)] = term
    return Cochain2(c.algebra, images, p)


def d2(w: Cochain2, convention: SignConvention = DEFAULT_CONVENTION) -> dict:
    """Images of the degree-2 differential on canonical basis triples."""
    ctx = get_algebra(w.algebra)
    sa, sb = convention.action_sign, convention.bracket_sign
    p = w.parity
    par = ctx.parities
    out = {}
    for (i, j, k) in ctx.canonical_triples():
        term = ctx.act(i, w.at(j, k)).scale(sa * _sign(p * par[i]))
        term = term - ctx.act(j, w.at(i, k)).scale(sa * _sign(par[j] * (p + par[i])))
        term = term + ctx.act(k, w.at(i, j)).scale(sa * _sign(par[k] * (p + par[i] + par[j])))
        for g, coeff in enumerate(ctx.structure[(i, j)]):
            if coeff:
                term = term - w.at(g, k).scale(sb * coeff)
        for g, coeff in enumerate(ctx.structure[(i, k)]):
            if coeff:
                term = term + w.at(g, j).scale(sb * coeff * _sign(par[k] * par[j]))
        for g, coeff in enumerate(ctx.structure[(j, k)]):
            if coeff:
                term = term + w.at(i, g).scale(sb * coeff)
        out[(i, j, k)] = term
    return out


def is_cocycle(c: Cochain, convention: SignConvention = DEFAULT_CONVENTION) -> bool:
    if isinstance(c, Cochain1):
        return d1(c, convention).is_zero()
    return all(not v for v in d2(c, convention).values())


# ---------------------------------------------------------------------------
# Weight grading
# ---------------------------------------------------------------------------


def op_weight_split(op: AnyOp) -> dict[int, AnyOp]:
    """Split an operator into Euler-weight components (doubled integer keys).

    A classical monomial x^d d_x^i has key 2(d - i); a super monomial
    x^d theta^eps eta^i has key 2d + eps - i.  The module action of the
    Euler element is diagonal with these keys up to a block constant.
    """
    out: dict[int, AnyOp] = {}
    if isinstance(op, DiffOp):
        for i, poly in enumerate(op.coeffs):
            for dpow, c in enumerate(poly.coeffs):
                if not c:
                    continue
                key = 2 * (dpow - i)
                tgt = out.setdefault(key, DiffOp.zero(op.lam, op.mu))
                out[key] = tgt + DiffOp.partial(i, op.lam, op.mu, Poly.x_power(dpow, c))
        return out
    if isinstance(op, SuperDiffOp):
        for i, sp in enumerate(op.coeffs):
            for eps, poly in ((0, sp.f0), (1, sp.f1)):
                for dpow, c in enumerate(poly.coeffs):
                    if not c:
                        continue
                    key = 2 * dpow + eps - i
                    piece = SuperDiffOp.eta_power_term(
                        SuperPoly.x_power(dpow, c, theta=bool(eps)), i, op.lam, op.mu
                    )
                    tgt = out.get(key)
                    out[key] = piece if tgt is None else tgt + piece
        return out
    raise UsageError("weight splitting is defined for single-block operators")


def cochain_weight_keys(c: Cochain) -> list[int]:
    ctx = get_algebra(c.algebra)
    keys = set()
    if isinstance(c, Cochain1):
        for idx, im in enumerate(c.images):
            for k in op_weight_split(im):
                keys.add(k - ctx.weights2[idx])
    else:
        for (i, j), im in c.images.items():
            for k in op_weight_split(im):
                keys.add(k - ctx.weights2[i] - ctx.weights2[j])
    return sorted(keys)


def cochain_weight_slice(c: Cochain, key: int) -> Cochain:
    ctx = get_algebra(c.algebra)
    if isinstance(c, Cochain1):
        images = []
        for idx, im in enumerate(c.images):
            comp = op_weight_split(im).get(key + ctx.weights2[idx])
            images.append(comp if comp is not None else im.scale(0))
        return Cochain1(c.algebra, images, c.parity)
    images = {}
    for (i, j), im in c.images.items():
        comp = op_weight_split(im).get(key + ctx.weights2[i] + ctx.weights2[j])
        images[(i, j)] = comp if comp is not None else im.scale(0)
    return Cochain2(c.algebra, images, c.parity)


# ---------------------------------------------------------------------------
# Bounded monomial bases and cached actions per block
# ---------------------------------------------------------------------------


class BlockCache:
    """Monomial enumeration and memoized module action on one block."""

    def __init__(self, algebra: str, lam: Fraction, mu: Fraction):
        self.ctx = get_algebra(algebra)
        self.lam = lam
        self.mu = mu
        self._act: dict[tuple[int, tuple], list[tuple[tuple, Fraction]]] = {}

    # -- monomials ----------------------------------------------------------

    def monomial_op(self, mon: tuple) -> AnyOp:
        if self.ctx.flavor == CLASSICAL:
            d, i = mon
            return DiffOp.partial(i, self.lam, self.mu, Poly.x_power(d))
        d, eps, i = mon
        return SuperDiffOp.eta_power_term(
            SuperPoly.x_power(d, theta=bool(eps)), i, self.lam, self.mu
        )

    @staticmethod
    def monomial_key(mon: tuple) -> int:
        if len(mon) == 2:
            return 2 * (mon[0] - mon[1])
        return 2 * mon[0] + mon[1] - mon[2]

    @staticmethod
    def monomial_parity(mon: tuple) -> int:
        if len(mon) == 2:
            return 0
        return (mon[1] + mon[2]) & 1

    def monomials(self, bounds: BoundsSpec, key: Optional[int] = None,
                  parity: Optional[int] = None) -> list[tuple]:
        out = []
        if self.ctx.flavor == CLASSICAL:
            if parity not in (None, 0):
                return []
            for i in range(bounds.max_operator_order + 1):
                for d in range(bounds.max_coefficient_degree + 1):
                    if key is None or 2 * (d - i) == key:
                        out.append((d, i))
            return out
        for i in range(bounds.max_operator_order + 1):
            for eps in (0, 1):
                if parity is not None and ((eps + i) & 1) != parity:
                    continue
                for d in range(bounds.max_coefficient_degree + 1):
                    if key is None or 2 * d + eps - i == key:
                        out.append((d, eps, i))
        return out

    def coords(self, op: AnyOp) -> dict[tuple, Fraction]:
        out = {}
        if isinstance(op, DiffOp):
            for i, poly in enumerate(op.coeffs):
                for d, c in enumerate(poly.coeffs):
                    if c:
                        out[(d, i)] = scalar_as_fraction(c)
            return out
        for i, sp in enumerate(op.coeffs):
            for eps, poly in ((0, sp.f0), (1, sp.f1)):
                for d, c in enumerate(poly.coeffs):
                    if c:
                        out[(d, eps, i)] = scalar_as_fraction(c)
        return out

    def act_monomial(self, gen: int, mon: tuple) -> list[tuple[tuple, Fraction]]:
        keyed = (gen, mon)
        cached = self._act.get(keyed)
        if cached is None:
            result = self.ctx.act(gen, self.monomial_op(mon))
            cached = sorted(self.coords(result).items())
            self._act[keyed] = cached
        return cached


_BLOCK_CACHES: dict[tuple, BlockCache] = {}


def block_cache(algebra: str, lam, mu) -> BlockCache:
    key = (algebra, Fraction(lam), Fraction(mu))
    cache = _BLOCK_CACHES.get(key)
    if cache is None:
        cache = BlockCache(algebra, Fraction(lam), Fraction(mu))
        _BLOCK_CACHES[key] = cache
    return cache


def cochain_block(c: Cochain) -> tuple[Fraction, Fraction]:
    v = c.zero_value() if isinstance(c, Cochain2) else c.images[0].scale(0)
    return (v.lam, v.mu)


# ---------------------------------------------------------------------------
# Differential matrices on weight slices
# ---------------------------------------------------------------------------


def _d1_columns(cache: BlockCache, basis: list[tuple[int, tuple]], parity: int,
                convention: SignConvention) -> list[dict]:
    """Column coordinates of d1 on basis cochains (slot, monomial).

    Mirrors d1 exactly; the agreement is pinned by tests on random slices.
    """
    ctx = cache.ctx
    sa, sb = convention.action_sign, convention.bracket_sign
    par = ctx.parities
    pairs = ctx.canonical_pairs()
    cols = []
    for (slot, mon) in basis:
        col: dict = {}
        for (i, j) in pairs:
            if j == slot:
                factor = sa * _sign(parity * par[i])
                for mon2, val in cache.act_monomial(i, mon):
                    rkey = ((i, j), mon2)
                    acc = col.get(rkey, 0) + factor * val
                    if acc:
                        col[rkey] = acc
                    else:
                        col.pop(rkey, None)
            if i == slot:
                factor = -sa * _sign(par[j] * (parity + par[i]))
                for mon2, val in cache.act_monomial(j, mon):
                    rkey = ((i, j), mon2)
                    acc = col.get(rkey, 0) + factor * val
                    if acc:
                        col[rkey] = acc
                    else:
                        col.pop(rkey, None)
            coeff = ctx.structure[(i, j)][slot]
            if coeff:
                rkey = ((i, j), mon)
                acc = col.get(rkey, 0) - sb * coeff
                if acc:
                    col[rkey] = acc
                else:
                    col.pop(rkey, None)
        cols.append(col)
    return cols


def _d0_columns(cache: BlockCache, basis: list[tuple], parity: int,
                convention: SignConvention) -> list[dict]:
    ctx = cache.ctx
    sa = convention.action_sign
    cols = []
    for mon in basis:
        col: dict = {}
        for i in range(ctx.dim):
            factor = sa * _sign(ctx.parities[i] * parity)
            for mon2, val in cache.act_monomial(i, mon):
                rkey = (i, mon2)
                acc = col.get(rkey, 0) + factor * val
                if acc:
                    col[rkey] = acc
                else:
                    col.pop(rkey, None)
        cols.append(col)
    return cols


def _d2_columns(cache: BlockCache, basis: list[tuple[tuple, tuple]], parity: int,
                convention: SignConvention) -> list[dict]:
    """d2 on basis 2-cochains, via the generic differential (cool path)."""
    ctx = cache.ctx
    pairs = ctx.canonical_pairs()
    zero = cache.monomial_op(basis[0][1]).scale(0) if basis else None
    cols = []
    for (slot_pair, mon) in basis:
        images = {pk: zero for pk in pairs}
        images[slot_pair] = cache.monomial_op(mon)
        w = Cochain2(ctx.name, images, parity)
        col: dict = {}
        for triple, val in d2(w, convention).items():
            for mon2, fr in cache.coords(val).items():
                col[(triple, mon2)] = fr
        cols.append(col)
    return cols


def _enumerate_cochain_basis(cache: BlockCache, degree: int, bounds: BoundsSpec,
                             parity: int, key: int):
    """Basis of the bounded weight-key slice of C^degree."""
    ctx = cache.ctx
    if degree == 0:
        return [mon for mon in cache.monomials(bounds, key=key, parity=parity)]
    if degree == 1:
        out = []
        for slot in range(ctx.dim):
            img_parity = (parity + ctx.parities[slot]) & 1
            for mon in cache.monomials(bounds, key=key + ctx.weights2[slot], parity=img_parity):
                out.append((slot, mon))
        return out
    if degree == 2:
        out = []
        for (i, j) in ctx.canonical_pairs():
            img_parity = (parity + ctx.parities[i] + ctx.parities[j]) & 1
            wt = ctx.weights2[i] + ctx.weights2[j]
            for mon in cache.monomials(bounds, key=key + wt, parity=img_parity):
                out.append(((i, j), mon))
        return out
    raise UsageError("cochain degree must be 0, 1 or 2")


def _differential_columns(cache: BlockCache, degree: int, basis, parity: int,
                          convention: SignConvention) -> list[dict]:
    if degree == 0:
        return _d0_columns(cache, basis, parity, convention)
    if degree == 1:
        return _d1_columns(cache, basis, parity, convention)
    return _d2_columns(cache, basis, parity, convention)


def _dense_system(cols: list[dict], extra_rows=()):
    """Assign deterministic row indices and densify columns."""
    keys = set()
    for col in cols:
        keys.update(col)
    for rhs in extra_rows:
        keys.update(rhs)
    row_index = {k: n for n, k in enumerate(sorted(keys))}
    nrows = len(row_index)
    dense = []
    for r in range(nrows):
        dense.append([Fraction(0)] * len(cols))
    for cnum, col in enumerate(cols):
        for k, v in col.items():
            dense[row_index[k]][cnum] = Fraction(v)
    return dense, row_index


# ---------------------------------------------------------------------------
# Coboundary solving
# ---------------------------------------------------------------------------


@dataclass
class Witness:
    cochain: Union[Cochain0, Cochain1]


@dataclass
class NoSolutionWithinBounds:
    bounds: BoundsSpec


def default_witness_bounds(c: Cochain) -> BoundsSpec:
    """Generous default truncation, relative to the cocycle's own size."""
    lam, mu = cochain_block(c)
    if isinstance(c, Cochain1):
        orders = [im.order or 0 for im in c.images if im]
    else:
        orders = [im.order or 0 for im in c.images.values() if im]
    order = max(orders, default=0)
    n = order + 2 + math.ceil(abs(2 * (mu - lam))) + 2
    return BoundsSpec(n, 2 * n + 4)


def _cochain_coords(cache: BlockCache, c: Cochain) -> dict:
    out = {}
    if isinstance(c, Cochain1):
        for slot, im in enumerate(c.images):
            for mon, fr in cache.coords(im).items():
                out[(slot, mon)] = fr
    else:
        for pair, im in c.images.items():
            for mon, fr in cache.coords(im).items():
                out[(pair, mon)] = fr
    return out


def _assemble_witness(cache: BlockCache, degree: int, basis, vector) -> Union[Cochain0, Cochain1]:
    ctx = cache.ctx
    if degree == 0:
        acc = None
        for mon, coeff in zip(basis, vector):
            if coeff:
                term = cache.monomial_op(mon).scale(coeff)
                acc = term if acc is None else acc + term
        if acc is None:
            acc = cache.monomial_op((0, 0) if ctx.flavor == CLASSICAL else (0, 0, 0)).scale(0)
        return Cochain0(ctx.name, acc)
    images = [None] * ctx.dim
    zero = cache.monomial_op((0, 0) if ctx.flavor == CLASSICAL else (0, 0, 0)).scale(0)
    for (slot, mon), coeff in zip(basis, vector):
        if coeff:
            term = cache.monomial_op(mon).scale(coeff)
            images[slot] = term if images[slot] is None else images[slot] + term
    return Cochain1(ctx.name, [im if im is not None else zero for im in images])


_SOLVER_CACHE: dict[tuple, tuple] = {}


def _slice_solver(cache_key, cache: BlockCache, degree: int, bounds: BoundsSpec,
                  parity: int, key: int, convention: SignConvention):
    """Cached RREF of the slice differential C^{deg} -> C^{deg+1}."""
    from .kernel import SolvedSystem

    full_key = (cache_key, degree, bounds, parity, key, convention)
    hit = _SOLVER_CACHE.get(full_key)
    if hit is not None:
        return hit
    basis = _enumerate_cochain_basis(cache, degree, bounds, parity, key)
    cols = _differential_columns(cache, degree, basis, parity, convention) if basis else []
    keys = set()
    for col in cols:
        keys.update(col)
    row_index = {k: n for n, k in enumerate(sorted(keys))}
    dense = [[Fraction(0)] * len(cols) for _ in row_index]
    for cnum, col in enumerate(cols):
        for k, v in col.items():
            dense[row_index[k]][cnum] = Fraction(v)
    system = SolvedSystem(dense, len(cols))
    out = (basis, row_index, system)
    _SOLVER_CACHE[full_key] = out
    return out


def coboundary_solve(c: Cochain, bounds: Optional[BoundsSpec] = None,
                     convention: SignConvention = DEFAULT_CONVENTION):
    """Solve d(b) = c with b constrained to the given bounds.

    Returns a Witness (whose coboundary is re-checked to equal c exactly)
    or NoSolutionWithinBounds.  The input must be an exact cocycle with
    parameter-free coefficients.
    """
    if bounds is None:
        bounds = default_witness_bounds(c)
    if not is_cocycle(c, convention):
        raise UsageError("coboundary_solve expects a cocycle")
    lam, mu = cochain_block(c)
    cache = block_cache(get_algebra(c.algebra).name, lam, mu)
    degree = 1 if isinstance(c, Cochain2) else 0
    parity = c.parity
    pieces = []
    for key in cochain_weight_keys(c):
        c_slice = cochain_weight_slice(c, key)
        try:
            rhs_coords = _cochain_coords(cache, c_slice)
        except UsageError:
            raise UsageError("coboundary_solve expects parameter-free coefficients")
        basis, row_index, system = _slice_solver(
            (c.algebra, lam, mu), cache, degree, bounds, parity, key, convention
        )
        if any(k not in row_index for k in rhs_coords):
            return NoSolutionWithinBounds(bounds)
        rhs = [Fraction(0)] * len(row_index)
        for k, v in rhs_coords.items():
            rhs[row_index[k]] = Fraction(v)
        solution = system.solve(rhs)
        if solution is None:
            return NoSolutionWithinBounds(bounds)
        pieces.append(_assemble_witness(cache, degree, basis, solution))
    if not pieces:
        # the zero cochain: witness zero
        zero_mon = (0, 0) if cache.ctx.flavor == CLASSICAL else (0, 0, 0)
        zero = cache.monomial_op(zero_mon).scale(0)
        if degree == 0:
            witness: Union[Cochain0, Cochain1] = Cochain0(c.algebra, zero)
        else:
            witness = Cochain1(c.algebra, [zero] * cache.ctx.dim)
    else:
        witness = pieces[0]
        for extra in pieces[1:]:
            if degree == 0:
                witness = Cochain0(c.algebra, witness.value + extra.value, witness.parity)
            else:
                witness = witness + extra
    check = d0(witness, convention) if degree == 0 else d1(witness, convention)
    if isinstance(c, Cochain1):
        ok = all(a == b for a, b in zip(check.images, c.images))
    else:
        ok = all(check.images[k] == c.images[k] for k in c.images)
    if not ok:
        raise InternalError("witness failed the exact re-check")
    return Witness(witness)


def classes_independent(cocycles: Sequence[Cochain], bounds: Optional[BoundsSpec] = None,
                        convention: SignConvention = DEFAULT_CONVENTION) -> bool:
    """True when no nonzero rational combination of the given cocycles is a
    coboundary within bounds (in particular they are linearly independent
    in the truncated cohomology)."""
    from .kernel import matrix_rank

    if not cocycles:
        return True
    first = cocycles[0]
    if bounds is None:
        bounds = max((default_witness_bounds(c) for c in cocycles),
                     key=lambda b: (b.max_operator_order, b.max_coefficient_degree))
    lam, mu = cochain_block(first)
    cache = block_cache(get_algebra(first.algebra).name, lam, mu)
    degree = 1 if isinstance(first, Cochain2) else 0
    parity = first.parity
    for c in cocycles:
        if not is_cocycle(c, convention):
            raise UsageError("classes_independent expects cocycles")
        if cochain_block(c) != (lam, mu) or c.parity != parity:
            raise UsageError("cocycles must share a block and parity")
    keys = sorted({k for c in cocycles for k in cochain_weight_keys(c)})
    cocycle_cols = []
    for c in cocycles:
        col = {}
        for key in keys:
            coords = _cochain_coords(cache, cochain_weight_slice(c, key))
            for rk, v in coords.items():
                col[(key, rk)] = v
        cocycle_cols.append(col)
    boundary_cols = []
    for key in keys:
        basis = _enumerate_cochain_basis(cache, degree, bounds, parity, key)
        for col in _differential_columns(cache, degree, basis, parity, convention):
            boundary_cols.append({(key, rk): v for rk, v in col.items()})
    dense_all, _ = _dense_system(cocycle_cols + boundary_cols)
    dense_bnd, _ = _dense_system(boundary_cols, extra_rows=cocycle_cols)
    rank_all = matrix_rank(dense_all, len(cocycle_cols) + len(boundary_cols))
    rank_bnd = matrix_rank(dense_bnd, len(boundary_cols))
    return rank_all == rank_bnd + len(cocycles)


# ---------------------------------------------------------------------------
# Truncated cohomology dimensions
# ---------------------------------------------------------------------------


@dataclass
class DimResult:
    dim: int
    stabilized: bool
    per_weight: dict
    examined_keys: tuple


def default_dimension_bounds(lam, mu) -> BoundsSpec:
    n = 6 + math.ceil(abs(2 * (Fraction(mu) - Fraction(lam))))
    return BoundsSpec(n, 2 * n + 4)


def _dimension_once(algebra: str, lam, mu, degree: int, bounds: BoundsSpec,
                    convention: SignConvention) -> dict[int, int]:
    from .kernel import matrix_rank

    cache = block_cache(algebra, lam, mu)
    ctx = cache.ctx
    # Witnesses never need to outgrow the cocycles they bound (the Euler
    # contraction provides same-size witnesses off the critical weight),
    # but the witness space is padded a little so the image is not clipped.
    witness_bounds = bounds.bumped(2)
    parities = (0,) if ctx.flavor == CLASSICAL else (0, 1)
    per_weight: dict[int, int] = {}
    for parity in parities:
        # candidate weight keys arising anywhere in the bounded enumeration
        keys = set()
        if degree == 1:
            for slot in range(ctx.dim):
                img_par = (parity + ctx.parities[slot]) & 1
                for mon in cache.monomials(bounds, parity=img_par):
                    keys.add(cache.monomial_key(mon) - ctx.weights2[slot])
        else:
            for (i, j) in ctx.canonical_pairs():
                img_par = (parity + ctx.parities[i] + ctx.parities[j]) & 1
                for mon in cache.monomials(bounds, parity=img_par):
                    keys.add(cache.monomial_key(mon) - ctx.weights2[i] - ctx.weights2[j])
        for key in sorted(keys):
            basis = _enumerate_cochain_basis(cache, degree, bounds, parity, key)
            if not basis:
                continue
            cols = _differential_columns(cache, degree, basis, parity, convention)
            dense, _ = _dense_system(cols)
            ker = len(basis) - matrix_rank(dense, len(basis))
            if not ker:
                continue
            # dim(im d intersect bounded slice) = rank(B) - rank(B outside)
            prev_basis = _enumerate_cochain_basis(cache, degree - 1, witness_bounds, parity, key)
            image = 0
            if prev_basis:
                prev_cols = _differential_columns(cache, degree - 1, prev_basis, parity, convention)
                inside = {(slot, mon) for (slot, mon) in basis}
                all_rows = sorted({rk for col in prev_cols for rk in col})
                out_rows = [rk for rk in all_rows if rk not in inside]
                dense_all = [[col.get(rk, Fraction(0)) for col in prev_cols] for rk in all_rows]
                dense_out = [[col.get(rk, Fraction(0)) for col in prev_cols] for rk in out_rows]
                image = matrix_rank(dense_all, len(prev_cols)) - matrix_rank(dense_out, len(prev_cols))
            dim = ker - image
            if dim:
                per_weight[key] = per_weight.get(key, 0) + dim
    return per_weight


def cohomology_dim(weights, degree: int, algebra: str,
                   bounds: Optional[BoundsSpec] = None,
                   convention: SignConvention = DEFAULT_CONVENTION) -> DimResult:
    """Truncated dim H^degree on one block, with a stabilization flag.

    The dimension is computed per Euler-weight component and summed;
    weight components outside the truncation are not examined.  The
    result is marked stabilized when the bumped bounds agree.
    """
    if degree not in (1, 2):
        raise UsageError("cohomology_dim supports degrees 1 and 2")
    lam, mu = (Fraction(weights[0]), Fraction(weights[1]))
    if bounds is None:
        bounds = default_dimension_bounds(lam, mu)
    first = _dimension_once(algebra, lam, mu, degree, bounds, convention)
    second = _dimension_once(algebra, lam, mu, degree, bounds.bumped(), convention)
    dim = sum(first.values())
    stabilized = dim == sum(second.values())
    examined = tuple(sorted(first))
    return DimResult(dim=dim, stabilized=stabilized, per_weight=first, examined_keys=examined)
