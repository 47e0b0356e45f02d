"""Operator algebra suite: normal forms, Lie-derivative actions, symbols."""

import random
from fractions import Fraction as Q

import pytest

from symdef.geometry import (
    CLASSICAL,
    SUPER,
    Density,
    Poly,
    SuperPoly,
    contact_bracket,
    osp_basis,
    sl2_basis,
    vf_bracket,
)
from symdef.kernel import UsageError
from symdef.operators import (
    DiffOp,
    GradedOp,
    RawOp,
    SuperDiffOp,
    apply,
    compose,
    graded_action,
    graded_identity,
    lie_derivative_op,
    principal_symbol,
    super_lie_derivative_op,
    supercommutator,
    undeformed_action,
)

SP_ONE = SuperPoly.const(1)


def poly(cs):
    return Poly([Q(c) for c in cs])


def spoly(f0, f1):
    return SuperPoly(poly(f0), poly(f1))


def eta_op(lam, mu):
    return SuperDiffOp(lam, mu, [SuperPoly(), SP_ONE])


class TestApply:
    def test_x_ddx_on_cubic(self):
        a = DiffOp(Q(1, 3), Q(7), [Poly(), poly([0, 1])])
        d = Density(Q(1, 3), poly([0, 0, 0, 1]), CLASSICAL)
        out = apply(a, d)
        assert out.weight == Q(7)
        assert out.value == poly([0, 0, 0, 3])

    def test_identity(self):
        a = DiffOp.identity(Q(5, 3))
        d = Density(Q(5, 3), poly([1, 2, 3]), CLASSICAL)
        assert apply(a, d).value == d.value

    def test_eta_on_theta_density(self):
        a = eta_op(Q(0), Q(1, 2))
        d = Density(0, spoly([], [1]), SUPER)
        out = apply(a, d)
        assert out.weight == Q(1, 2) and out.value == spoly([1], [])

    def test_weight_mismatch(self):
        a = DiffOp.identity(1)
        with pytest.raises(UsageError):
            apply(a, Density(2, poly([1]), CLASSICAL))


class TestCompose:
    def test_ddx_after_mult_x(self):
        dx = DiffOp.partial(1, 0, 0)
        mx = DiffOp.multiplication(poly([0, 1]), 0, 0)
        assert compose(dx, mx) == DiffOp(0, 0, [poly([1]), poly([0, 1])])

    def test_eta_squared(self):
        sq = compose(eta_op(0, 0), eta_op(0, 0))
        assert sq == SuperDiffOp(0, 0, [SuperPoly(), SuperPoly(), SP_ONE])
        # in the (d_x, d_theta) presentation this is exactly -d_x
        assert sq.to_raw() == RawOp().add_term(spoly([-1], []), 1, 0)

    def test_compose_with_zero(self):
        a = DiffOp.partial(2, 1, 2)
        z = DiffOp.zero(0, 1)
        assert not compose(a, z)

    def test_apply_respects_composition_classical(self):
        rng = random.Random(23)
        for _ in range(30):
            lam, nu, mu = Q(1, 2), Q(0), Q(-2, 3)
            a = DiffOp(nu, mu, [poly([rng.randrange(-2, 3) for _ in range(3)]) for _ in range(3)])
            b = DiffOp(lam, nu, [poly([rng.randrange(-2, 3) for _ in range(3)]) for _ in range(3)])
            f = Density(lam, poly([rng.randrange(-2, 3) for _ in range(5)]), CLASSICAL)
            assert apply(compose(a, b), f) == apply(a, apply(b, f))

    def test_apply_respects_composition_super(self):
        rng = random.Random(29)
        for _ in range(25):
            lam, nu, mu = Q(0), Q(1, 2), Q(5, 3)

            def rand_op(l, m):
                return SuperDiffOp(
                    l,
                    m,
                    [
                        spoly(
                            [rng.randrange(-2, 3) for _ in range(2)],
                            [rng.randrange(-2, 3) for _ in range(2)],
                        )
                        for _ in range(3)
                    ],
                )

            a, b = rand_op(nu, mu), rand_op(lam, nu)
            f = Density(lam, spoly([rng.randrange(-2, 3) for _ in range(3)], [rng.randrange(-2, 3)]), SUPER)
            assert apply(compose(a, b), f) == apply(a, apply(b, f))

    def test_composition_associativity(self):
        rng = random.Random(31)
        for _ in range(15):
            ops = [
                SuperDiffOp(
                    0,
                    0,
                    [
                        spoly([rng.randrange(-2, 3)], [rng.randrange(-2, 3)])
                        for _ in range(rng.randrange(1, 4))
                    ],
                )
                for _ in range(3)
            ]
            a, b, c = ops
            assert compose(compose(a, b), c) == compose(a, compose(b, c))


class TestSupercommutator:
    def test_ddx_with_mult_x(self):
        dx = DiffOp.partial(1, 0, 0)
        mx = DiffOp.multiplication(poly([0, 1]), 0, 0)
        assert supercommutator(dx, mx) == DiffOp(0, 0, [poly([1])])

    def test_eta_with_eta(self):
        out = supercommutator(eta_op(0, 0), eta_op(0, 0))
        # anticommutator: 2 eta^2 = -2 d_x
        assert out.to_raw() == RawOp().add_term(spoly([-2], []), 1, 0)

    def test_even_self_commutator_vanishes(self):
        a = SuperDiffOp(0, 0, [spoly([1, 2], []), SuperPoly(), spoly([0, 3], [])])
        assert not supercommutator(a, a)


class TestLieDerivative:
    def test_ddx_on_x_ddx(self):
        out = lie_derivative_op(sl2_basis()[0], DiffOp(0, 0, [Poly(), poly([0, 1])]))
        assert out == DiffOp(0, 0, [Poly(), poly([1])])

    def test_euler_on_ddx_block(self):
        lam, mu = Q(-1, 2), Q(3, 2)
        out = lie_derivative_op(sl2_basis()[1], DiffOp.partial(1, lam, mu))
        assert out == DiffOp.partial(1, lam, mu).scale(mu - lam - 1)

    def test_invariant_identity(self):
        for x in sl2_basis():
            assert not lie_derivative_op(x, DiffOp.identity(Q(5, 3)))

    def test_module_property_classical(self):
        # [L_X, L_Y](A) = L_[X,Y](A) over monomial operators
        basis = sl2_basis()
        for lam, mu in [(Q(0), Q(0)), (Q(1, 2), Q(-1, 2)), (Q(5, 3), Q(2))]:
            for x in basis:
                for y in basis:
                    for n in range(0, 5, 2):
                        for i in range(0, 5, 2):
                            a = DiffOp.partial(i, lam, mu, Poly.x_power(n))
                            lhs = lie_derivative_op(x, lie_derivative_op(y, a)) - lie_derivative_op(
                                y, lie_derivative_op(x, a)
                            )
                            rhs = lie_derivative_op(vf_bracket(x, y), a)
                            assert lhs == rhs

    def test_super_action_of_x1_on_eta(self):
        assert not super_lie_derivative_op(osp_basis()[0], eta_op(Q(1, 2), Q(1, 2)))

    def test_super_action_on_multiplication(self):
        # even generator, order-0 even operator, lam = mu: result is mult(F h')
        lam = Q(2, 5)
        h = poly([1, 0, 3])
        for idx in (0, 2, 4):
            xf = osp_basis()[idx]
            a = SuperDiffOp.multiplication(SuperPoly(h, Poly()), lam, lam)
            out = super_lie_derivative_op(xf, a)
            expected = SuperDiffOp.multiplication(xf.generator * SuperPoly(h.derivative(), Poly()), lam, lam)
            assert out == expected

    def test_super_action_zero(self):
        assert not super_lie_derivative_op(osp_basis()[1], SuperDiffOp.zero(0, Q(1, 2)))

    def test_module_property_super(self):
        basis = osp_basis()
        for lam, mu in [(Q(0), Q(0)), (Q(1, 2), Q(0)), (Q(-1, 2), Q(5, 3))]:
            samples = [
                SuperDiffOp.eta_power_term(spoly([0, 0, 1], []), i, lam, mu) for i in range(5)
            ] + [
                SuperDiffOp.eta_power_term(spoly([], [0, 1, 1]), i, lam, mu) for i in range(5)
            ]
            for xi, x in enumerate(basis):
                for yi, y in enumerate(basis):
                    sign = -1 if (x.parity and y.parity) else 1
                    for a in samples:
                        lhs = super_lie_derivative_op(x, super_lie_derivative_op(y, a)) - (
                            super_lie_derivative_op(y, super_lie_derivative_op(x, a)).scale(sign)
                        )
                        rhs = super_lie_derivative_op(contact_bracket(x, y), a)
                        assert lhs == rhs, (xi, yi, a)


class TestPrincipalSymbol:
    def test_weight_and_value(self):
        lam, mu = Q(1, 3), Q(3)
        a = DiffOp(lam, mu, [Poly(), Poly(), poly([0, 1])])
        sym = principal_symbol(a)
        assert sym.weight == mu - lam - 2
        assert sym.value == poly([0, 1])

    def test_identity_symbol(self):
        sym = principal_symbol(DiffOp.identity(Q(1, 2)))
        assert sym.weight == 0 and sym.value == poly([1])

    def test_lower_order_terms_ignored(self):
        a = DiffOp(0, 0, [poly([0, 0, 1]), poly([3])])
        sym = principal_symbol(a)
        assert sym.weight == -1 and sym.value == poly([3])

    def test_zero_rejected(self):
        with pytest.raises(UsageError):
            principal_symbol(DiffOp.zero(0, 0))

    def test_multiplicative_over_composition(self):
        rng = random.Random(37)
        for _ in range(20):
            lam, nu, mu = Q(1, 2), Q(-1, 3), Q(2)
            k, l = rng.randrange(3), rng.randrange(3)
            a = DiffOp.partial(k, nu, mu, poly([rng.randrange(1, 4), 1]))
            b = DiffOp.partial(l, lam, nu, poly([rng.randrange(1, 4)]))
            sa, sb, sab = principal_symbol(a), principal_symbol(b), principal_symbol(compose(a, b))
            assert sab.weight == sa.weight + sb.weight
            assert sab.value == sa.value * sb.value


class TestNormalFormUniqueness:
    def test_classical_coefficients_from_applications(self):
        # applying to x^0..x^order recovers the normal-form coefficients
        # triangularly: A(x^n) = sum_{i<=n} (n!/(n-i)!) p_i x^{n-i}
        rng = random.Random(41)
        for _ in range(20):
            coeffs = [poly([rng.randrange(-3, 4) for _ in range(3)]) for _ in range(4)]
            a = DiffOp(0, 0, coeffs)
            recovered = []
            for n in range(len(a.coeffs)):
                acc = a.apply_poly(Poly.x_power(n))
                fact_n = 1
                for t in range(1, n + 1):
                    fact_n *= t
                for i, p in enumerate(recovered):
                    falling = 1
                    for t in range(n - i + 1, n + 1):
                        falling *= t
                    acc = acc - (p * Poly.x_power(n - i)).scale(falling)
                recovered.append(acc.scale(Q(1, fact_n)))
            assert DiffOp(0, 0, recovered) == a

    def test_zero_iff_kills_generating_family_super(self):
        rng = random.Random(43)
        for _ in range(25):
            coeffs = [
                spoly([rng.randrange(-2, 3) for _ in range(2)], [rng.randrange(-2, 3) for _ in range(2)])
                for _ in range(4)
            ]
            a = SuperDiffOp(0, 0, coeffs)
            probes = [SuperPoly.x_power(j, theta=t) for j in range(4) for t in (False, True)]
            killed = all(not a.apply_super(f) for f in probes)
            assert killed == (not a)


class TestGradedOp:
    def test_identity_action_vanishes(self):
        g = graded_identity(CLASSICAL, Q(3, 2), 3)
        for x in sl2_basis():
            assert not graded_action(x, g)

    def test_zero(self):
        g = GradedOp(CLASSICAL, Q(3, 2), 3)
        assert not graded_action(sl2_basis()[1], g)

    def test_single_block_delegates(self):
        # block (j=2, i=0) at m=3: weights (-1/2, 3/2)
        g = GradedOp(CLASSICAL, Q(3, 2), 4)
        a = DiffOp.partial(2, Q(-1, 2), Q(3, 2))
        g.set_block(2, 0, a)
        out = graded_action(sl2_basis()[1], g)
        assert out.block(2, 0) == lie_derivative_op(sl2_basis()[1], a)

    def test_block_weight_validation(self):
        g = GradedOp(CLASSICAL, Q(3, 2), 4)
        with pytest.raises(UsageError):
            g.set_block(2, 0, DiffOp.partial(2, Q(0), Q(3, 2)))

    def test_composition_routes_through_blocks(self):
        g = GradedOp(SUPER, Q(1, 2), 2, )
        a = SuperDiffOp.multiplication(SP_ONE, Q(0), Q(1, 2))
        g.set_block(1, 0, a)
        h = GradedOp(SUPER, Q(1, 2), 2)
        h.set_block(2, 1, SuperDiffOp.multiplication(SP_ONE, Q(-1, 2), Q(0)))
        out = g.compose(h)
        assert set(out.blocks) == {(2, 0)}

    def test_undeformed_action_is_homomorphism(self):
        delta, kmax = Q(3, 2), 3
        basis = sl2_basis()
        for x in basis:
            for y in basis:
                lhs = undeformed_action(x, CLASSICAL, delta, kmax).bracket(
                    undeformed_action(y, CLASSICAL, delta, kmax), 1
                )
                rhs = undeformed_action(vf_bracket(x, y), CLASSICAL, delta, kmax)
                assert lhs == rhs

    def test_undeformed_super_action_is_homomorphism(self):
        delta, kmax = Q(1, 2), 2
        basis = osp_basis()
        for x in basis:
            for y in basis:
                sign = -1 if (x.parity and y.parity) else 1
                lhs = undeformed_action(x, SUPER, delta, kmax).bracket(
                    undeformed_action(y, SUPER, delta, kmax), sign
                )
                bracket = contact_bracket(x, y)
                rhs = undeformed_action(bracket, SUPER, delta, kmax)
                assert lhs == rhs
