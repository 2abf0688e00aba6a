from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import fabs, mp, mpf, pi

from compulse import su2
from compulse.error_models import (
    AxisDependentPi3,
    AxisOverRotation,
    CovariantVector,
    ErrorModel,
    LinearOverRotation,
    ModelConfigError,
    PerChannel,
    PolyOverRotation,
    describe,
    invert_model_consistency,
    parse_model,
)
from compulse.precision import unit_tolerance
from compulse.sequences import FrameTriad, Gate, Pulse, Role

import oracles

X = (1, 0, 0)
Y = (0, 1, 0)
Z = (0, 0, 1)


def make_pulse(axis=X, alpha_pi=Fraction(1, 2), role=Role.TARGET, channel="target", frame=None):
    return Pulse(frame or FrameTriad.identity(), axis, alpha_pi, role, channel)


def q_close(a, b, tol=None):
    tol = tol if tol is not None else unit_tolerance()
    return all(fabs(p - q) <= tol for p, q in zip(a, b))


class TestLinearOverRotation:
    def test_zero_eps_is_ideal(self):
        p = make_pulse()
        assert LinearOverRotation(0).realize(p) == p.ideal_unitary()

    def test_pi_pulse_tenth_overrotation(self):
        p = make_pulse()
        got = LinearOverRotation(mpf("0.1")).realize(p)
        assert q_close(got, su2.from_generator(X, pi / 2 * mpf("1.1")))

    def test_scale_multiplies_coefficient(self):
        p = make_pulse()
        a = LinearOverRotation(1).realize(p, mpf("0.01"))
        b = LinearOverRotation(mpf("0.01")).realize(p, 1)
        assert q_close(a, b, tol=mpf("1e-30"))

    def test_negative_generator_scales_identically(self):
        p = make_pulse(alpha_pi=Fraction(-1, 2), role=Role.TARGET_DAGGER)
        got = LinearOverRotation(mpf("0.1")).realize(p)
        assert q_close(got, su2.from_generator(X, -pi / 2 * mpf("1.1")))

    def test_linear_in_scale_at_leading_order(self):
        # log of the realized error, divided by scale, converges as scale -> 0
        p = make_pulse(axis=Y, alpha_pi=Fraction(1, 3))
        model = LinearOverRotation(1)
        ratios = []
        for s in (mpf("1e-3"), mpf("1e-5")):
            err = su2.error_unitary(p.ideal_unitary(), model.realize(p, s))
            ratios.append(su2.log_pauli(err).norm() / s)
        assert fabs(ratios[0] / ratios[1] - 1) < mpf("0.01")


class TestPolyOverRotation:
    def test_quadratic_angle_dependence(self):
        # eps(theta) = c*theta^2: a pi pulse gains generator offset c*pi^2/2
        c = mpf("0.01")
        model = PolyOverRotation((0, 0, c))
        p = make_pulse()
        got = model.realize(p)
        want = su2.from_generator(X, pi / 2 + c * pi**2 / 2)
        assert q_close(got, want)

    def test_depends_on_unsigned_angle(self):
        c = mpf("0.02")
        model = PolyOverRotation((0, 0, c))
        fwd = make_pulse(alpha_pi=Fraction(1, 3), role=Role.CORRECTION, channel="pi3")
        assert invert_model_consistency(model, fwd)

    def test_constant_term_offsets_all_pulses(self):
        model = PolyOverRotation((mpf("0.05"),))
        p = make_pulse(alpha_pi=Fraction(1, 6))
        got = model.realize(p)
        assert q_close(got, su2.from_generator(X, pi / 6 + mpf("0.025")))


class TestAxisOverRotation:
    def test_named_axis_uses_its_polynomial(self):
        model = AxisOverRotation(base=(0,), per_axis={"y": (0, mpf("0.1"))})
        p = make_pulse(axis=Y)
        got = model.realize(p)
        assert q_close(got, su2.from_generator(Y, pi / 2 * mpf("1.1")))

    def test_unknown_axis_falls_back_to_base(self):
        model = AxisOverRotation(base=(0, mpf("0.2")), per_axis={"y": (0,)})
        diag = su2.unit_vector((1, 1, 0))
        p = make_pulse(axis=diag)
        got = model.realize(p)
        assert q_close(got, su2.from_generator(diag, pi / 2 * mpf("1.2")))

    def test_negative_rotation_matches_negated_axis_name(self):
        # a negative-angle pulse about y is a positive rotation about -y
        model = AxisOverRotation(base=(0,), per_axis={"-y": (0, mpf("0.1"))})
        p = make_pulse(axis=Y, alpha_pi=Fraction(-1, 2), role=Role.TARGET)
        got = model.realize(p)
        assert q_close(got, su2.from_generator(Y, -pi / 2 * mpf("1.1")))

    def test_rejects_unknown_axis_name(self):
        with pytest.raises(ModelConfigError):
            AxisOverRotation(base=(0,), per_axis={"w": (0,)})


class TestCovariantVector:
    def test_constant_error_right_multiplies(self):
        model = CovariantVector.constant((mpf("0.01"), 0, 0))
        p = make_pulse(axis=Z, alpha_pi=Fraction(1, 4))
        got = model.realize(p)
        want = su2.multiply(p.ideal_unitary(), su2.exp_pauli((mpf("0.01"), 0, 0)))
        assert q_close(got, want)

    def test_frame_transport_identity(self):
        # a conjugated pulse carries the conjugated error: realize on the
        # transported frame equals u * realize(base) * u^dagger
        rng_angles = [("0.7", (0, 0, 1)), ("1.1", (0, 1, 0)), ("0.4", (1, 0, 0))]
        model = CovariantVector.constant((mpf("0.01"), mpf("-0.02"), mpf("0.005")))
        for alpha, axis in rng_angles:
            u = su2.from_generator(axis, mpf(alpha))
            base = make_pulse(axis=X, alpha_pi=Fraction(1, 6), role=Role.CORRECTION, channel="pi3")
            moved = Pulse(
                FrameTriad.from_unitary(u), X, Fraction(1, 6), Role.CORRECTION, "pi3"
            )
            got = model.realize(moved)
            want = su2.conjugate_frame(model.realize(base), u)
            assert q_close(got, want)
            m_want = (
                oracles.to_matrix(u)
                @ oracles.to_matrix(model.realize(base))
                @ oracles.to_matrix(u).conj().T
            )
            assert oracles.max_abs_diff(oracles.to_matrix(got), m_want) < 1e-12

    def test_dagger_pulse_gets_daggered_error(self):
        model = CovariantVector.constant((0, mpf("0.03"), 0))
        fwd = make_pulse(axis=Z, alpha_pi=Fraction(1, 2))
        dag = fwd.daggered()
        got = model.realize(dag)
        assert q_close(got, su2.dagger(model.realize(fwd)))

    def test_angle_dependent_polynomial(self):
        # delta_x(theta) = 0.01*theta evaluated at the rotation angle
        model = CovariantVector((0, mpf("0.01")), (0,), (0,))
        p = make_pulse(axis=Z, alpha_pi=Fraction(1, 2))  # rotation angle pi
        got = model.realize(p)
        want = su2.multiply(p.ideal_unitary(), su2.exp_pauli((mpf("0.01") * pi, 0, 0)))
        assert q_close(got, want)

    def test_branch_overflow_raises(self):
        model = CovariantVector.constant((2, 0, 0))
        with pytest.raises(su2.BranchError):
            model.realize(make_pulse())


class TestAxisDependentPi3:
    def test_applies_delta_to_plain_frame(self):
        model = AxisDependentPi3(mpf("0.01"), mpf("0.02"))
        p = make_pulse(axis=Y, alpha_pi=Fraction(1, 6), role=Role.CORRECTION, channel="pi3")
        assert q_close(model.realize(p), su2.from_generator(Y, pi / 6 + mpf("0.01")))

    def test_applies_delta_hat_to_conjugated_frame(self):
        model = AxisDependentPi3(mpf("0.01"), mpf("0.02"))
        u = su2.from_generator(Z, mpf("0.9"))
        p = Pulse(FrameTriad.from_unitary(u), Y, Fraction(1, 6), Role.CORRECTION, "pi3")
        want = su2.from_generator(su2.rotate_vector(u, Y), pi / 6 + mpf("0.02"))
        assert q_close(model.realize(p), want)

    def test_leaves_target_channel_ideal(self):
        model = AxisDependentPi3(mpf("0.01"), mpf("0.02"))
        p = make_pulse()
        assert model.realize(p) == p.ideal_unitary()


class TestPerChannel:
    def test_dispatches_by_channel(self):
        model = PerChannel(
            {"target": LinearOverRotation(mpf("0.1")), "pi3": LinearOverRotation(mpf("0.2"))}
        )
        t = make_pulse()
        c = make_pulse(alpha_pi=Fraction(1, 6), role=Role.CORRECTION, channel="pi3")
        assert q_close(model.realize(t), su2.from_generator(X, pi / 2 * mpf("1.1")))
        assert q_close(model.realize(c), su2.from_generator(X, pi / 6 * mpf("1.2")))

    def test_unlisted_channel_stays_ideal(self):
        model = PerChannel({"pi3": LinearOverRotation(mpf("0.2"))})
        t = make_pulse()
        assert model.realize(t) == t.ideal_unitary()


class TestOverRotationCovariance:
    @given(
        st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(
            lambda v: sum(c * c for c in v) > 0.01
        ),
        st.floats(-3, 3),
    )
    def test_conjugated_pulse_carries_conjugated_overrotation(self, gaxis, galpha):
        # axis-independent over-rotation is automatically covariant: realizing
        # the frame-transported pulse equals conjugating the realized base pulse
        model = LinearOverRotation(mpf("0.05"))
        u = su2.from_generator(su2.unit_vector(gaxis), mpf(galpha))
        base = make_pulse(axis=Y, alpha_pi=Fraction(1, 6), role=Role.CORRECTION, channel="pi3")
        moved = Pulse(FrameTriad.from_unitary(u), Y, Fraction(1, 6), Role.CORRECTION, "pi3")
        got = model.realize(moved)
        want = su2.conjugate_frame(model.realize(base), u)
        assert q_close(got, want, tol=mpf("1e-12"))


class _ForwardOnlyModel(ErrorModel):
    """Deliberately non-systematic: corrupts forward pulses, leaves inverses ideal."""

    def realize(self, pulse, scale=1):
        if pulse.role.is_dagger:
            return pulse.ideal_unitary()
        return LinearOverRotation(mpf("0.1")).realize(pulse, scale)


class TestInvertModelConsistency:
    @pytest.mark.parametrize(
        "model",
        [
            LinearOverRotation(mpf("0.07")),
            PolyOverRotation((0, mpf("0.01"), mpf("0.003"))),
            CovariantVector.constant((mpf("0.01"), mpf("0.02"), mpf("-0.01"))),
            AxisDependentPi3(mpf("0.01"), mpf("0.02")),
        ],
    )
    def test_systematic_families_are_invertible(self, model):
        pulses = [
            make_pulse(),
            make_pulse(axis=Y, alpha_pi=Fraction(1, 6), role=Role.CORRECTION, channel="pi3"),
            Pulse(
                FrameTriad.from_unitary(su2.from_generator(Z, mpf("0.8"))),
                Y,
                Fraction(1, 6),
                Role.CORRECTION,
                "pi3",
            ),
        ]
        for p in pulses:
            assert invert_model_consistency(model, p)

    def test_forward_only_model_is_caught(self):
        assert not invert_model_consistency(_ForwardOnlyModel(), make_pulse())

    @given(st.fractions(min_value=Fraction(1, 12), max_value=Fraction(2, 1)))
    def test_poly_invertible_for_random_angles(self, alpha_pi):
        model = PolyOverRotation((mpf("0.01"), mpf("0.005"), mpf("0.002")))
        p = make_pulse(alpha_pi=alpha_pi)
        assert invert_model_consistency(model, p)


class TestParseModel:
    def test_linear(self):
        model = parse_model("model=linear eps=0.01")
        assert isinstance(model, LinearOverRotation)
        assert model.eps == mpf("0.01")

    def test_poly(self):
        model = parse_model("model=poly coeffs=0,0.01,0.003")
        assert isinstance(model, PolyOverRotation)
        assert model.coeffs == (mpf(0), mpf("0.01"), mpf("0.003"))

    def test_vector_with_semicolons(self):
        model = parse_model("model=vector dx=0.01;dy=0;dz=0.002")
        assert isinstance(model, CovariantVector)
        assert model.dx == (mpf("0.01"),)
        assert model.dz == (mpf("0.002"),)

    def test_vector_polynomials(self):
        model = parse_model("model=vector dx=0,0.01;dy=0;dz=0")
        assert model.dx == (mpf(0), mpf("0.01"))

    def test_axisdep(self):
        model = parse_model("model=axisdep delta=0.01 deltahat=0.02")
        assert isinstance(model, AxisDependentPi3)
        assert (model.delta, model.delta_hat) == (mpf("0.01"), mpf("0.02"))

    @pytest.mark.parametrize(
        "text",
        [
            "eps=0.1",
            "model=linear",
            "model=linear eps=0.1 foo=2",
            "model=poly coeffs=abc",
            "model=nosuch eps=0.1",
            "model=linear eps=0.6",
            "model=axisdep delta=0.4 deltahat=0.6",
            "model=linear eps=0.1 eps=0.2",
        ],
    )
    def test_rejects_malformed_configs(self, text):
        with pytest.raises(ModelConfigError):
            parse_model(text)

    def test_rejects_axisdep_ratio_out_of_bounds(self):
        # the two over-rotations must be the same order of magnitude
        with pytest.raises(ModelConfigError):
            parse_model("model=axisdep delta=0.4 deltahat=0.002")
        parse_model("model=axisdep delta=0.1 deltahat=0.01")  # ratio 0.1 allowed
        parse_model("model=axisdep delta=0 deltahat=0.01")  # zero escapes the check

    def test_describe_round_trips_through_parse(self):
        for text in (
            "model=linear eps=0.01",
            "model=poly coeffs=0,0.01",
            "model=vector dx=0.01;dy=0;dz=0.002",
            "model=axisdep delta=0.01 deltahat=0.02",
        ):
            model = parse_model(text)
            again = parse_model("model=" + describe(model))
            assert again == model
