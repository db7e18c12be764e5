import numpy as np
import pytest

import bandlab as bl
from bandlab import BlowupSpec, build_blowup

# independently evaluated tail values, C (1-x)^(-p) at p = 3/2
TAIL_AT_09 = 31.62277660168379332
TAIL_AT_0999 = 31622.77660168379332
TAIL_D1_AT_09 = 474.3416490252568998


def test_spec_validation():
    with pytest.raises(bl.IllPosedSpec):
        BlowupSpec(m=1, p=0.5).validate()       # p <= m
    with pytest.raises(bl.IllPosedSpec):
        BlowupSpec(m=1, p=1.0).validate()
    with pytest.raises(bl.IllPosedSpec):
        BlowupSpec(m=-1, p=0.5).validate()
    with pytest.raises(bl.IllPosedSpec):
        BlowupSpec(m=0, p=0.5, a=0.5).validate()
    with pytest.raises(bl.IllPosedSpec):
        BlowupSpec(m=0, p=0.5, C=-2.0).validate()
    with pytest.raises(bl.IllPosedSpec):
        BlowupSpec(m=2, p=2.5, msmooth=1).validate()


def test_build_rejects_ill_posed():
    with pytest.raises(bl.IllPosedSpec):
        build_blowup(BlowupSpec(m=1, p=0.5, C=1.0))


def test_quadratic_regions_exact():
    fn = build_blowup(BlowupSpec(m=0, p=0.5, C=1.0))
    assert fn.eval(0.3) == 0.09
    assert fn.eval(1.5) == 2.25
    assert fn.eval(0.0) == 0.0
    assert fn.eval(-0.3) == 0.09


def test_bridge_matches_quadratic_at_half(blowup_std):
    assert blowup_std.eval(0.5) == pytest.approx(0.25, rel=1e-13)
    assert blowup_std.eval_derivative(0.5, 1) == pytest.approx(1.0, rel=1e-10)
    assert blowup_std.eval_derivative(0.25, 1) == 0.5


def test_tail_values(blowup_std):
    assert blowup_std.eval(0.9) == pytest.approx(TAIL_AT_09, rel=1e-14)
    assert blowup_std.eval(0.999) == pytest.approx(TAIL_AT_0999, rel=1e-14)
    assert blowup_std.eval(0.99) < blowup_std.eval(0.999)
    assert blowup_std.eval_derivative(0.9, 1) == pytest.approx(TAIL_D1_AT_09, rel=1e-14)


def test_singular_at_one(blowup_std):
    with pytest.raises(bl.SingularArgument):
        blowup_std.eval(1.0)
    with pytest.raises(bl.SingularArgument):
        blowup_std.eval(-1.0)


def test_order_too_high(blowup_std):
    with pytest.raises(bl.OrderTooHigh):
        blowup_std.eval_derivative(0.3, 2)


@pytest.mark.parametrize("m,p", [(0, 0.5), (1, 1.5), (2, 2.5)])
def test_domination_random_sampling(m, p):
    fn = build_blowup(BlowupSpec(m=m, p=p, C=1.0))
    xs = np.random.default_rng(17).uniform(0.5, 1.0, size=10**5)
    xs = xs[xs < 1.0]
    assert np.min(fn.eval(xs) - xs**2) >= 0.0


@pytest.mark.parametrize("m,p", [(0, 0.5), (1, 1.5), (2, 2.5), (2, 4.0)])
def test_junction_smoothness(m, p):
    # finite differences reach 1e-4 relative agreement up to m = 2; beyond
    # that the bridge coefficients make the check exceed double precision
    fn = build_blowup(BlowupSpec(m=m, p=p, C=1.0))
    assert fn.validation["junction_mismatch"] <= 1e-4
    assert fn.validation["domination_margin"] >= -1e-12
    assert fn.validation["weighted_tail_diverges"]


@pytest.mark.parametrize("m,p", [(0, 0.5), (1, 1.5), (2, 2.5)])
def test_weighted_blowup_increases(m, p):
    fn = build_blowup(BlowupSpec(m=m, p=p, C=1.0))
    xs = 1.0 - 2.0 ** -np.arange(5, 21)
    weighted = (1.0 - xs) ** m * fn.eval(xs)
    assert np.all(np.diff(weighted) > 0)


def test_auto_tail_constant():
    fn = build_blowup(BlowupSpec(m=1, p=1.5))
    assert fn.spec.C == 1.0
    assert np.log2(fn.spec.C) == int(np.log2(fn.spec.C))


def test_domination_violated_for_small_c():
    with pytest.raises(bl.DominationViolated):
        build_blowup(BlowupSpec(m=0, p=0.5, C=0.05))


def test_msmooth_bridge_keeps_low_order():
    # junctions can be made C^6 while the certified order stays m=0
    fn = build_blowup(BlowupSpec(m=0, p=0.5, C=1.0, msmooth=6))
    assert fn.validation["domination_margin"] >= -1e-12
    with pytest.raises(bl.OrderTooHigh):
        fn.eval_derivative(0.3, 1)


def test_spec_serialization():
    assert BlowupSpec(m=1, p=1.5, C=1.0).to_dict() == {
        "m": 1, "p": 1.5, "C": 1.0, "a": 0.75, "msmooth": 1}
    assert BlowupSpec(m=0, p=0.5, C=2.0, msmooth=6).to_dict()["msmooth"] == 6
