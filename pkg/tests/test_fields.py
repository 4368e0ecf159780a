import numpy as np
import pytest

from vnslab.fields import (Context, MissingPhiError, analytic_source, bold_lift, commutator_apply, complete_lift,
                           free_transport, killing, modified_field, transport_operator, weight_jet)
from vnslab.identities import identity_points
from vnslab.jets import Jet, analytic_jet, random_gaussian

PTS = identity_points(seed=5, n=300)


def _f_jet(ctx, order=3):
    return analytic_jet(random_gaussian(7, seed=11), ctx.points, order)


def test_killing_fields_annihilate_rho():
    # boosts, rotations and the translation-free scaling act on rho = sqrt(t^2 - r^2) as 0, 0, rho
    ctx = Context(PTS[:, :4])
    rho = (ctx.t(1) * ctx.t(1) - ctx.r(1) * ctx.r(1)).sqrt()
    for label in range(1, 7):
        assert np.max(np.abs(killing(label).apply(rho, ctx).val)) < 1e-12 * np.max(rho.val)
    assert np.allclose(killing(0).apply(rho, ctx).val, rho.val, rtol=1e-12)


@pytest.mark.parametrize("label", range(11))
def test_complete_lifts_commute_with_free_transport(label):
    ctx = Context(PTS)
    comm = commutator_apply(free_transport(), complete_lift(label), _f_jet(ctx), ctx)
    if label == 0:  # [T, S] = T
        want = free_transport().apply(_f_jet(ctx, 1), ctx).val
        assert np.allclose(comm, want, rtol=1e-11, atol=1e-12)
    else:
        assert np.max(np.abs(comm)) < 1e-10


def test_bold_lift_reduces_to_complete_lift_without_phi():
    ctx = Context(PTS)
    f = _f_jet(ctx, 1)
    for label in range(1, 11):
        assert np.allclose(bold_lift(label).apply(f, ctx).val, complete_lift(label).apply(f, ctx).val)


def test_transport_with_phi_zero_is_free_transport():
    ctx = Context(PTS)
    f = _f_jet(ctx, 1)
    phi_ctx = Context(PTS, phi=analytic_source(random_gaussian(4, seed=2), scale=0.0))
    assert np.allclose(transport_operator().apply(f, phi_ctx).val, free_transport().apply(f, ctx).val)


def test_weights_are_transported_freely():
    ctx = Context(PTS)
    for label in range(1, 7):
        z = weight_jet(label, ctx, 1)
        assert np.max(np.abs(free_transport().apply(z, ctx).val)) < 1e-12 * (1 + np.max(np.abs(z.val)))


def test_modified_field_needs_phi_coefficients():
    ctx = Context(PTS)
    with pytest.raises(MissingPhiError):
        modified_field(1).apply(_f_jet(ctx, 1), ctx)


def test_contexts_reject_wrong_dimensions():
    with pytest.raises(ValueError):
        Context(np.zeros((3, 5)))
    ctx = Context(PTS[:, :4])
    with pytest.raises(Exception):
        ctx.v0(1)
    assert isinstance(ctx.zero(1), Jet)
