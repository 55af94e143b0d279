import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from roughcalc.sphere import (
    KernelError,
    SphereKernel,
    circle_quadrature,
    kernel_from_function,
    make_rough_kernel,
    project_zero_mean,
    sphere_lp_norm,
    sphere_quadrature,
    sphere_weak_norm,
)


def _theta(k):
    return np.arctan2(k.nodes[:, 1], k.nodes[:, 0])


def test_quadrature_weights_sum():
    _, w, _ = circle_quadrature(1000)
    assert w.sum() == pytest.approx(2 * math.pi, abs=1e-10)
    _, w3 = sphere_quadrature(20, 40)
    assert w3.sum() == pytest.approx(4 * math.pi, abs=1e-10)


def test_bad_weights_rejected():
    nodes, w, _ = circle_quadrature(16)
    with pytest.raises(KernelError):
        SphereKernel(2, nodes, w * 1.01, np.ones(16))


def test_project_constant_gives_zero():
    k = kernel_from_function(2, lambda x: np.full(len(x), 3.7))
    z = project_zero_mean(k)
    assert np.max(np.abs(z.values)) < 1e-14


def test_project_cos_unchanged():
    k = kernel_from_function(2, lambda x: x[:, 0])
    z = project_zero_mean(k)
    np.testing.assert_allclose(z.values, k.values, atol=1e-14)


def test_project_cos_squared():
    k = kernel_from_function(2, lambda x: x[:, 0] ** 2)
    z = project_zero_mean(k)
    np.testing.assert_allclose(z.values, np.cos(_theta(k)) ** 2 - 0.5, atol=1e-14)


@given(st.lists(st.floats(-100, 100), min_size=8, max_size=64))
def test_projection_mean_invariant(vals):
    nodes, w, _ = circle_quadrature(len(vals))
    k = project_zero_mean(SphereKernel(2, nodes, w, np.array(vals)))
    scale = max(1.0, max(abs(v) for v in vals))
    assert abs(k.mean()) <= 1e-12 * scale


def test_project_sphere_s2():
    k = kernel_from_function(3, lambda x: x[:, 2] ** 2 + 1.0)
    z = project_zero_mean(k)
    assert abs(z.mean()) < 1e-14
    # mean of z^2 over S^2 is 1/3
    np.testing.assert_allclose(z.values, k.values - 4.0 / 3.0, atol=1e-12)


def test_lp_norm_closed_forms():
    one = kernel_from_function(2, lambda x: np.ones(len(x)))
    assert sphere_lp_norm(one, 2) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-13)
    cos = make_rough_kernel("harmonic", k=1)
    assert sphere_lp_norm(cos, 2) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    assert sphere_lp_norm(make_rough_kernel("zero"), 1.5) == 0.0
    with pytest.raises(KernelError):
        sphere_lp_norm(cos, 0.5)


def test_power_kernel_lp_refinement():
    a = [sphere_lp_norm(make_rough_kernel("power", resolution=M, a=0.4, rho=1.5), 1.5) for M in (2048, 4096)]
    assert a[1] == pytest.approx(a[0], rel=0.02)


def test_power_kernel_l2_divergence():
    vals = [sphere_lp_norm(make_rough_kernel("power", resolution=M, a=0.6, rho=1.5), 2) for M in (1024, 2048, 4096)]
    assert vals[1] / vals[0] >= 1.10
    # the L^1.5 norm settles while the L^2 norm keeps growing
    conv = [sphere_lp_norm(make_rough_kernel("power", resolution=M, a=0.6, rho=1.5), 1.5) for M in (2048, 4096, 8192)]
    steps = np.diff(conv) / np.array(conv[:-1])
    assert steps[1] < steps[0] < 0.06


def test_power_kernel_rejects_non_integrable():
    with pytest.raises(KernelError):
        make_rough_kernel("power", a=0.7, rho=1.5)


def test_weak_norm_examples():
    one = kernel_from_function(2, lambda x: np.ones(len(x)))
    assert sphere_weak_norm(one, 2) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-13)
    two = kernel_from_function(2, lambda x: np.where(x[:, 1] >= 0, 2.0, 0.0), resolution=4096)
    # nodes with y >= 0: half the circle plus one boundary node
    meas = np.sum(two.weights[two.values > 0])
    expected = max(2 * math.sqrt(meas), 0.0)
    assert sphere_weak_norm(two, 2) == pytest.approx(expected, rel=1e-13)
    assert sphere_weak_norm(two, 2) == pytest.approx(2 * math.sqrt(math.pi), rel=1e-3)


@given(st.floats(-50, 50).filter(lambda c: abs(c) > 1e-6))
def test_weak_norm_homogeneous(c):
    k = make_rough_kernel("sign", resolution=256, arcs=4)
    k2 = make_rough_kernel("harmonic", resolution=256, k=2)
    for base in (k, k2):
        assert sphere_weak_norm(base.scaled(c), 1.7) == pytest.approx(abs(c) * sphere_weak_norm(base, 1.7), rel=1e-12)


def test_harmonic_and_sign_kernels():
    k = make_rough_kernel("harmonic", k=1)
    np.testing.assert_allclose(k.values, np.cos(_theta(k)), atol=1e-14)
    s = make_rough_kernel("sign", arcs=2)
    assert abs(s.mean()) < 1e-14
    assert set(np.unique(s.values)) == {-1.0, 1.0}
    for rho in (1.2, 1.5, 2.0):
        assert sphere_lp_norm(s, rho) == pytest.approx((2 * math.pi) ** (1 / rho), rel=1e-13)


def test_unknown_kernel_kind():
    with pytest.raises(KernelError):
        make_rough_kernel("wavelet")


def test_evaluator_linear_between_nodes():
    k = make_rough_kernel("harmonic", resolution=512, k=3)
    th = np.linspace(0, 2 * np.pi, 97)
    xi = np.stack([np.cos(th), np.sin(th)], -1)
    np.testing.assert_allclose(k(xi), np.cos(3 * th), atol=(2 * np.pi / 512) ** 2 * 9)


def test_evaluator_s2():
    k = kernel_from_function(3, lambda x: x[:, 0] + 2 * x[:, 2])
    rng = np.random.default_rng(3)
    v = rng.normal(size=(50, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    # stay away from the polar caps beyond the outermost latitude ring
    v = v[np.abs(v[:, 2]) < 0.95]
    np.testing.assert_allclose(k(v), v[:, 0] + 2 * v[:, 2], atol=5e-3)


def test_embedding_constant_across_corpus_kernels():
    # ||Omega||_rho <= C ||Omega||_{L^{n,inf}} with one C; check C is resolution independent
    kinds = [dict(kind="harmonic", k=1), dict(kind="sign", arcs=6), dict(kind="harmonic", k=3)]
    for rho in (1.2, 1.7):
        Cs = []
        for M in (2048, 4096):
            Cs.append(max(sphere_lp_norm(make_rough_kernel(resolution=M, **p), rho)
                          / sphere_weak_norm(make_rough_kernel(resolution=M, **p), 2) for p in kinds))
        assert Cs[1] == pytest.approx(Cs[0], rel=0.05)


@given(st.floats(1.0, 3.0), st.floats(1.0, 3.0))
def test_power_mean_monotone(r1, r2):
    lo, hi = sorted((r1, r2))
    k = make_rough_kernel("power", resolution=512, a=0.3, rho=1.0)
    area = 2 * math.pi
    assert sphere_lp_norm(k, lo) / area ** (1 / lo) <= sphere_lp_norm(k, hi) / area ** (1 / hi) * (1 + 1e-10)
