import numpy as np
import pytest

from descshot.kernels import _pure, backend_name, native

needs_native = pytest.mark.skipif(native is None, reason="compiled kernels not built")


def random_mask(rng):
    h, w = rng.integers(1, 48, 2)
    return (rng.random((h, w)) < float(rng.uniform(0.2, 0.7))).astype(np.uint8)


def test_a_backend_is_active():
    assert backend_name() in ("native", "pure")


@needs_native
def test_label_components_backends_agree(rng):
    for _ in range(150):
        m = random_mask(rng)
        c_pure, l_pure = _pure.label_components(m)
        c_nat, l_nat = native.label_components(m)
        assert c_pure == c_nat
        assert np.array_equal(l_pure, l_nat)
        assert l_nat.dtype == np.int32


@needs_native
def test_trace_backends_agree_per_component(rng):
    for _ in range(150):
        m = random_mask(rng)
        count, labels = _pure.label_components(m)
        for comp in range(1, count + 1):
            keep = (labels == comp).astype(np.uint8)
            assert _pure.trace_outer_contour(keep) == native.trace_outer_contour(keep)


@pytest.mark.parametrize("impl_name", ["pure", "native"])
def test_known_shapes(impl_name):
    impl = {"pure": _pure, "native": native}[impl_name]
    if impl is None:
        pytest.skip("compiled kernels not built")
    square = np.ones((5, 5), dtype=np.uint8)
    assert impl.trace_outer_contour(square) == (16, 0)
    line = np.ones((1, 4), dtype=np.uint8)
    assert impl.trace_outer_contour(line) == (6, 0)
    single = np.zeros((3, 3), dtype=np.uint8)
    single[1, 1] = 1
    assert impl.trace_outer_contour(single) == (0, 0)
    diag = np.eye(3, dtype=np.uint8)
    assert impl.trace_outer_contour(diag) == (0, 4)
    count, labels = impl.label_components(np.array([[1, 0, 1]], dtype=np.uint8))
    assert count == 2
    assert labels.tolist() == [[1, 0, 2]]


@pytest.mark.parametrize("impl_name", ["pure", "native"])
def test_empty_mask_raises(impl_name):
    impl = {"pure": _pure, "native": native}[impl_name]
    if impl is None:
        pytest.skip("compiled kernels not built")
    with pytest.raises(ValueError):
        impl.trace_outer_contour(np.zeros((4, 4), dtype=np.uint8))
