import math

import numpy as np
import pytest

import sparsekit as sk


def chain(values, w):
    return sk.DescendingChain(np.asarray(values, dtype=float), w)


def test_half_tail_examples():
    lhs, rhs = sk.half_tail_bound(chain([1, 1, 1, 1], 2))
    assert lhs == pytest.approx(math.sqrt(2), abs=1e-15)
    assert rhs == pytest.approx(math.sqrt(2), abs=1e-15)
    assert sk.is_tight(lhs, rhs)

    lhs, rhs = sk.half_tail_bound(chain([4, 3, 2, 1], 2))
    assert lhs == pytest.approx(math.sqrt(5), abs=1e-12)
    assert rhs == pytest.approx(10 / (2 * math.sqrt(2)), abs=1e-12)

    lhs, rhs = sk.half_tail_bound(chain([1, 0, 0, 0], 2))
    assert lhs == 0.0
    assert rhs == pytest.approx(1 / (2 * math.sqrt(2)), abs=1e-15)


def test_third_tail_examples():
    lhs, rhs = sk.third_tail_bound(chain([1, 1, 1], 1))
    assert lhs == pytest.approx(math.sqrt(2), abs=1e-15)
    assert rhs == pytest.approx(math.sqrt(2), abs=1e-15)
    assert sk.is_tight(lhs, rhs)

    lhs, rhs = sk.third_tail_bound(chain([3, 2, 1], 1))
    assert lhs == pytest.approx(math.sqrt(5), abs=1e-12)
    assert rhs == pytest.approx(8 / (2 * math.sqrt(2)), abs=1e-12)

    for w in (1, 2, 5):
        vals = [7.0] + [0.0] * (3 * w - 1)
        lhs, rhs = sk.third_tail_bound(chain(vals, w))
        assert lhs == 0.0
        assert rhs == pytest.approx(7.0 / (2 * math.sqrt(2 * w)), abs=1e-15)


def test_chain_validation():
    with pytest.raises(ValueError):
        chain([1, 2, 3, 4], 2)  # not sorted descending
    with pytest.raises(ValueError):
        chain([3, 2, -1, 0], 2)  # negative entry
    with pytest.raises(ValueError):
        chain([3, 2, 1], 2)  # length matches neither 2w nor 3w
    with pytest.raises(ValueError):
        sk.half_tail_bound(chain([3, 2, 1], 1))  # 3w chain fed to the 2w bound
    with pytest.raises(ValueError):
        sk.third_tail_bound(chain([3, 2, 1, 1], 2))


def _random_sorted(rng, length):
    kind = rng.integers(0, 4)
    if kind == 0:
        v = rng.uniform(0, 10, length)
    elif kind == 1:
        v = np.abs(rng.standard_normal(length))
    elif kind == 2:  # ties
        v = rng.integers(0, 4, length).astype(float)
    else:  # zeros in the tail
        v = rng.uniform(0, 5, length)
        v[rng.uniform(size=length) < 0.4] = 0.0
    return sk.sort_descending(v)


def test_inequalities_hold_on_random_chains():
    rng = np.random.default_rng(123)
    for w in range(1, 17):
        for _ in range(300):
            c2 = chain(_random_sorted(rng, 2 * w), w)
            lhs, rhs = sk.half_tail_bound(c2)
            assert lhs <= rhs + 1e-12
            c3 = chain(_random_sorted(rng, 3 * w), w)
            lhs, rhs = sk.third_tail_bound(c3)
            assert lhs <= rhs + 1e-12


def test_scale_equivariance_exact_for_binary_scales():
    rng = np.random.default_rng(7)
    base2 = _random_sorted(rng, 8)
    base3 = _random_sorted(rng, 12)
    for c in (2.0, 0.25, 1024.0):
        l0, r0 = sk.half_tail_bound(chain(base2, 4))
        l1, r1 = sk.half_tail_bound(chain(c * base2, 4))
        assert l1 == c * l0 and r1 == c * r0
        l0, r0 = sk.third_tail_bound(chain(base3, 4))
        l1, r1 = sk.third_tail_bound(chain(c * base3, 4))
        assert l1 == c * l0 and r1 == c * r0


def test_third_tail_rhs_nonincreasing_as_mass_moves_late():
    # blocks (x..x | x..x | z..z): shifting d from the middle block to the
    # last block (keeping sortedness) can only lower the weighted rhs
    rng = np.random.default_rng(42)
    for _ in range(100):
        w = int(rng.integers(1, 6))
        x = float(rng.uniform(1, 5))
        z = float(rng.uniform(0, x))
        d = rng.uniform(0, (x - z) / 2)
        a = np.concatenate([np.full(2 * w, x), np.full(w, z)])
        b = a.copy()
        b[2 * w - 1] -= d
        b[2 * w] += d
        _, rhs_a = sk.third_tail_bound(chain(a, w))
        lhs_b, rhs_b = sk.third_tail_bound(chain(b, w))
        assert rhs_b <= rhs_a + 1e-12
        assert lhs_b <= rhs_b + 1e-12
