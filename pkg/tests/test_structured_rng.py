import math

import pytest
from hypothesis import given, strategies as st

from edgemp.rng import SeededStream
from edgemp.structured import Multiset, encode, from_json, size_bits, to_json

values = st.recursive(
    st.integers(-1000, 1000) | st.text(max_size=4) | st.binary(max_size=3),
    lambda inner: st.tuples(inner, inner) | st.lists(inner, max_size=4).map(Multiset),
    max_leaves=12,
)


@given(st.lists(values, max_size=6), st.randoms())
def test_multiset_is_order_free(items, rnd):
    shuffled = list(items)
    rnd.shuffle(shuffled)
    a, b = Multiset(items), Multiset(shuffled)
    assert a == b and hash(a) == hash(b) and encode(a) == encode(b)


@given(values)
def test_json_roundtrip(v):
    assert from_json(to_json(v)) == v


def test_multiplicity_matters():
    assert Multiset([1, 1, 2]) != Multiset([1, 2])
    assert Multiset([1, 1, 2]).count(1) == 2


def test_size_bits_counts_encoding():
    assert size_bits(0) == 8 * len(encode(0))


def test_stream_determinism_and_children():
    a, b = SeededStream(5), SeededStream(5)
    assert [a.raw() for _ in range(5)] == [b.raw() for _ in range(5)]
    assert SeededStream(5).child(1).raw() == SeededStream(5, 1).raw()
    assert SeededStream(5).child(1).raw() != SeededStream(5).child(2).raw()
    with pytest.raises(ValueError):
        SeededStream(-1)


def test_randbelow_range_and_rough_uniformity():
    s = SeededStream(0)
    counts = [0] * 5
    for _ in range(5000):
        counts[s.randbelow(5)] += 1
    assert all(800 < c < 1200 for c in counts)


def test_normals_moments():
    z = SeededStream(1).normals(20000)
    mean = sum(z) / len(z)
    var = sum((x - mean) ** 2 for x in z) / len(z)
    assert abs(mean) < 0.03 and abs(var - 1) < 0.05
    assert all(math.isfinite(x) for x in z)
