"""Stream identity, splitting, and reproducibility."""
import numpy as np
import pytest

from planarwalk.rng import STEPS_2D, StreamKey, draw, make_stream


def test_equal_keys_reproduce_identical_sequences():
    a = make_stream(StreamKey(123)).random(1000)
    b = make_stream(StreamKey(123)).random(1000)
    assert np.array_equal(a, b)


def test_distinct_seeds_and_streams_differ():
    base = make_stream(StreamKey(0)).random(64)
    assert not np.array_equal(base, make_stream(StreamKey(1)).random(64))
    assert not np.array_equal(base, make_stream(StreamKey(0, 1)).random(64))


def test_child_is_deterministic_arithmetic():
    k = StreamKey(5)
    assert k.child(3) == StreamKey(5, 3)
    # children of children stay distinct: the index space is radix 2^32
    assert StreamKey(5, 2).child(3) == StreamKey(5, 2 * 0x1_0000_0000 + 3)
    assert k.child(1).child(0) != k.child(0).child(1)


def test_child_streams_are_pairwise_distinct():
    k = StreamKey(7)
    draws = [tuple(make_stream(k.child(i)).random(8)) for i in range(50)]
    assert len(set(draws)) == 50


def test_key_validation():
    with pytest.raises(ValueError):
        StreamKey(-1)
    with pytest.raises(ValueError):
        StreamKey(2**64)
    with pytest.raises(ValueError):
        StreamKey(0, -2)
    StreamKey(2**64 - 1)  # boundary value is fine


def test_steps_table_is_the_four_unit_steps():
    rows = {tuple(r) for r in STEPS_2D.tolist()}
    assert rows == {(1, 0), (-1, 0), (0, 1), (0, -1)}


def test_draw_kinds():
    gen = make_stream(StreamKey(11))
    u = draw(gen, "uniform01", 1000)
    assert ((0 <= u) & (u < 1)).all()
    z = draw(gen, "standard_gaussian", 1000)
    assert abs(z.mean()) < 0.2
    s1 = draw(gen, "walk_step_1d", 1000)
    assert set(np.unique(s1)) == {-1, 1}
    s2 = draw(gen, "walk_step_2d", 1000)
    assert set(map(tuple, np.unique(s2, axis=0).tolist())) <= {
        (1, 0), (-1, 0), (0, 1), (0, -1)}
    with pytest.raises(ValueError):
        draw(gen, "cauchy", 10)
