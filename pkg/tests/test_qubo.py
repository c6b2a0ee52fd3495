import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hotqubo.encode import Encoding, LengthMismatch, baseline_encoding, bounded_encoding, decode, decode_many
from hotqubo.hotstart import compute_box
from hotqubo.model import QuadraticModel, evaluate, evaluate_many
from hotqubo.numerics import DimensionMismatch
from hotqubo.qubo import (
    ParseError,
    QuboInstance,
    VersionMismatch,
    build_qubo,
    dumps,
    energy,
    energy_many,
    export,
    import_qubo,
)

from oracles import all_bit_vectors, exhaustive_argmax, random_pd_model


def test_single_bit_hand_instance():
    # f(x) = x - x^2: f(0) = f(1) = 0
    qi = build_qubo(QuadraticModel([1.0], [[2.0]]), Encoding([0], ((1,),)))
    np.testing.assert_array_equal(qi.q, [[0.0]])
    assert qi.offset == 0.0


def test_zero_bit_instance():
    m = QuadraticModel([1.0, 2.0], np.eye(2), 0.5)
    qi = build_qubo(m, Encoding([3, -1], ((), ())))
    assert qi.q.shape == (0, 0)
    assert qi.offset == -evaluate(m, [3, -1])
    assert energy(qi, np.zeros(0)) == qi.offset


def test_two_asset_three_bit_table():
    m = QuadraticModel([3.0, -1.0], [[2.0, 0.5], [0.5, 1.0]], 0.25)
    e = Encoding([1, -2], ((1, 1), (1,)))
    qi = build_qubo(m, e)
    for b in all_bit_vectors(3):
        x = decode(e, b)
        assert energy(qi, b) == pytest.approx(-evaluate(m, x), rel=1e-12, abs=1e-12)


def test_energy_examples():
    m = QuadraticModel([3.0, -1.0], [[2.0, 0.5], [0.5, 1.0]], 0.25)
    qi = build_qubo(m, Encoding([0, 0], ((1, 2), (1,))))
    assert energy(qi, [0, 0, 0]) == qi.offset
    for j in range(3):
        b = np.zeros(3)
        b[j] = 1
        assert energy(qi, b) == qi.q[j, j] + qi.offset
    with pytest.raises(LengthMismatch):
        energy(qi, [0, 1])
    with pytest.raises(DimensionMismatch):
        build_qubo(m, Encoding([0], ((1,),)))


def test_upper_triangular_full_coefficient():
    m = QuadraticModel([0.0, 0.0], [[0.0, 1.0], [1.0, 0.0]] + 3 * np.eye(2))
    qi = build_qubo(m, Encoding([0, 0], ((1,), (1,))))
    assert qi.q[1, 0] == 0.0
    # -f contains + 0.5 * 2 * 1 * x0 x1 = x0 x1
    assert qi.q[0, 1] == pytest.approx(1.0)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
def test_energy_matches_negated_objective(n, seed):
    rng = np.random.default_rng(seed)
    m = random_pd_model(rng, n, constant=float(rng.normal()))
    box = compute_box(m)
    e = bounded_encoding(box)
    if e.total_bits > 14:
        return
    qi = build_qubo(m, e)
    bits = all_bit_vectors(e.total_bits)
    expected = -evaluate_many(m, decode_many(e, bits))
    np.testing.assert_allclose(energy_many(qi, bits), expected, rtol=1e-9, atol=1e-9 * (1 + np.abs(expected).max()))


@settings(max_examples=25, deadline=None)
@given(n=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
def test_qubo_argmin_equals_box_argmax(n, seed):
    rng = np.random.default_rng(seed)
    m = random_pd_model(rng, n)
    box = compute_box(m)
    e = bounded_encoding(box)
    if box.integral_shortcut or e.total_bits > 14:
        return
    qi = build_qubo(m, e)
    energies = energy_many(qi, all_bit_vectors(e.total_bits))
    _, best, _, _ = exhaustive_argmax(m, e.offsets, e.upper)
    assert -energies.min() == pytest.approx(best, rel=1e-9, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(n=st.integers(1, 4), seed=st.integers(0, 2**32 - 1), shift=st.floats(-1e3, 1e3))
def test_constant_shift_changes_only_offset(n, seed, shift):
    rng = np.random.default_rng(seed)
    m = random_pd_model(rng, n)
    e = baseline_encoding(n, 3)
    a = build_qubo(m, e)
    b = build_qubo(QuadraticModel(m.linear, m.quadratic, m.constant + shift), e)
    np.testing.assert_array_equal(a.q, b.q)
    assert b.offset - a.offset == pytest.approx(-shift, abs=1e-9 * (1 + abs(a.offset)))


def one_bit():
    return QuboInstance(np.array([[-1.5]]), 0.25, Encoding([7], ((1,),), ("ABC",)))


def test_export_zero_bit():
    qi = QuboInstance(np.zeros((0, 0)), -2.0, Encoding([3], ((),), ("X",)))
    assert dumps(qi) == "HOTQUBO v1\nbits 0 offset -2\nvar X offset 3 weights \n"
    back = import_qubo(io.StringIO(dumps(qi)))
    assert back.total_bits == 0 and back.offset == -2.0
    assert back.encoding.same_as(qi.encoding)


def test_export_one_bit_golden():
    assert dumps(one_bit()) == "HOTQUBO v1\nbits 1 offset 0.25\nvar ABC offset 7 weights 1\n0 0 -1.5\n"


def test_export_to_path(tmp_path):
    export(one_bit(), tmp_path / "q.txt")
    assert (tmp_path / "q.txt").read_text() == dumps(one_bit())
    assert dumps(import_qubo(tmp_path / "q.txt")) == dumps(one_bit())


def test_export_seventeen_digits():
    qi = QuboInstance(np.array([[0.1]]), 1 / 3, Encoding([0], ((1,),)))
    text = dumps(qi)
    assert "offset 0.33333333333333331\n" in text
    assert text.endswith("0 0 0.10000000000000001\n")


def test_round_trip_random():
    rng = np.random.default_rng(5)
    m = random_pd_model(rng, 3, constant=1.7)
    qi = build_qubo(m, baseline_encoding(3, 4, ("A", "B", "C")))
    text = dumps(qi)
    back = import_qubo(io.StringIO(text))
    assert dumps(back) == text
    np.testing.assert_array_equal(back.q, qi.q)
    assert back.offset == qi.offset
    assert back.encoding.same_as(qi.encoding)
    for b in rng.integers(0, 2, size=(50, qi.total_bits)):
        assert abs(energy(back, b) - energy(qi, b)) <= 1e-12 * (1 + abs(energy(qi, b)))


@pytest.mark.parametrize(
    "text",
    [
        "",
        "HOTQUBO v1\n",
        "HOTQUBO v1\nbits 2 offset 0\nvar A offset 0 weights 1\n",
        "HOTQUBO v1\nbits 1 offset 0\nvar A offset 0 weights 1\n0 0\n",
        "HOTQUBO v1\nbits 1 offset 0\nvar A offset 0 weights 1\n0 1 2.0\n",
        "HOTQUBO v1\nbits 2 offset 0\nvar A offset 0 weights 1,1\n0 1 2.0\n0 0 1.0\n",
        "NOTQUBO v1\nbits 0 offset 0\n",
    ],
)
def test_import_parse_errors(text):
    with pytest.raises(ParseError):
        import_qubo(io.StringIO(text))


def test_import_reports_line_number():
    with pytest.raises(ParseError, match="line 4"):
        import_qubo(io.StringIO("HOTQUBO v1\nbits 1 offset 0\nvar A offset 0 weights 1\n0 0 x\n"))


def test_import_version_mismatch():
    with pytest.raises(VersionMismatch):
        import_qubo(io.StringIO("HOTQUBO v2\nbits 0 offset 0\n"))
