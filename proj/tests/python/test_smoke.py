"""Smoke tests for the python bindings: a thin pass over each exposed
operation, not a re-run of the C++ suites."""

import math

import pytest

import nsbc


def test_field_arithmetic():
    f = nsbc.Field.parse("GF(9)")
    assert f.q == 9 and f.p == 3 and f.m == 2
    assert f.add(1, 2) == 0  # constants live in the prime subfield
    g3 = nsbc.Field.make(3, 1)
    assert g3.mul(2, 2) == 1
    assert g3.inv(2) == 2
    with pytest.raises(ValueError):
        nsbc.Field.parse("GF(6)")


def test_pattern_and_minrank():
    fano = nsbc.Pattern.fano()
    assert nsbc.triangle_number(fano) == 3
    assert nsbc.minrank(fano, "GF(3)") == 4
    assert nsbc.minrank(fano, "GF(4)") == 3
    bounds = nsbc.ns_sum_bounds(fano, "GF(3)")
    assert bounds["tri"] == 3 and bounds["upper_rank"] == 4
    assert not bounds["tight"]


def test_tree_and_schedule():
    rows = ["*0*00", "*0*00", "***00", "00*00", "00*00", "00**0", "00***"]
    info = nsbc.tree_info(nsbc.Pattern(rows))
    assert info["is_tree"]
    assert info["leaves"] == [2, 5]
    assert info["sum_dof_classical"] == 2.0
    assert info["sum_dof_ns"] == 5.0

    intervals = nsbc.tdma_intervals(
        [0, 1, 2, 3], [1, 2, 3, 4], [0.25, 0.25, 0.25, 0.25]
    )
    assert intervals[1] == (0.0, 0.25)
    assert intervals[4] == (0.75, 1.0)

    assert not nsbc.tree_info(nsbc.Pattern(["**", "**"]))["is_tree"]


def test_verify_box():
    assert nsbc.verify_box("otp", "GF(3)", 2)["non_signaling"]
    assert nsbc.verify_box("triangular", "GF(3)", 3)["non_signaling"]
    leak = nsbc.verify_box("leak", "GF(3)")
    assert not leak["non_signaling"]
    assert leak["witness_subset"] == [2]


def test_simulate_zero_error():
    rows = ["*000", "**00", "***0", "****"]
    rec = nsbc.simulate("ns-successive", rows, "GF(5)", trials=500, seed=1)
    assert rec["error_counts"] == [0, 0, 0, 0]
    assert all(abs(r - math.log2(5)) < 1e-12 for r in rec["rate_bits"])
    again = nsbc.simulate("ns-successive", rows, "GF(5)", trials=500, seed=1)
    assert again["record_hash"] == rec["record_hash"]


def test_certificates():
    cert = nsbc.toy1_certificate()
    assert abs(cert["r2_bits"] - 0.5 * math.log2(3)) < 1e-9
    assert abs(cert["sum_bits"] - 1.5 * math.log2(3)) < 1e-9
    assert abs(nsbc.fading_dirt_baseline_bits("GF(5)") - math.log2(5) / 5) < 1e-9
