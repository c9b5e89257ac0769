import os

import pytest

import latcoh

DATA = os.path.join(os.path.dirname(__file__), "..", "data")


def read(name):
    with open(os.path.join(DATA, name)) as f:
        return f.read()


def test_invariants_a2():
    inv = latcoh.invariants(read("a2.graph"))
    assert inv["h_factors"] == ["3"]
    assert inv["ZK"] == ["0", "0"]


def test_sigma237_homology():
    h = latcoh.homology(read("sigma237.graph"))
    assert h["modules"][0]["text"] == "T^-_0 + T_0(1)"
    assert h["eu"] == 1


def test_reduced_grid_matches_golden():
    got = latcoh.wbar_grid(read("latnv1.graph"), bad=[2, 6], rect=[14, 14])
    gold = read("latnv1_wbar.txt")
    for a, b in zip(got.splitlines(), gold.splitlines()):
        for x, y in zip(a.split(), b.split()):
            if y != ".":
                assert x == y


def test_specseq_a2_degeneration():
    r = latcoh.specseq(read("a2.graph"), s=[1, 1], nmax=20)
    assert r["global_degeneration"] == 2


def test_pe_series_window():
    pe = latcoh.pe_series(read("a2.graph"), s=[1, 1], nmax=5, k=1)
    assert pe["vars"] == ["T", "Q", "h"]
    assert pe["terms"]["0,0,0"] == "1"


def test_verify_passes():
    rep = latcoh.verify(read("a2.graph"))
    assert rep["ok"]


def test_errors():
    with pytest.raises(latcoh.GraphError):
        latcoh.invariants("vertex 1 -1\nvertex 2 -1\nedge 1 2\n")
    with pytest.raises(ValueError):
        latcoh.invariants("nonsense")
