"""Smoke tests for the python bindings: each main operation runs end-to-end
and agrees with a numpy oracle."""

import numpy as np
import pytest

import copmm

Q = 2147483647


def rand(rng, rows, cols, q=Q):
    return rng.integers(0, q, size=(rows, cols)).astype(np.uint64)


def np_matmul_mod(a, b, q=Q):
    return (a.astype(object) @ b.astype(object) % q).astype(np.uint64)


def test_field_and_matmul():
    assert copmm.is_prime(Q)
    assert not copmm.is_prime(Q - 1)
    a = np.array([[1, 2], [3, 4]], dtype=np.uint64)
    b = np.array([[5, 6], [0, 1]], dtype=np.uint64)
    assert copmm.mat_mul(a, b, 7).tolist() == [[5, 1], [1, 1]]
    with pytest.raises(ValueError):
        copmm.mat_mul(a, b, 10)  # not prime


def test_tensors():
    s = copmm.strassen_tensor()
    assert (s.m, s.p, s.n, s.R) == (2, 2, 2, 7)
    assert copmm.verify_tensor(s, trials=50)["ok"]
    s2 = copmm.kronecker_compose(s, s)
    assert s2.R == 49
    assert copmm.verify_tensor(s2, trials=10)["ok"]
    assert copmm.naive_tensor(2, 2, 2).R == 8


def test_assignments_and_thresholds():
    a = copmm.preset_assignment("v1", 2, 2, 2, 2)
    assert list(a.a) == [0, 1, 6, 7]
    assert a.threshold() == 17
    c1 = copmm.verify_c1(a)
    assert c1["ok"]
    assert list(c1["e_map"]) == [1, 3, 7, 9]
    assert copmm.verify_c2(a, N=10)["ok"]
    assert copmm.recovery_threshold("poly", 2, 2, 2, 2)["K"] == 17
    assert copmm.recovery_threshold("lagrange", 2, 2, 2, 2, R=7)["K"] == 17


def test_psmm_run_matches_numpy():
    rng = np.random.default_rng(42)
    A = rand(rng, 8, 8)
    lib = [rand(rng, 8, 8) for _ in range(3)]
    res = copmm.psmm_run(A, lib, 3, "poly", 2, 2, 2, 1, 14, seed=9)
    assert res["K"] == 14
    np.testing.assert_array_equal(res["decoded"], np_matmul_mod(A, lib[2]))
    assert res["cost"]["upload_cost"] == "7/2"  # N/(mp) = 14/4


def test_psmm_lagrange_run():
    rng = np.random.default_rng(7)
    A = rand(rng, 4, 4)
    lib = [rand(rng, 4, 4) for _ in range(2)]
    res = copmm.psmm_run(A, lib, 1, "lagrange", 2, 2, 2, 1, 15,
                         tensor=copmm.strassen_tensor(), seed=3)
    assert res["K"] == 15
    np.testing.assert_array_equal(res["decoded"], np_matmul_mod(A, lib[0]))


def test_fpmm_run():
    rng = np.random.default_rng(11)
    libA = [rand(rng, 4, 4) for _ in range(2)]
    libB = [rand(rng, 4, 4) for _ in range(2)]
    res = copmm.fpmm_run(libA, libB, 2, 1, "poly", 1, 1, 1, 1, 3, seed=1)
    assert res["K"] == 3
    np.testing.assert_array_equal(res["decoded"], np_matmul_mod(libA[1], libB[0]))
    assert res["cost"]["upload_is_query_only"]


def test_smm_run():
    rng = np.random.default_rng(13)
    A, B = rand(rng, 4, 6), rand(rng, 6, 4)
    res = copmm.smm_run(A, B, "poly", 2, 2, 2, 1, 14, seed=2)
    np.testing.assert_array_equal(res["decoded"], np_matmul_mod(A, B))


def test_below_threshold_error():
    rng = np.random.default_rng(17)
    A = rand(rng, 2, 2, q=101)
    lib = [rand(rng, 2, 2, q=101)]
    with pytest.raises(RuntimeError):
        copmm.psmm_run(A, lib, 1, "poly", 1, 1, 1, 1, 2, q=101)  # N=2 < K=3


def test_audits():
    priv = copmm.privacy_audit("psmm", "poly", 5, 1, 1, 1, 1, 3, 2, colluders=[2])
    assert priv["pass"]
    assert priv["space_size"] == 125
    broken = copmm.privacy_audit("psmm", "poly", 5, 1, 1, 1, 1, 3, 2,
                                 colluders=[2], pinned_noise_index=1)
    assert not broken["pass"]
    sec = copmm.security_audit("poly", 3, 1, 1, 1, 1, 2, V=1, colluders=[2])
    assert sec["pass"]
