from itertools import product

import numpy as np
import pytest

from infosel.instance import bits_of, random_instance
from infosel.objectives import (MAXPEN, TOTALPEN, Objective, equiv_set, f_value, gamma_obj_value,
                                lambda_value, rho_value)

import oracles
from conftest import discriminating, uninformative

ATOL = 1e-12


def test_empty_set_is_everything(worked):
    for p in range(3):
        assert equiv_set(worked, 0, p) == 0b111


def test_discriminating_sources_isolate():
    inst = discriminating(5, 3)
    for I in range(1, 8):
        for p in range(5):
            assert equiv_set(inst, I, p) == 1 << p


def test_worked_intersection(worked):
    # {0,1} & {0,2}
    assert equiv_set(worked, 0b11, 0) == 0b001
    assert oracles.equiv(worked, {0, 1}, 0) == {0}


def test_out_of_range(worked):
    with pytest.raises(IndexError):
        equiv_set(worked, 0, 3)
    with pytest.raises(IndexError):
        equiv_set(worked, 0b100, 0)


def test_f_value(worked):
    # I = {} -> 1 - max row
    assert f_value(worked, 0, 0) == pytest.approx(0.3, abs=ATOL)
    # source a leaves {0,1} for hypothesis 0: max penalty 0.3
    assert f_value(worked, 0b01, 0) == pytest.approx(0.7, abs=ATOL)
    assert f_value(worked, 0b11, 0) == 1.0


def test_rho_value(worked):
    assert rho_value(worked, 0, 0) == pytest.approx(1.0, abs=ATOL)
    assert rho_value(worked, 0b01, 0) == pytest.approx(0.3, abs=ATOL)
    assert rho_value(worked, 0b11, 0) == 0.0


def test_lambda_worked(worked):
    # f-values for {a}: 0.7, 0.5, 1.0
    assert lambda_value(worked, 0b01) == pytest.approx(2.2, abs=ATOL)
    assert lambda_value(worked, 0b01) == pytest.approx(oracles.lam(worked, {0}), abs=ATOL)
    assert lambda_value(worked, 0) == pytest.approx(0.3 + 0.5 + 0.2, abs=ATOL)


def test_gamma_worked(worked):
    # g-values for {a}: 0.7, 0.5, 1.0
    assert gamma_obj_value(worked, 0b01) == pytest.approx(2.2, abs=ATOL)
    assert gamma_obj_value(worked, 0) == pytest.approx(0.0, abs=ATOL)


def test_discriminating_totals():
    inst = discriminating(4, 3)
    assert lambda_value(inst, 0b101) == 4.0
    assert gamma_obj_value(inst, 0b101) == 4.0


def test_uninformative_totals():
    inst = uninformative(4, 3)
    assert lambda_value(inst, 0b111) == pytest.approx(lambda_value(inst, 0))
    assert gamma_obj_value(inst, 0b111) == pytest.approx(0.0, abs=ATOL)


@pytest.mark.parametrize("seed", range(6))
def test_matches_oracle_everywhere(seed):
    inst = random_instance(7, 5, seed)
    for S in range(1 << inst.n):
        src = set(bits_of(S))
        assert lambda_value(inst, S) == pytest.approx(oracles.lam(inst, src), abs=ATOL)
        assert gamma_obj_value(inst, S) == pytest.approx(oracles.gam(inst, src), abs=ATOL)


@pytest.mark.parametrize("kind", [MAXPEN, TOTALPEN])
def test_batch_identical_to_scalar(kind):
    inst = random_instance(9, 7, 4)
    obj = Objective(inst, kind)
    uncached = Objective(inst, kind, cache=False)
    table = obj.table()
    for S in range(1 << inst.n):
        assert table[S] == obj(S) == uncached(S)
    for p in range(inst.m):
        per = Objective(inst, kind, hypothesis=p)
        assert np.array_equal(per.table(), [per(S) for S in range(1 << inst.n)])


@pytest.mark.parametrize("seed", range(4))
def test_monotone_and_intersection(seed):
    inst = random_instance(6, 6, 100 + seed)
    lam = Objective(inst, MAXPEN).table()
    gam = Objective(inst, TOTALPEN).table()
    size = 1 << inst.n
    for S in range(size):
        for j in range(inst.n):
            T = S | (1 << j)
            assert lam[S] <= lam[T] + ATOL
            assert gam[S] <= gam[T] + ATOL
    for I, J in product(range(0, size, 3), range(0, size, 5)):
        for p in range(inst.m):
            assert equiv_set(inst, I | J, p) == equiv_set(inst, I, p) & equiv_set(inst, J, p)


@pytest.mark.parametrize("seed", range(4))
def test_gamma_submodular(seed):
    inst = random_instance(6, 6, 200 + seed)
    g = Objective(inst, TOTALPEN).table()
    size = 1 << inst.n
    for I2 in range(size):
        sub = I2
        while True:
            for j in range(inst.n):
                if not I2 >> j & 1:
                    assert g[sub | 1 << j] - g[sub] >= g[I2 | 1 << j] - g[I2] - ATOL
            if sub == 0:
                break
            sub = (sub - 1) & I2


def test_per_hypothesis_ranges():
    inst = random_instance(8, 6, 9)
    for S in range(0, 1 << inst.n, 7):
        for p in range(inst.m):
            assert 0 <= f_value(inst, S, p) <= 1
            assert -ATOL <= 1 - rho_value(inst, S, p) <= 1
        assert 0 <= lambda_value(inst, S) <= inst.m
