import itertools

import pytest

from linkage_lab.errors import MalformedDocumentError
from linkage_lab.grid_tiling import (
    GridTilingInstance,
    GridTilingSolution,
    all_cells_full,
    gen_planted_yes_instance,
    gen_random_instance,
    instance_dumps,
    instance_from_json,
    instance_to_json,
    solve_grid_tiling,
    validate_solution,
)


def brute_force_has_solution(instance):
    """Independent acceptance oracle: direct quantifier over all assignments."""
    n, k = instance.n, instance.k
    for a in itertools.product(range(1, n + 1), repeat=k):
        for b in itertools.product(range(1, n + 1), repeat=k):
            if all(
                (a[i], b[j]) in instance.members(i + 1, j + 1)
                for i in range(k)
                for j in range(k)
            ):
                return True
    return False


class TestSolve:
    def test_single_cell_yes(self):
        inst = GridTilingInstance(1, 1, ((frozenset({(1, 1)}),),))
        assert solve_grid_tiling(inst) == GridTilingSolution((1,), (1,))

    def test_empty_cell_no(self):
        inst = GridTilingInstance(2, 1, ((frozenset(),),))
        assert solve_grid_tiling(inst) is None

    def test_all_full_lexicographic_first(self):
        inst = all_cells_full(2, 2)
        assert solve_grid_tiling(inst) == GridTilingSolution((1, 1), (1, 1))

    def test_matches_exhaustive_oracle(self):
        seed = 0
        for n in (1, 2, 3):
            for k in (1, 2):
                for density in (0.0, 0.2, 0.5, 0.8, 1.0):
                    seed += 1
                    inst = gen_random_instance(n, k, density, seed)
                    got = solve_grid_tiling(inst)
                    assert (got is not None) == brute_force_has_solution(inst)
                    if got is not None:
                        assert validate_solution(inst, got)


class TestValidate:
    def test_all_full_accepts_anything(self):
        inst = all_cells_full(2, 2)
        assert validate_solution(inst, GridTilingSolution((2, 1), (1, 2)))

    def test_empty_cell_rejects_everything(self):
        inst = GridTilingInstance(
            2, 1, ((frozenset(),),)
        )
        assert not validate_solution(inst, GridTilingSolution((1,), (1,)))
        assert not validate_solution(inst, GridTilingSolution((2,), (2,)))

    def test_out_of_range_rejected(self):
        inst = all_cells_full(2, 1)
        assert not validate_solution(inst, GridTilingSolution((3,), (1,)))
        assert not validate_solution(inst, GridTilingSolution((1, 1), (1, 1)))

    def test_planted_witness_validates(self):
        for seed in range(10):
            inst, sol = gen_planted_yes_instance(3, 2, 0.3, seed)
            assert validate_solution(inst, sol)
            assert solve_grid_tiling(inst) is not None


class TestGenerators:
    def test_density_one_is_full(self):
        inst = gen_random_instance(2, 2, 1.0, 11)
        assert inst == all_cells_full(2, 2)

    def test_density_zero_unsolvable(self):
        for k in (1, 2):
            inst = gen_random_instance(2, k, 0.0, 5)
            assert all(not inst.members(i + 1, j + 1) for i in range(k) for j in range(k))
            assert solve_grid_tiling(inst) is None

    def test_deterministic_under_seed(self):
        assert gen_random_instance(3, 2, 0.4, 42) == gen_random_instance(3, 2, 0.4, 42)
        assert gen_planted_yes_instance(3, 2, 0.4, 7) == gen_planted_yes_instance(3, 2, 0.4, 7)

    def test_instance_validation(self):
        with pytest.raises(ValueError):
            GridTilingInstance(1, 1, ((frozenset({(2, 1)}),),))
        with pytest.raises(ValueError):
            GridTilingInstance(0, 1, ())


class TestJson:
    def test_round_trip(self):
        inst = gen_random_instance(3, 2, 0.5, 3)
        assert instance_from_json(instance_to_json(inst)) == inst

    def test_dumps_deterministic(self):
        inst = gen_random_instance(2, 2, 0.5, 9)
        assert instance_dumps(inst) == instance_dumps(inst)

    def test_malformed(self):
        with pytest.raises(MalformedDocumentError):
            instance_from_json({"n": 1})
