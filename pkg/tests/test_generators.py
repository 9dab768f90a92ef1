import random

import pytest

from cnnbench.engine import OnlineServer, run
from cnnbench.generators import (
    GeneratedPair,
    GeneratorError,
    HALF_STEP,
    ProtocolError,
    adversary_continuous,
    fig2_scenario,
    random_orthogonal,
    tight1,
    tight2,
)
from cnnbench.geometry import pt
from cnnbench.model import AlignedTrajectory, validate_alignment
from cnnbench.potential import RATIO, competitive_ratio, verify_nondecreasing
from cnnbench.scalar import Scalar, SQRT3, ZERO, ONE


def origin_server():
    return OnlineServer(pt(0, 0))


def test_half_step_identity():
    assert HALF_STEP == ONE / (ONE + SQRT3)


def test_tight1_shape_and_costs():
    pair = tight1(1)
    c = HALF_STEP
    assert pair.instance.total_length == Scalar(2) + c
    assert pair.opt.path_cost() == c
    assert run(pair.instance).final_cost == Scalar(2) + c


def test_tight1_exact_ratio_any_k():
    for k in (1, 2, 7):
        pair = tight1(k)
        tr = run(pair.instance)
        assert competitive_ratio(tr, pair.opt) == RATIO
        assert pair.meta["expected_ratio"] == RATIO


def test_tight2_per_cycle_costs():
    pair = tight2(1)
    tr = run(pair.instance)
    assert tr.final_cost == RATIO
    assert pair.opt.path_cost() == ONE
    # the cycle closes with both servers together on the shelf
    assert tr.final_server == pt(1, 1)
    assert pair.opt.breakpoints[-1][1] == pt(1, 1)


def test_tight2_exact_ratio_any_k():
    for k in (1, 3, 5):
        pair = tight2(k)
        assert competitive_ratio(run(pair.instance), pair.opt) == RATIO


def test_tight_generators_reject_zero_cycles():
    with pytest.raises(GeneratorError):
        tight1(0)
    with pytest.raises(GeneratorError):
        tight2(0)


def test_fig2_scenario():
    pair = fig2_scenario()
    assert validate_alignment(pair.opt, pair.instance).feasible
    assert pair.opt.path_cost() == ONE
    tr = run(pair.instance)
    assert verify_nondecreasing(tr, pair.opt).ok
    # the corner-committing strategy pays 3 where the offline server pays 1
    total = pair.instance.total_length
    corner_strategy = AlignedTrajectory((
        (ZERO, pt(0, 1)),
        (ONE, pt(1, 1)),       # commits to the far corner with the request
        (Scalar(2), pt(1, 0)),
        (Scalar(3), pt(0, 0)),  # then must walk to the sweet spot anyway
        (total, pt(0, 0)),
    ))
    assert validate_alignment(corner_strategy, pair.instance).feasible
    assert corner_strategy.path_cost() == Scalar(3)


def test_all_bundled_opts_are_feasible():
    pairs = [tight1(2), tight2(2), fig2_scenario(),
             adversary_continuous(origin_server(), 5)]
    pairs += [random_orthogonal(s) for s in range(50)]
    for pair in pairs:
        assert validate_alignment(pair.opt, pair.instance).feasible, pair.meta


def test_generators_are_deterministic():
    assert tight1(4) == tight1(4)
    assert tight2(3) == tight2(3)
    assert random_orthogonal(123) == random_orthogonal(123)
    assert random_orthogonal(1) != random_orthogonal(2)


def test_random_orthogonal_edge_cases():
    pair = random_orthogonal(5, n_segments=0)
    assert pair.instance.segments == ()
    assert pair.opt.path_cost() == ZERO
    with pytest.raises(GeneratorError):
        random_orthogonal(5, n_segments=-1)


def test_random_orthogonal_is_axis_parallel_and_bounded():
    for seed in range(100):
        pair = random_orthogonal(seed, 10, 3)
        assert pair.instance.is_axis_parallel()
        for p in pair.instance.points():
            assert abs(p.x) <= Scalar(3) and abs(p.y) <= Scalar(3)


def test_adversary_against_engine():
    pair = adversary_continuous(origin_server(), 10)
    assert pair.opt.path_cost() == Scalar(10)  # exactly $1 per cycle
    tr = run(pair.instance)
    ratio = competitive_ratio(tr, pair.opt)
    assert Scalar(3) - 1 <= ratio <= RATIO
    assert verify_nondecreasing(tr, pair.opt).ok


def test_adversary_empty():
    pair = adversary_continuous(origin_server(), 0)
    assert pair.instance.segments == ()


def test_adversary_rejects_misplaced_server():
    with pytest.raises(ProtocolError):
        adversary_continuous(OnlineServer(pt(5, 5)), 1)


def test_adversary_homing_amortizes():
    # longer games keep the same per-cycle ratio: startup washes out
    r20 = competitive_ratio(
        run(adversary_continuous(origin_server(), 20).instance),
        adversary_continuous(origin_server(), 20).opt,
    )
    assert Scalar(3) - Scalar(3) / 20 <= r20 <= RATIO


def test_pair_json_roundtrip():
    for pair in (tight1(2), fig2_scenario(), random_orthogonal(9)):
        again = GeneratedPair.from_json(pair.to_json())
        assert again.instance == pair.instance
        assert again.opt == pair.opt
        assert again.meta.get("expected_ratio") == pair.meta.get("expected_ratio")
