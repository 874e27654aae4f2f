import itertools
import math
import os
from pathlib import Path

import pytest

import wfshap

FIXTURES = Path(os.environ.get("WFSHAP_FIXTURE_DIR", Path(__file__).resolve().parents[2] / "data" / "fixtures"))


def brute_force_phi(n, values):
    phi = [0.0] * n
    orders = list(itertools.permutations(range(n)))
    for order in orders:
        mask = 0
        for i in order:
            phi[i] += values[mask | (1 << i)] - values[mask]
            mask |= 1 << i
    return [p / len(orders) for p in phi]


def test_exact_matches_permutation_enumeration():
    values = [0.0, 0.3, 0.1, 0.55, 0.2, 0.45, 0.35, 0.9]
    game = wfshap.GameTable(["planning", "action", "reflection"], values)
    result = wfshap.shapley_exact(game)
    assert result.method == wfshap.Method.EXACT
    for got, want in zip(result.phi, brute_force_phi(3, values)):
        assert got == pytest.approx(want, abs=1e-12)
    assert result.efficiency_residual() < 1e-12
    assert set(result.as_dict()) == {"planning", "action", "reflection"}


def test_permutation_estimate_is_seeded():
    spec = wfshap.SyntheticGameSpec.additive(0.1, [0.2, 0.15, 0.1])
    spec.set_gamma(0, 1, 0.05)
    table, analytic = wfshap.synthesize_game(spec)
    a = wfshap.shapley_permutation(table, 2000, 5)
    b = wfshap.shapley_permutation(table, 2000, 5)
    assert a.phi == b.phi
    assert a.seed == 5
    for got, want in zip(a.phi, analytic):
        assert math.isclose(got, want, abs_tol=0.01)


def test_synergy_recovers_interaction():
    spec = wfshap.SyntheticGameSpec.additive(0.0, [0.25, 0.25])
    spec.set_gamma(0, 1, 0.125)
    table, _ = wfshap.synthesize_game(spec)
    assert wfshap.synergy_matrix(table).at(0, 1) == 0.125


def test_game_json_round_trip_and_errors():
    game = wfshap.parse_game_json('{"components":["p","a"],"values":{"":0.1,"p":0.4,"a":0.2,"p+a":0.7}}')
    assert wfshap.parse_game_json(wfshap.format_game_json(game)).values() == game.values()
    partial = wfshap.parse_game_json('{"components":["p","a"],"values":{"":0.1,"p+a":0.7}}')
    assert partial.missing_masks() == [1, 2]
    with pytest.raises(wfshap.IncompleteGameError):
        wfshap.shapley_exact(partial)
    with pytest.raises(ValueError):
        wfshap.parse_game_json("not json")


def test_published_table_helpers():
    choice = wfshap.optimal_configuration(str(FIXTURES / "math.json"))
    assert choice == {
        "planning": "doubao-pro-4k",
        "reasoning": "Claude-3.5",
        "action": "gpt-4-turbo",
        "reflection": "gpt-4o-mini",
    }
    ranks = {"m1": 0.1, "m2": 0.3, "m3": 0.2}
    assert wfshap.consistency_rate(ranks, ranks) == 1.0
    assert wfshap.consistency_rate(ranks, {k: -v for k, v in ranks.items()}) == 0.0
    assert wfshap.__version__ == "0.1.0"
