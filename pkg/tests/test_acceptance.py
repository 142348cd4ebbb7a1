"""One test per acceptance criterion; each prints a single [PASS]/[FAIL] line.

Run directly (``python3 tests/test_acceptance.py``) for the summary lines only.
Tolerances and limits are pinned here rather than taken from library defaults.
"""

import sys

import pytest

from nlhomog import acceptance

PINNED = {
    1: dict(values=(1.0, 0.5, 2.0), n_nodes=64, tol=1e-10),
    2: dict(alphas=(0.5, 1.0, 1.5), h=2.0 ** -9, tol=0.02, per_alpha_limit=120),
    3: dict(alphas=(0.5, 1.0), dt=1e-4, n_paths=100_000, seed=0),
    4: dict(eps_list=(1 / 8, 1 / 16, 1 / 32, 1 / 64), alpha=0.5, slope_min=0.4, r2_min=0.9, control_max=0.2),
    5: dict(seed=0),
    6: dict(alpha=0.5, tol=1e-6),
}
LIMITS = {1: 10, 2: 360, 3: 300, 4: 1800, 5: 300, 6: 120}


def _run(number):
    result = acceptance.CRITERIA[number](**PINNED[number])
    assert result.limit == LIMITS[number]
    return result


@pytest.mark.parametrize("number", sorted(PINNED))
def test_criterion(number, capsys):
    result = _run(number)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()


if __name__ == "__main__":
    results = [_run(n) for n in sorted(PINNED)]
    for r in results:
        print(r.line())
    sys.exit(0 if all(r.passed for r in results) else 1)
