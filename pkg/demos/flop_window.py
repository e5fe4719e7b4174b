"""Quantum corrections across the simple flop wall.

Weights (1, 1, -1, -1) on C^4 give the two small resolutions of the
conifold as the two chambers; the single wall at t* = 0 is crepant.
The quantum wall term of z^3 equals 1 in every degree, so the window
of Novikov shifts is flat and the distribution collapses to the tag
"ae-zero" (all corrections sit at shift zero after normalization).
"""

from __future__ import annotations

from vgw import (
    PolPath,
    TorusAction,
    classify_distribution,
    crepant_check,
    enumerate_walls,
    novikov_window,
    picard_ratio,
    quantum_wall_term,
    var,
)

action = TorusAction(1, ((1,), (1,), (-1,), (-1,)))
path = PolPath((-1,), (1,))


def main() -> None:
    wall = enumerate_walls(action, path)[0]
    z = action.ambient_params()[0]
    alpha = var(z) ** 3
    print(f"wall: t* = {wall.t_star}, support = {wall.support}, "
          f"crepant = {crepant_check(action, wall)}")
    print("quantum wall terms of z^3 by degree:")
    for d in range(-5, 6):
        print(f"  d = {d:>2}: {quantum_wall_term(action, wall, (d,), alpha)}")
    print("ratio of the two one-parameter pairings, by twist:")
    for r in range(-3, 4):
        print(f"  r = {r:>2}: {picard_ratio(action, wall, (0,), r, alpha)}")
    window = novikov_window(action, wall, (0,), 4, alpha)
    print("window of Novikov shifts:")
    for shift, value in window.values:
        print(f"  shift {shift:>2}: {value}")
    print(f"distribution tag: {classify_distribution(window)}")


if __name__ == "__main__":
    main()
