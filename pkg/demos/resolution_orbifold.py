"""Crepant resolutions of the A-type cone singularities C^k / Z_k.

The rank-1 action with weights (1, ..., 1, -k) has a single crepant
wall separating the resolved chamber from the orbifold chamber.  On
the resolved side the wall term of the k-th Chern class is entered as
fixed-point data; on the orbifold side a single Z_k-twisted point
contributes 1/k.  The script prints both for k = 2..5.
"""

from __future__ import annotations

from fractions import Fraction

from vgw import (
    FixedPointDatum,
    LinForm,
    PolPath,
    TorusAction,
    abstract_wall_term,
    chern,
    crepant_check,
    enumerate_walls,
    theta,
    var,
    xi,
)

path = PolPath((-1,), (1,))


def resolution_term(k: int) -> Fraction:
    action = TorusAction(1, ((1,),) * k + ((-k,),), ("s",))
    s = xi("s")
    one = LinForm.make({s: 1})
    datum = FixedPointDatum(
        label="resolution",
        restriction=chern(action, k),
        den_weights=(one,) * k + (LinForm.make({s: -k}),),
    )
    return abstract_wall_term([datum], s)


def orbifold_pairing(k: int) -> Fraction:
    q = theta("q")
    datum = FixedPointDatum(
        label="orbifold",
        restriction=var(q) ** k,
        den_weights=(LinForm.make({q: 1}),) * k,
        orbifold_order=k,
    )
    return datum.contribution().as_rat()


def main() -> None:
    for k in range(2, 6):
        action = TorusAction(1, ((1,),) * k + ((-k,),), ("s",))
        wall = enumerate_walls(action, path)[0]
        print(f"k = {k}: wall t* = {wall.t_star}, "
              f"crepant = {crepant_check(action, wall)}, "
              f"resolution wall term = {resolution_term(k)}, "
              f"orbifold pairing = {orbifold_pairing(k)}")


if __name__ == "__main__":
    main()
