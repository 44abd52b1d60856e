#!/usr/bin/env python3
"""A guided tour of the core objects: flips, one-step distributions,
and the greedy coupling, all in exact rational arithmetic.

Run:  python3 demos/coupling_tour.py
"""

from fractions import Fraction

from flipdyn import (
    Coloring,
    Graph,
    NeighboringPair,
    alternating_component,
    enumerate_flips,
    flip_step_distribution,
    greedy_coupling_distribution,
    mixed_vector,
    stationary_check_tiny,
    vigoda_vector,
)


def main() -> None:
    # A 5-cycle with a chord, 4 colors.
    g = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3)])
    sigma = Coloring((0, 1, 2, 1, 3), k=4)
    probs = vigoda_vector()

    print("graph: 5-cycle plus chord (1,3), k = 4")
    print(f"coloring sigma = {sigma.colors}")
    print()

    comp = alternating_component(g, sigma, 0, 1)
    print("alternating component of (vertex 0, color 1):", sorted(comp))
    print("  (vertices reachable from 0 through colors {0, 1} only;")
    print("   swapping the two colors inside it keeps properness)")
    print()

    flips = enumerate_flips(g, sigma)
    print(f"distinct flips available: {len(flips)}")
    assert sum(flips.values()) == g.n * (sigma.k - 1)
    dist = flip_step_distribution(g, sigma, probs)
    noop = dist.get(None, Fraction(0))
    print(f"one-step no-op mass: {noop} (~{float(noop):.4f})")
    heaviest = max(
        ((f, m) for f, m in dist.items() if f is not None), key=lambda t: t[1]
    )
    comp, lo, hi = heaviest[0]
    print(
        f"heaviest flip: swap colors {lo}/{hi} on {sorted(comp)} "
        f"with mass {heaviest[1]}"
    )
    print()

    # Now a neighboring pair: recolor vertex 0 from 0 to 2.
    pair = NeighboringPair(g, sigma, sigma.recolor({0: 2}))
    coupled = greedy_coupling_distribution(pair, probs)
    print("neighboring pair: tau = sigma with vertex 0 recolored 0 -> 2")
    print(f"coupled moves: {len(coupled.moves)}, total mass "
          f"{coupled.total_mass()} (must be 1)")
    exact = coupled.sigma_marginal() == {
        f: m for f, m in flip_step_distribution(g, sigma, probs).items()
        if f is not None and m != 0
    }
    print(f"sigma marginal equals the single-chain law exactly: {exact}")
    tm = coupled.terminating_mass()
    print(f"terminating mass (moves that can change the distance): {tm} "
          f"(~{float(tm):.4f})")
    print()

    # Stationarity sanity on a tiny instance, exact transition matrix.
    tiny = Graph(3, [(0, 1), (1, 2)])
    report = stationary_check_tiny(tiny, 3, mixed_vector())
    print("tiny-chain check on a 3-path with 3 colors:")
    print(f"  states {report.n_states}, proper {report.proper_states}, "
          f"reachable proper {report.reachable_proper}")
    print(f"  rows stochastic: {report.stochastic_ok}; "
          f"uniform-over-proper symmetry: {report.symmetry_ok}")


if __name__ == "__main__":
    main()
