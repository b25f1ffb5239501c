"""Pair-of-pants counts and Euler data for smooth plane curves of degree 1..D."""
import argparse

from phasetrop.pants import euler_characteristics, pants_graph
from phasetrop.tropical import corner_locus, smooth_plane_curve


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-degree", type=int, default=5)
    a = p.parse_args()
    print(f"{'d':>2} {'pants':>6} {'gluings':>8} {'legs':>5} {'chi_open':>9} {'genus':>6}")
    for d in range(1, a.max_degree + 1):
        g = pants_graph(corner_locus(smooth_plane_curve(d)))
        e = euler_characteristics(g)
        print(f"{d:>2} {len(g.nodes):>6} {len(g.internal_edges):>8} {len(g.boundary_legs):>5} "
              f"{e.chi_open:>9} {e.genus:>6}")


if __name__ == "__main__":
    main()
