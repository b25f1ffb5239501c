"""Hausdorff distance from the Log_t amoeba of t^{-1} + z + w + zw to its tropical limit, along a t ladder."""
import argparse
import math

from phasetrop import catalog
from phasetrop.amoeba import hausdorff_distance, sample_hypersurface
from phasetrop.tropical import corner_locus


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--ladder", default="10,100,1000,1e6")
    p.add_argument("--k", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--box", type=float, default=3.0)
    a = p.parse_args()
    fam = catalog.hyperbola_family()
    G = corner_locus(fam.tropical_limit())
    print(f"{'t':>10} {'d_H':>10} {'log2/log t':>12}")
    for t in (float(x) for x in a.ladder.split(",")):
        cloud = sample_hypersurface(fam, t, a.box, a.k, a.seed)
        d = hausdorff_distance(cloud.log_part(), G, a.box)
        print(f"{t:>10.4g} {d:>10.6f} {math.log(2) / math.log(t):>12.6f}")


if __name__ == "__main__":
    main()
