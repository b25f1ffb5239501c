"""Coamoeba of a line with phases: sample, count points in the open complement, optionally draw it."""
import argparse

from phasetrop import catalog
from phasetrop.amoeba import line_coamoeba_complement, sample_hypersurface
from phasetrop.svg import coamoeba_svg, line_coamoeba_boundaries


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--alpha", default="2.0,0.5,1.0", help="phases of z, w and the constant term")
    p.add_argument("--k", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--svg")
    a = p.parse_args()
    alpha = tuple(float(x) for x in a.alpha.split(","))
    f = catalog.phased_line(alpha)
    cloud = sample_hypersurface(f, 10.0, 3.0, a.k, a.seed).arg_part()
    inside = int(line_coamoeba_complement(cloud.points, alpha).sum())
    print(f"alpha = {alpha}: {len(cloud)} points, {inside} in the open complement")
    if a.svg:
        with open(a.svg, "w") as fh:
            fh.write(coamoeba_svg(cloud, line_coamoeba_boundaries(alpha)))
        print(f"wrote {a.svg}")


if __name__ == "__main__":
    main()
