#!/usr/bin/env python3
"""Sweep the motor model's switch exponent and save the behavior atlas.

Runs the two-ring model over a rational grid of switch exponents, groups
grid points by contraction behavior, refines the boundaries by exact
bisection and writes the full result (intervals, fitted slowest exponents,
critical values) as JSON.

Example:
    python scripts/run_kinesin_sweep.py --grid 1/4:41/4:1/2 --out sweep.json
"""

import argparse
import sys
from fractions import Fraction

import metachain as mc


def rational_grid(text: str) -> list:
    try:
        start, stop, step = (mc.parse_rational(tok) for tok in text.split(":"))
    except (ValueError, mc.GraphError) as exc:
        raise SystemExit(f"bad grid {text!r}: {exc}")
    if step <= 0:
        raise SystemExit("grid step must be positive")
    out = []
    z = start
    while z <= stop:
        out.append(z)
        z += step
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", default="1/4:41/4:1/2", help="start:stop:step, rationals")
    ap.add_argument("--psi", default="2", help="chemical tilt (rational)")
    ap.add_argument("--no-bisect", action="store_true", help="skip boundary refinement")
    ap.add_argument("--out", default="kinesin_sweep.json")
    args = ap.parse_args(argv)

    params = mc.KinesinParams(zeta=Fraction(1), psi=mc.parse_rational(args.psi))
    result = mc.kinesin_sweep(
        rational_grid(args.grid), params=params, bisect=not args.no_bisect
    )

    with open(args.out, "w") as fh:
        fh.write(mc.dump_json(result.to_json_dict()))

    crit = ", ".join(str(v) for v in result.critical_values)
    print(f"{len(result.intervals)} behavior intervals over {len(result.grid)} grid points")
    print(f"critical switch exponents: {crit or 'none found'}")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
