"""Compare exact and numeric classifications over the power-family grid.

f = k u^p, g = lam u^q with A(0) = 1; prints one row per (p, k, q) case in
each time direction.
"""
import itertools
import sys

from peakons.classify import classify_numeric, classify_power_family
from peakons.dsl import NonlinearitySpec
from peakons.peakon1 import PeakonState
from peakons.reduce import ReducedSystem


def main(horizon: float = 20.0) -> int:
    rows, bad = [], 0
    for p, k, q in itertools.product((1.0, 2.0, -1.0), (1.0, -1.0), (-1.0, 1.0, 2.0)):
        t0 = -1.0 / (p * k)
        rs = ReducedSystem(NonlinearitySpec.from_text("k*u^p", "lam*u^q", {"k": k, "p": p, "lam": 1.0, "q": q}))
        for direction, end in (("forward", horizon), ("backward", -horizon)):
            exact = classify_power_family(p, q, k, 1.0, t0, direction=direction)
            numeric = classify_numeric(rs, PeakonState(0.0, 1.0, 0.0), end)
            same = (exact.amplitude_class, exact.position_class) == (numeric.amplitude_class,
                                                                     numeric.position_class)
            bad += not same
            rows.append((p, k, q, direction, exact.amplitude_class, exact.position_class,
                         numeric.amplitude_class, numeric.position_class, "ok" if same else "DIFF"))
    fmt = "{:>5} {:>5} {:>5}  {:<8} {:<12} {:<22} {:<12} {:<22} {}"
    print(fmt.format("p", "k", "q", "dir", "exact A", "exact X", "numeric A", "numeric X", ""))
    for row in rows:
        print(fmt.format(*row))
    print(f"{len(rows) - bad}/{len(rows)} agree")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main(float(sys.argv[1]) if len(sys.argv) > 1 else 20.0))
