"""Period-2 portrait of e^z - 2 and the size of the alphabet.

With labels |k| <= 3 several period-2 points in [-5,5]x[-8,8] are left
without a ray: the labels read along their cycle are large (|k| up to 21).
Widening the alphabet closes the gap.

    python demos/period_two_portrait.py
"""

import time

from dreadlock import EntireMap, verify_landing_theorem

m = EntireMap.exponential(-2)
window = (-5, 5, -8, 8)

for K in (3, 10, 25):
    t0 = time.perf_counter()
    rep = verify_landing_theorem(m, 2, K, window)
    dt = time.perf_counter() - t0
    print(f"K = {K:2d}: {len(rep.pairs):3d} matched pairs, "
          f"{len(rep.unmatched_points):3d} points without a ray  ({dt:.1f} s)")
    if rep.unmatched_points:
        pt, req = rep.unmatched_points[0]
        labels = ", ".join(str(l) for l in req)
        print(f"        e.g. z = {pt.point:.6f} needs labels [{labels}]")
