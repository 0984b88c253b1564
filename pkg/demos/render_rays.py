"""Escape-time picture of e^z - 2 with a few rays and the fixed points.

Writes rays.ppm and rays.svg to the current directory.

    python demos/render_rays.py
"""

from dreadlock import EntireMap, RenderSpec, parse_address, render, scan_periodic, trace_ray

m = EntireMap.exponential(-2)
window = (-4, 6, -8, 8)

rays = [trace_ray(m, parse_address(a), 1e4, 20) for a in ("(0)", "(1)", "(-1)", "(0,1)", "(1,0)")]
marks = list(scan_periodic(m, 1, window))
spec = RenderSpec(window, 500, 800, max_iter=40, overlays=rays, marks=marks)
img = render(m, spec, "rays.ppm", "rays.svg")
print(f"wrote rays.ppm ({img.shape[1]}x{img.shape[0]}) and rays.svg; "
      f"{len(marks)} fixed points marked")
