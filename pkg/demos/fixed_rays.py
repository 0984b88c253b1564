"""Fixed rays of e^z - 2 and where they land.

Lands the seven fixed addresses (k) for |k| <= 3, prints the landing point,
multiplier and step count, then traces the ray (0) and checks that f moves
each point of it one unit of potential along the ray.

    python demos/fixed_rays.py
"""

from dreadlock import EntireMap, ExternalAddress, land, parse_address, trace_ray

m = EntireMap.exponential(-2)
print(f"map {m.map_id}, disc radius R = {m.disc_radius}")

for k in range(-3, 4):
    s = ExternalAddress.periodic([k])
    rep = land(m, s, 16)
    z = rep.landing_point
    print(f"{str(s):>5}  {rep.status_text:8s} z0 = {z.real:+.12f} {z.imag:+.12f}i  "
          f"|lambda| = {abs(rep.multiplier):7.3f}  steps = {rep.steps}")

ray = trace_ray(m, parse_address("(0)"), 1e4, 15)
worst = max(abs(m.eval(ray.at(t)) - ray.at(t + 1)) for t in (-14.5, -10.25, -5.75, -2.5))
print(f"\nray (0): {len(ray.vertices)} vertices, t in [{ray.t_values[0]}, {ray.t_values[-1]}]")
print(f"max |f(g(t)) - g(t+1)| on samples: {worst:.2e}")
