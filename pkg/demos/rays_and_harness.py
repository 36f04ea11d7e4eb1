"""External rays of z^2 - 1 and z^2 - 2, rays at a fixed point, and the fixed-point harness."""
from fractions import Fraction

from planefix.geometry import Region
from planefix.polydyn import fixed_rays_at, impression_diameter_bound, pointdyn_harness, trace_ray

ALPHA = (1 - 5 ** 0.5) / 2


def main():
    for a in (Fraction(1, 3), Fraction(2, 3), Fraction(1, 7)):
        # the multiplier at alpha has modulus 1.24, so rays landing there need many levels
        r = trace_ray([-1, 0, 1], a, 48)
        print(f"z^2-1 ray {a}: {r.status} at {r.landing:.6f}, tail {r.tail_diameter:.1e}")
    fr = fixed_rays_at([-1, 0, 1], ALPHA)
    print("rays landing at alpha:", [str(a) for a in fr.angles],
          "permutation:", {str(k): str(v) for k, v in fr.permutation.items()})
    im = impression_diameter_bound([0, 0, 1], 0, 20)
    print("impression of angle 0 for z^2:", im.status, f"bound {im.bound[-1]:.1e}")
    h = pointdyn_harness([-2, 0, 1], {"kind": "invariant", "X": Region.segment(-2, 2)})
    print("z^2-2 on [-2, 2]:", h.status)
    for k, v in h.hypotheses.items():
        print(f"  {k}: {v['ok']} {v['detail']}")


if __name__ == "__main__":
    main()
