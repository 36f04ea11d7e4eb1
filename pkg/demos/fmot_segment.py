"""Index equals variation sum plus one for f(z) = -2z on a tight curve around [-1, 1]."""
import sys

import numpy as np

from planefix.geometry import PlaneCurve, Region
from planefix.indexvar import fmot_verify
from planefix.maps import PolyMap
from planefix.svg import variation_figure


def zigzag(h=0.15, b=0.1):
    xs = np.linspace(-1, 1, 81)

    def side(touch, sign):
        return [complex(x, sign * min(b, 2 * min(abs(x - t) for t in touch))) for x in xs]

    cap_r = [1 + h * np.exp(1j * t) for t in np.linspace(-np.pi / 2 + 0.3, np.pi / 2 - 0.3, 9)]
    cap_l = [-1 + h * np.exp(1j * t) for t in np.linspace(np.pi / 2 + 0.3, 3 * np.pi / 2 - 0.3, 9)]
    return PlaneCurve(np.array(side([-0.4, 0.3], -1) + cap_r + side([0.35, -0.3], 1)[::-1] + cap_l), closed=True)


def main(svg_path=None):
    f, S, X = PolyMap((0, -2)), zigzag(), Region.segment(-1, 1)
    rep = fmot_verify(f, S, X)
    print(f"index {rep.index}, links {len(rep.variations)}, variations {[v.total for v in rep.variations]}")
    print(f"identity index = sum + 1 holds: {rep.holds}")
    if svg_path:
        # draw the first link that has a crossing, or the first link
        v = next((v for v in rep.variations if v.crossings), rep.variations[0])
        img = f(v.link.vertices)
        rays = {"R+": v.junction.ray_plus.vertices, "Ri": v.junction.ray_i.vertices,
                "R-": v.junction.ray_minus.vertices}
        cr = [(complex(f(v.link.point_at(np.array([pos])))[0]), s) for pos, _, s in v.crossings]
        with open(svg_path, "w") as fh:
            fh.write(variation_figure(v.link.vertices, img, rays, cr, S.vertices))
        print("wrote", svg_path)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
