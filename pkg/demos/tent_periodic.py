"""Periodic cutpoints of the full tent map, each with a weak-repelling witness."""
from planefix.dendrite import fixed_points, full_tent_map, periodic_cutpoints, tent_coordinate, weakly_repelling


def main(N=4):
    f = full_tent_map()
    g = f
    for n in range(1, N + 1):
        if n > 1:
            g = f.compose(g)
        print(f"f^{n}: {len(fixed_points(g)[0])} fixed points")
    rep = periodic_cutpoints(f, N)
    for p, n in rep.points:
        w = weakly_repelling(f, p, n)
        how = "none" if w is None else f"{w.kind} at scale 2^-{w.scale} for f^{w.iterate}"
        print(f"  x = {tent_coordinate(p)}  period {n}  witness: {how}")


if __name__ == "__main__":
    main()
