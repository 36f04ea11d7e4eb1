"""Pull back the basilica leaf, build the dual trees and check periodic cutpoints of the induced tree map."""
from planefix.lamination import (basilica, check_invariance, lamwkrp_verify, pullback_generate, quotient_tree,
                                 topological_polynomial, tree_valences)


def main(depth=4):
    res = pullback_generate(basilica(0).classes[0], 2, depth, return_result=True)
    L = res.lamination
    rep = check_invariance(L)
    print(f"depth {depth}: {len(L.classes)} classes, conditions ok: {rep['ok']}, "
          f"pairing ambiguities: {len(res.ambiguities)}")
    Q = quotient_tree(L)
    print(f"dual tree: {len(Q.tree.vertices)} faces, {len(Q.tree.edges)} chords")
    print("model valences:", sorted(set(tree_valences(Q).values())))
    tp = topological_polynomial(basilica(2), basilica(1))
    print("face map depth 2 -> 1:", tp.face_map)
    w = lamwkrp_verify([basilica(1), basilica(2)], 2)
    for e in w.entries:
        print(f"  periodic cutpoint {e['point']} period {e['period']} witness {e['witness']}")
    print("flagged for review:", w.flagged)


if __name__ == "__main__":
    main()
