"""Bridges between the three observable spaces, and when they invert.

Point maps going down (forget structure) induce operator extensions
going up, and point maps going up (add canonical structure) induce
operator restrictions going down.  On the full spaces these compose to
the identity one way round only.  On the control-independent
subspaces, where observables provably ignore their input component,
the bridges become inverse pairs and all three operator encodings act
as the same object.
"""

import numpy as np

from koopcontrol import (
    DomainTag,
    Observable,
    apply,
    builtin_system,
    ci_isomorphisms,
    extension_aug_to_inf,
    indicator,
    is_control_independent,
    k_aug,
    k_inf,
    k_u,
    pair_indicator,
    restriction_aug_to_f,
    restriction_inf_to_aug,
    state_component,
)


def main():
    sys = builtin_system("finite3")
    pairs = [(x, u) for x in sys.states.labels for u in sys.inputs.labels]

    print("round trip on pair observables: extend to sequences, restrict back")
    g = pair_indicator(1, "b")
    back = apply(restriction_inf_to_aug(), apply(extension_aug_to_inf(), g))
    print(f"  max |back - original| over pairs: "
          f"{max(abs(back(p) - g(p)) for p in pairs):g}")
    print()

    print("freezing an input u* restricts pair observables to state observables")
    for u in sys.inputs.labels:
        rop = restriction_aug_to_f(u, sys)
        h = apply(rop, pair_indicator(1, "b"))
        values = [int(h(x).real) for x in sys.states.labels]
        print(f"  restrict via u*={u!r}: tabulation {values}")
    print("  different slices of an input-sensitive observable disagree -- no inverse")
    print()

    print("certified control independence makes the bridges invertible")
    iso = ci_isomorphisms(sys)
    f = indicator(2)
    up = apply(iso.extend_state_to_aug, f)
    upup = apply(iso.extend_aug_to_seq, up)
    print(f"  {f.label} lifted twice; certificates: "
          f"pair stamp={up.ci_input!r}, sequence stamp={upup.ci_input is not None}")
    report = is_control_independent(up, sys)
    print(f"  exhaustive independence scan of the lift: {report.independent}")
    down = apply(iso.restrict_aug_to_state, apply(iso.restrict_seq_to_aug, upup))
    diffs = [abs(down(x) - f(x)) for x in sys.states.labels]
    print(f"  descend twice, compare: max diff {max(diffs):g}")
    print()

    print("uncertified observables cannot ride the inverse bridges")
    bare = Observable(DomainTag.STATE_SEQUENCE, lambda p: complex(p[0]), label="x")
    try:
        apply(iso.restrict_seq_to_aug, bare)
    except Exception as exc:
        print(f"  {type(exc).__name__}: {exc}")
    print()

    print("on the certified subspace all three operators are the same map:")
    kau, kin = k_aug(sys), k_inf(sys)
    for u in sys.inputs.labels:
        ku = k_u(sys, u)
        lhs = apply(ku, f)
        rhs = apply(restriction_aug_to_f(u, sys), apply(kau, up))
        agree = all(lhs(x) == rhs(x) for x in sys.states.labels)
        print(f"  K_{u} f == restrict_u(K_aug lift f): {agree}")
    seq_side = apply(kin, upup)
    mid = apply(restriction_inf_to_aug(), seq_side)
    agree = all(mid(p) == apply(kau, up)(p) for p in pairs)
    print(f"  restrict(K_inf lift lift f) == K_aug lift f on all pairs: {agree}")
    print()

    print("state_component reads a certified observable at its witness input")
    part = state_component(up)
    print(f"  tabulation: {[int(part(x).real) for x in sys.states.labels]}")


if __name__ == "__main__":
    main()
