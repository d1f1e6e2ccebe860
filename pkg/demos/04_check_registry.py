"""The identity-check registry at work, including on a broken system.

Twenty registered checks evaluate both sides of the algebraic identities
that tie the operator encodings together: round trips, intertwinings,
trajectory formulas, and the two negative results that hold as theorems
(ill-definedness of input-as-state, divergence of the frozen-input
square).  Finite systems are checked exhaustively over indicator bases;
box systems over seeded samples and random function combinations.

The registry is only trustworthy if it can fail, so the last section
feeds it a system whose transition map is not even a function (its
output depends on a hidden call counter) and shows the counterexample
coming back.
"""

from koopcontrol import (
    ControlSystem,
    FiniteStates,
    InputSet,
    builtin_system,
    check_ids,
    describe_check,
    exact_plan,
    results_to_text,
    run_all,
    sampled_plan,
)


def main():
    print("registered checks:")
    for cid in check_ids():
        print(f"  {cid:<4} {describe_check(cid)}")
    print()

    sys = builtin_system("finite3")
    print("exhaustive run on finite3 (tolerance zero):")
    summary = run_all(sys, exact_plan())
    print(results_to_text(summary.results))

    box = builtin_system("scalarlinear")
    print("sampled run on scalarlinear (seed 7, tolerance 1e-12):")
    summary = run_all(box, sampled_plan(seed=7, n_points=300, n_functions=12))
    print(results_to_text(summary.results))

    print("a deliberately inconsistent system (output flips on a call counter):")
    calls = {"n": 0}

    def unstable(x, u):
        calls["n"] += 1
        if calls["n"] % 13 == 0:
            return 0
        return (x + 1) % 3 if u == "a" else (2 * x) % 3

    bad = ControlSystem(
        FiniteStates((0, 1, 2)), InputSet(("a", "b")), unstable, name="unstable"
    )
    summary = run_all(bad, exact_plan(), only=["C14", "C17", "C18"])
    print(results_to_text(summary.results))
    for r in summary.results:
        if not r.passed:
            print(f"  {r.id} counterexample: {r.counterexample}")


if __name__ == "__main__":
    main()
