#!/usr/bin/env python3
"""Brute-force the sections over the up-set of {y} for the w,x,y,z formula.

Writes tests/fixtures/upset_y_sections.txt. Independent of the C++ code:
the clause complex is every subset of a clause's variable set, the up-set of
{y} is every face containing y, and because every variable's faces in that
up-set are chained through a common face, a section is an assignment of the
variables it touches that satisfies each clause lying inside some face of
the up-set. Each section is listed with its number of global extensions.
"""

import itertools
import pathlib

VARS = ["w", "x", "y", "z"]
# (w | -x) & (w | y) & (x | -y) & (x | y | -z), literals as (name, positive)
CLAUSES = [
    [("w", True), ("x", False)],
    [("w", True), ("y", True)],
    [("x", True), ("y", False)],
    [("x", True), ("y", True), ("z", False)],
]


def faces():
    out = set()
    for c in CLAUSES:
        names = sorted({v for v, _ in c})
        for k in range(1, len(names) + 1):
            out.update(frozenset(s) for s in itertools.combinations(names, k))
    return out


def satisfied(clause, a):
    return any(a[v] == pos for v, pos in clause)


def main():
    up = [f for f in faces() if "y" in f]
    touched = sorted(set().union(*up), key=VARS.index)
    local = [c for c in CLAUSES if any({v for v, _ in c} <= f for f in up)]
    rows = []
    for bits in itertools.product([False, True], repeat=len(VARS)):
        a = dict(zip(VARS, bits))
        if not all(satisfied(c, a) for c in local):
            continue
        extensions = 1 if all(satisfied(c, a) for c in CLAUSES) else 0
        rows.append(("".join("T" if a[v] else "F" for v in touched), extensions))
    path = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "upset_y_sections.txt"
    with path.open("w") as f:
        f.write("# sections over the up-set of {y}; generated by scripts/make_upset_fixture.py\n")
        f.write("# " + "".join(touched) + " global_extensions\n")
        for pattern, ext in rows:
            f.write(f"{pattern} {ext}\n")
    print(f"{len(rows)} sections written to {path}")


if __name__ == "__main__":
    main()
