#!/usr/bin/env python3
"""Writes fixtures/structures/*.json with expected values computed here,
independently of the C++ library, straight from the set definitions."""

import itertools
import json
import random
import sys
from pathlib import Path


def subsets(s, k):
    return [frozenset(c) for c in itertools.combinations(sorted(s), k)]


def number(fibers, carrier):
    fam = set(fibers)
    for k in range(len(carrier) + 1):
        if fam == set(subsets(carrier, k)):
            return k
    return None


def fibers_b(doc, i):
    return frozenset(x for x, j in doc["B"] if j == i and x in doc["S"])


def fibers_c(doc, a, i):
    return frozenset(x for x, j, p in doc["C"] if j == i and p == a and x in doc["S"])


def param_fibers(doc, a):
    return [fibers_c(doc, a, i) for i in doc["I"]]


def add_holds(doc, nums, n, m, l):
    if None in (nums[n], nums[m], nums[l]):
        return False
    targets = set(param_fibers(doc, l))
    return any(not (x & y) and (x | y) in targets for x in param_fibers(doc, n) for y in param_fibers(doc, m))


def mul_holds(doc, nums, n, m, l):
    if None in (nums[n], nums[m], nums[l]):
        return False
    ms = set(param_fibers(doc, m))
    for x in param_fibers(doc, n):
        for y in param_fibers(doc, l):
            if not x <= y:
                continue
            if (max(x) if x else None) != (max(y) if y else None):
                continue
            if (min(x) if x else None) != (min(y) if y else None):
                continue
            xs = sorted(x)
            if all(frozenset(e for e in y if a <= e < b) in ms for a, b in zip(xs, xs[1:])):
                return True
    return False


def expected(doc):
    if "B" in doc:
        k = number([fibers_b(doc, i) for i in doc["I"]], doc["S"])
        return {"number": k, "number_formula": k is not None}
    nums = {a: number(param_fibers(doc, a), doc["S"]) for a in doc["A"]}
    triples = list(itertools.product(doc["A"], repeat=3))
    return {
        "numbers": {str(a): nums[a] for a in doc["A"]},
        "arithmetic": all(k in nums.values() for k in range(len(doc["S"]) + 1)),
        "addition": [list(t) for t in triples if add_holds(doc, nums, *t)],
        "multiplication": [list(t) for t in triples if mul_holds(doc, nums, *t)],
    }


def binary(S, fibers, note):
    return {"note": note, "S": S, "I": list(range(len(fibers))), "B": [[x, i] for i, f in enumerate(fibers) for x in sorted(f)]}


def ternary(S, I, A, table, note):
    rows = [[x, i, a] for a in A for i in I for x in sorted(table.get((a, i), ()))]
    return {"note": note, "S": S, "I": I, "A": A, "C": rows}


def canonical(S, I, A):
    table = {}
    for p, a in enumerate(A):
        k = p % (len(S) + 1)
        subs = [sorted(c) for c in itertools.combinations(S, k)]
        for pos, i in enumerate(I):
            table[(a, i)] = subs[pos % len(subs)]
    return table


def regression():
    rng = random.Random(424242)
    out = []
    out.append(binary([0, 1, 2], [{0, 1}, {0, 2}, {1, 2}], "all 2-subsets"))
    out.append(binary([0, 1, 2], [set()], "the single empty fiber"))
    out.append(binary([0, 1, 2], [{0, 1}, {0, 2}], "one 2-subset missing"))
    out.append(binary([0, 1, 2], [{0}, {0, 1}], "strict inclusion"))
    out.append(binary([0, 1, 2], [{0}, {1}], "exchange to {2} fails"))
    out.append(binary([0, 1, 2, 3], [{0}, {1}, {2}, {3}, {1}, {0}], "singletons with repeats"))
    out.append(binary([1, 3, 5], [{1, 4}, {3, 6}, {5}], "fibers cut down to S give the singletons"))
    out.append(binary([0, 1, 2, 3], [{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}], "five of six 2-subsets"))
    out.append(binary([0, 1, 2, 3], [{0, 1, 2, 3}, {0, 1, 2, 3}], "the whole carrier"))
    fam = [set(rng.sample(range(5), rng.randint(0, 5))) for _ in range(6)]
    out.append(binary([0, 1, 2, 3, 4], fam, "random family"))

    S3, I3, A4 = [0, 1, 2], [0, 1, 2], [0, 1, 2, 3]
    out.append(ternary(S3, I3, A4, canonical(S3, I3, A4), "canonical realiser on three elements"))
    S2, I2, A3 = [0, 1], [0, 1], [0, 1, 2]
    out.append(ternary(S2, I2, A3, canonical(S2, I2, A3), "canonical realiser on two elements"))
    broken = canonical(S3, I3, A4)
    broken[(1, 2)] = [0, 1]
    out.append(ternary(S3, I3, A4, broken, "canonical with one fiber of parameter 1 spoiled"))
    out.append(ternary(S3, I3, A4, {}, "everywhere false"))
    skip = {(a, i): ([] if a == 0 else sorted(c)) for a in A4 for i, c in zip(I3, itertools.combinations(S3, 2))}
    out.append(ternary(S3, I3, A4, skip, "only the 0- and 2-element numbers"))
    S4, I6, A5 = [0, 1, 2, 3], [0, 1, 2, 3, 4, 5], [0, 1, 2, 3, 4]
    out.append(ternary(S4, I6, A5, canonical(S4, I6, A5), "canonical realiser on four elements"))
    shuffled = canonical(S3, I3, [3, 2, 1, 0])
    out.append(ternary(S3, I3, A4, shuffled, "canonical with parameters reversed"))
    for n in range(3):
        table = canonical(S3, I3, A4)
        for _ in range(n + 1):
            table[(rng.choice(A4), rng.choice(I3))] = sorted(rng.sample(S3, rng.randint(0, 3)))
        out.append(ternary(S3, I3, A4, table, "canonical with %d random fibers" % (n + 1)))
    return out


def dump(doc):
    lines = ['  "%s": %s' % (k, json.dumps(doc[k], sort_keys=True)) for k in sorted(doc)]
    return "{\n" + ",\n".join(lines) + "\n}\n"


def main():
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "fixtures" / "structures"
    (root / "regression").mkdir(parents=True, exist_ok=True)
    fib1 = {"note": "fiber 3 is {0,2}", "S": [0, 1, 2], "I": [0, 1, 2, 3],
            "B": [[0, 0], [1, 1], [2, 2], [0, 3], [2, 3], [3, 3]], "U": 3}
    fib1["expected"] = expected(fib1)
    (root / "fib1.json").write_text(dump(fib1))
    for n, doc in enumerate(regression()):
        doc["expected"] = expected(doc)
        (root / "regression" / ("r%02d.json" % n)).write_text(dump(doc))


if __name__ == "__main__":
    main()
