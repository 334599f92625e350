"""Reference evaluators that share no code with the package."""

from itertools import product

# Wolfram's icon order: the rule number's binary digits, most significant
# first, are the outputs for these neighbourhoods.
ICON_ORDER = ("111", "110", "101", "100", "011", "010", "001", "000")


def rule_lookup(rule):
    digits = format(rule, "08b")
    return {pattern: int(bit) for pattern, bit in zip(ICON_ORDER, digits)}


def evolve(rule, row, steps):
    """Space-time diagram of an elementary CA on a ring, one dict lookup per cell."""
    table = rule_lookup(rule)
    rows = [list(row)]
    for _ in range(steps):
        prev = rows[-1]
        n = len(prev)
        rows.append([table[f"{prev[i - 1]}{prev[i]}{prev[(i + 1) % n]}"] for i in range(n)])
    return [tuple(r) for r in rows]


def centre_row(e):
    row = [0] * e
    row[e // 2] = 1
    return tuple(row)


def zero_loss_rules(row, steps, end):
    return [r for r in range(256) if evolve(r, row, steps)[-1] == tuple(end)]


def separates(weights, bias, patterns):
    return all((sum(a * b for a, b in zip(weights, x)) + bias > 0) == bool(t) for x, t in patterns)


def grid_separator(patterns, lo=-2.0, hi=2.0, step=0.25):
    """Search a weight grid for a strict-threshold separator; None if there is none."""
    n = round((hi - lo) / step)
    values = [lo + i * step for i in range(n + 1)]
    for w1, w2, b in product(values, repeat=3):
        if separates((w1, w2), b, patterns):
            return (w1, w2), b
    return None


TRUTH_TABLES = {
    "AND": (0, 0, 0, 1),
    "OR": (0, 1, 1, 1),
    "NAND": (1, 1, 1, 0),
    "NOR": (1, 0, 0, 0),
    "XOR": (0, 1, 1, 0),
}
INPUTS = ((0, 0), (0, 1), (1, 0), (1, 1))


def patterns_for(name):
    return list(zip(INPUTS, TRUTH_TABLES[name]))
