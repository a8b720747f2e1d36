"""Converts node/edge lists copied from a TikZ torus picture into a .draw file.

Nodes on the top (y = H) or right (x = W) side of the domain are translates
of the node at the opposite side and become aliases.
"""
import sys


def parse_triples(text):
    return [tuple(int(t) for t in item.split('/')) for item in text.replace('\n', ',').split(',') if item.strip()]


def convert(title, width, height, blacks, whites, edges, labels=(), edge_names=True):
    blacks = parse_triples(blacks)
    whites = parse_triples(whites)
    edges = parse_triples(edges)
    out = [f"# {line}" for line in title.strip().splitlines()]
    out.append(f"domain {width} {height}")
    pos = {}
    for prefix, color, items in (("B", "black", blacks), ("W", "white", whites)):
        for i, x, y in items:
            pos[f"{prefix}{i}"] = (x, y, color)
    canon = {}
    for name, (x, y, color) in pos.items():
        cx, cy = x % width, y % height
        canon.setdefault((cx, cy, color), [])
        canon[(cx, cy, color)].append(name)
    alias_lines = []
    for (cx, cy, color), names in canon.items():
        base = next(n for n in names if pos[n][0] == cx and pos[n][1] == cy)
        out.append(f"node {base} {color} {cx} {cy}")
        for n in names:
            if n != base:
                alias_lines.append(f"alias {n} {base} {pos[n][0]} {pos[n][1]}")
    out.extend(alias_lines)
    for w, b in edges:
        line = f"edge W{w} B{b}"
        if edge_names:
            line += f" name W{w}B{b}"
        out.append(line)
    for name, x, y in labels:
        out.append(f"label {name} {x} {y}")
    return "\n".join(out) + "\n"


if __name__ == "__main__":
    sys.exit("import and call convert()")
