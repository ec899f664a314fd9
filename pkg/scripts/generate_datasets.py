"""Regenerate the edge lists bundled under latnet/datasets.

zachary and florentine come from networkx. village is a synthetic
stand-in (the survey data it mimics is not redistributable): a planted
partition graph with 12 blocks of sizes 1-16 over 99 nodes, tuned to a
density near 0.09.
"""

import pathlib

import networkx as nx
import numpy as np

OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "latnet" / "datasets"

BIG_BLOCKS = [16, 14, 12, 11, 10, 9, 8, 7]
SMALL_BLOCKS = [5, 4, 2, 1]
P_IN_BIG = 0.65
P_IN_SMALL = 0.90
P_BETWEEN = 0.03          # between two big blocks
P_BETWEEN_SMALL = 0.005   # any pair involving a small-block member
SEED = 20240811


def write_edges(path, edges, n_nodes):
    with open(path, "w") as fh:
        fh.write(f"# nodes: {n_nodes}\n")
        for i, j in edges:
            fh.write(f"{i} {j}\n")


def main():
    g = nx.karate_club_graph()
    write_edges(OUT / "zachary.txt", sorted(g.edges()), g.number_of_nodes())

    g = nx.florentine_families_graph()
    names = sorted(g.nodes())
    idx = {name: k for k, name in enumerate(names)}
    edges = sorted((min(idx[a], idx[b]), max(idx[a], idx[b])) for a, b in g.edges())
    with open(OUT / "florentine.txt", "w") as fh:
        fh.write(f"# nodes: {len(names)}\n")
        for k, name in enumerate(names):
            fh.write(f"# label {k}: {name}\n")
        for i, j in edges:
            fh.write(f"{i} {j}\n")

    rng = np.random.default_rng(SEED)
    sizes = BIG_BLOCKS + SMALL_BLOCKS
    n = sum(sizes)
    block = np.repeat(np.arange(len(sizes)), sizes)
    small = np.repeat([s in SMALL_BLOCKS and i >= len(BIG_BLOCKS)
                       for i, s in enumerate(sizes)], sizes)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if block[i] == block[j]:
                p = P_IN_SMALL if small[i] else P_IN_BIG
            elif small[i] or small[j]:
                p = P_BETWEEN_SMALL
            else:
                p = P_BETWEEN
            if rng.random() < p:
                edges.append((i, j))
    write_edges(OUT / "village.txt", edges, n)
    print(f"village: {n} nodes, {len(edges)} edges, "
          f"density {len(edges) / (n * (n - 1) / 2):.3f}")


if __name__ == "__main__":
    main()
