"""Writes the fixture corpora and their golden summaries.

Independent of the Rust code: faces are enumerated with itertools, components
with a plain BFS, and Betti numbers from GF(2) ranks by numpy elimination.
Run from this directory: python3 make_golden.py
"""
import itertools
import json
import random

import numpy as np

CAP = 20
SKELETON = 2
X_MIN = 10


def small_corpus():
    return [
        ["Ada", "Grace", "Edsger"],
        ["Grace", "Edsger", "Barbara"],
        ["Barbara", "Donald"],
        ["Donald", "Ada"],
        ["Grace", "Ada"],
        ["Alan", "Kurt"],
        ["Kurt", "Emmy", "Alan"],
        ["Emmy", "Emmy", "Sofia"],
        ["Ada", "Grace", "Edsger"],
        ["Hedy"],
        [f"Big{i}" for i in range(22)],
        ["John", "Claude", "Norbert", "Alonzo"],
    ]


def synthetic_corpus():
    rng = random.Random(20240611)
    names = [f"author{i:03d}" for i in range(150)]
    weights = [1.0 / (i + 1) ** 0.8 for i in range(150)]
    docs = []
    for _ in range(220):
        k = min(1 + int(rng.expovariate(0.45)), 24)
        doc = []
        while len(doc) < k:
            a = rng.choices(names, weights)[0]
            if a not in doc:
                doc.append(a)
        docs.append(doc)
    return docs


def gf2_rank(rows, cols):
    m = np.array(cols, dtype=np.uint8).T % 2 if cols else np.zeros((rows, 0), np.uint8)
    m = m.copy()
    r = 0
    for c in range(m.shape[1]):
        piv = next((i for i in range(r, m.shape[0]) if m[i, c]), None)
        if piv is None:
            continue
        m[[r, piv]] = m[[piv, r]]
        for i in range(m.shape[0]):
            if i != r and m[i, c]:
                m[i] ^= m[r]
        r += 1
    return r


def summarize(docs):
    kept = [sorted(set(d)) for d in docs if len(set(d)) <= CAP + 1]
    faces = [set() for _ in range(SKELETON + 1)]
    for d in kept:
        for k in range(SKELETON + 1):
            faces[k].update(itertools.combinations(d, k + 1))
    simplices = [sorted(f) for f in faces]
    V, E = len(simplices[0]), len(simplices[1])
    adj = {v[0]: set() for v in simplices[0]}
    for a, b in simplices[1]:
        adj[a].add(b)
        adj[b].add(a)
    seen, sizes = set(), []
    for v in adj:
        if v in seen:
            continue
        stack, size = [v], 0
        seen.add(v)
        while stack:
            x = stack.pop()
            size += 1
            for y in adj[x] - seen:
                seen.add(y)
                stack.append(y)
        sizes.append(size)
    index = [{s: i for i, s in enumerate(level)} for level in simplices]

    def boundary(k):
        cols = []
        for s in simplices[k]:
            col = [0] * len(simplices[k - 1])
            for face in itertools.combinations(s, k):
                col[index[k - 1][face]] = 1
            cols.append(col)
        return gf2_rank(len(simplices[k - 1]), cols)

    r1, r2 = boundary(1), boundary(2)
    apd = {}
    for d in docs:
        n = len(set(d))
        apd[str(n)] = apd.get(str(n), 0) + 1
    degree_counts = {}
    for v in adj:
        degree_counts[len(adj[v])] = degree_counts.get(len(adj[v]), 0) + 1
    tail = [len(adj[v]) for v in adj if len(adj[v]) >= X_MIN]
    fit = None
    if tail:
        a_hat = 1 + len(tail) / sum(np.log(x / (X_MIN - 0.5)) for x in tail)
        gamma = 1 / (a_hat - 1)
        fit = {"x_min": X_MIN, "n_tail": len(tail), "a_hat": a_hat, "gamma": gamma,
               "beta": 2 * E / V * (1 - gamma)}
    return {
        "authors": V,
        "documents": len(kept),
        "dropped_documents": len(docs) - len(kept),
        "total_authors": len({a for d in docs for a in d}),
        "components": len(sizes),
        "largest_component_size": max(sizes),
        "simplex_counts": [len(s) for s in simplices],
        "mean_vertex_degree": 2 * E / V,
        "betti_0": V - r1,
        "betti_1": E - r1 - r2,
        "authors_per_document": dict(sorted(apd.items(), key=lambda kv: int(kv[0]))),
        "vertex_degree_counts": [[k, degree_counts[k]] for k in sorted(degree_counts)],
        "vertex_fit": fit,
    }


for name, docs in [("small", small_corpus()), ("synthetic", synthetic_corpus())]:
    with open(f"{name}.csv", "w") as f:
        f.writelines(",".join(d) + "\n" for d in docs)
    with open(f"{name}.json", "w") as f:
        json.dump(docs, f)
    with open(f"{name}.golden.json", "w") as f:
        json.dump(summarize(docs), f, indent=2)
        f.write("\n")
