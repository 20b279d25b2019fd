"""Shared network builders for the test suite."""

import numpy as np

from myceliumsim import MyceliumNetwork


def make_y(arm_a=10.0, arm_b=10.0, arm_out=10.0, out_kind="fruit-body"):
    """Two fruit-body arms A, B meeting at junction J, output C behind J.

    Returns (network, ids) with ids keyed a/b/j/c for nodes and sa/sb/sc
    for the corresponding strands.
    """
    net = MyceliumNetwork()
    a = net.add_node((-arm_a, 0.0), "fruit-body")
    b = net.add_node((0.0, arm_b), "fruit-body")
    j = net.add_node((0.0, 0.0), "junction")
    c = net.add_node((arm_out, 0.0), out_kind)
    sa = net.add_strand(a.id, j.id)
    sb = net.add_strand(b.id, j.id)
    sc = net.add_strand(j.id, c.id)
    return net, {
        "a": a.id, "b": b.id, "j": j.id, "c": c.id,
        "sa": sa.id, "sb": sb.id, "sc": sc.id,
    }


def make_path(lengths, end_kind="fruit-body"):
    """Chain fruit-body -> junction(s) -> end_kind along the x axis."""
    net = MyceliumNetwork()
    x = 0.0
    prev = net.add_node((x, 0.0), "fruit-body")
    ids = [prev.id]
    for i, length in enumerate(lengths):
        x += float(length)
        kind = end_kind if i == len(lengths) - 1 else "junction"
        node = net.add_node((x, 0.0), kind)
        net.add_strand(prev.id, node.id)
        ids.append(node.id)
        prev = node
    return net, ids


def random_tree(rng, n_extra=6, n_inputs=1, span_mm=60.0, min_len_mm=2.0):
    """Random tree with terminal leaves; first n_inputs leaves are fruit-bodies.

    Every internal node is a junction; every leaf is a terminal (fruit-body
    for the chosen inputs, tip otherwise). Returns (network, input_ids,
    terminal_ids). Strand lengths stay >= min_len_mm so the default
    coincidence window is shorter than any traversal.
    """
    assert n_extra >= 2, "need at least two extra nodes to reach two leaves"
    while True:
        net = MyceliumNetwork()
        root = net.add_node((0.0, 0.0), "junction")
        positions = {root.id: np.zeros(2)}
        for _ in range(n_extra):
            parent = int(rng.choice(list(net.nodes)))
            for _ in range(100):
                pos = rng.uniform(-span_mm, span_mm, size=2)
                if np.linalg.norm(pos - positions[parent]) >= min_len_mm:
                    break
            node = net.add_node(tuple(float(v) for v in pos), "junction")
            positions[node.id] = pos
            net.add_strand(parent, node.id)
        leaves = [nid for nid in net.nodes if net.degree(nid) <= 1]
        if len(leaves) > n_inputs:
            break
    for k, nid in enumerate(leaves):
        net.nodes[nid].kind = "fruit-body" if k < n_inputs else "tip"
    return net, leaves[:n_inputs], leaves
