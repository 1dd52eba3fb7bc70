"""pc-core: graph store, markings, evaluation oracle, cloning arithmetic."""

import pytest

from powercircuits.circuit import (
    Marking,
    add_markings,
    clone_marking,
    clone_node,
    const_marking,
    eval_marking,
    eval_node,
    mult_by_power,
    negate,
    new_circuit,
    tow,
)
from powercircuits.errors import (
    CircuitMismatch,
    ConsumedMarking,
    InvalidBase,
    NotAPowerCircuit,
    Overflow,
    UnknownNode,
)

from .figures import (
    fig_add_7_35,
    fig_clone_45,
    fig_graph_eval,
    fig_mult_6_5,
    fig_pc_29,
    fig_tower_chain,
)
from .oracles import naive_marking_value, random_circuit, random_marking, rng_for


def test_new_circuit_empty():
    c = new_circuit(2)
    assert len(c) == 0
    assert c.q == 2


def test_new_circuit_digit_interval():
    c = new_circuit(3)
    for d in (-2, -1, 1, 2):
        c.check_digit(d)
    with pytest.raises(ValueError):
        c.check_digit(3)
    with pytest.raises(ValueError):
        c.check_digit(-3)


@pytest.mark.parametrize("bad", [1, 0, -5, 2.0, True])
def test_new_circuit_invalid_base(bad):
    with pytest.raises(InvalidBase):
        new_circuit(bad)


def test_eval_fig2_is_29():
    c, _, m = fig_pc_29()
    assert eval_marking(c, m) == 29


def test_eval_empty_marking():
    c = new_circuit(2)
    assert eval_marking(c, Marking(c)) == 0


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_eval_tower_chain(q, n):
    if tow_overflows(q, n):
        return
    c, m = fig_tower_chain(q, n)
    assert eval_marking(c, m, max_bits=1 << 20) == tow(q, n, max_bits=1 << 20)


def tow_overflows(q, n):
    try:
        tow(q, n, max_bits=1 << 20)
    except Overflow:
        return True
    return False


def test_eval_overflow_guard():
    c, m = fig_tower_chain(2, 6)
    with pytest.raises(Overflow):
        eval_marking(c, m, max_bits=4096)


def test_eval_node_values():
    c, (u1, u2, u3, u4, u5) = fig_graph_eval()
    assert eval_node(c, u1) == 1
    assert eval_node(c, u2) == 3
    assert eval_node(c, u3) == 9
    assert eval_node(c, u4) == 9
    with pytest.raises(NotAPowerCircuit):
        eval_node(c, u5)


def test_eval_node_leaf():
    c = new_circuit(5)
    u = c.new_node()
    assert eval_node(c, u) == 1


def test_tow_values():
    assert tow(2, 0) == 1
    assert tow(2, 3) == 16
    assert tow(3, 2) == 27
    with pytest.raises(Overflow):
        tow(2, 6)


def test_clone_leaf():
    c = new_circuit(2)
    u = c.new_node()
    v = clone_node(c, u)
    assert v != u
    assert eval_node(c, v) == 1


def test_clone_unknown_node():
    c = new_circuit(2)
    with pytest.raises(UnknownNode):
        clone_node(c, 99)


def test_clone_fig4_node9():
    c, (n1, n3, n9, n27), _ = fig_clone_45()
    v = clone_node(c, n9)
    assert c.succ[v] == {n1: -1, n3: +1}
    assert eval_node(c, v) == 9
    # no incoming arcs on the clone
    assert all(v not in edges for u, edges in c.succ.items() if u != v)


def test_clone_marking_empty():
    c = new_circuit(3)
    m = Marking(c)
    cm = clone_marking(c, m)
    assert cm.digits == {}
    assert m.alive


def test_clone_marking_fig4():
    c, (n1, n3, n9, n27), m = fig_clone_45()
    before = set(c.succ)
    cm = clone_marking(c, m)
    fresh = set(c.succ) - before
    assert set(cm.digits) == fresh and len(fresh) == 2
    assert sorted(cm.digits.values()) == [-1, 2]
    assert eval_marking(c, cm) == eval_marking(c, m) == 45


def test_clone_preserves_value_random():
    rng = rng_for("clone-values")
    for _ in range(120):
        q = rng.choice([2, 3, 5])
        c, nodes = random_circuit(rng, q, 8)
        m = Marking(c, random_marking(rng, c, nodes))
        want = naive_marking_value(c, dict(m.digits))
        cm = clone_marking(c, m)
        assert naive_marking_value(c, dict(cm.digits)) == want
        u = rng.choice(nodes)
        assert eval_node(c, clone_node(c, u), max_bits=1 << 16) == eval_node(
            c, u, max_bits=1 << 16
        )


def test_add_fig5():
    c, (n1, n2, n4, n16, n32, n2048), k, m = fig_add_7_35()
    assert eval_marking(c, k) == 7
    assert eval_marking(c, m) == 35
    r = add_markings(c, k, m)
    assert eval_marking(c, r) == 42
    # the value-1 node cancelled, node 4 appears once original once clone
    assert n1 not in r.digits
    clones = [u for u in r.digits if u not in (n1, n2, n4, n16, n32, n2048)]
    assert len(clones) == 1
    assert r.digits[n4] == +1 and r.digits[clones[0]] == +1
    assert not k.alive and not m.alive
    with pytest.raises(ConsumedMarking):
        eval_marking(c, k)


def test_add_identity():
    c, _, m = fig_pc_29()
    empty = Marking(c)
    r = add_markings(c, m, empty)
    assert eval_marking(c, r) == 29


def test_add_random_markings():
    rng = rng_for("add-random")
    for _ in range(150):
        q = rng.choice([2, 3, 5])
        c, nodes = random_circuit(rng, q, 10)
        k = Marking(c, random_marking(rng, c, nodes))
        m = Marking(c, random_marking(rng, c, nodes))
        want = naive_marking_value(c, dict(k.digits)) + naive_marking_value(
            c, dict(m.digits)
        )
        r = add_markings(c, k, m)
        assert naive_marking_value(c, dict(r.digits)) == want
        assert c.is_acyclic()


def test_mult_fig6():
    c, _, k, m = fig_mult_6_5()
    assert eval_marking(c, k) == 6
    assert eval_marking(c, m) == 5
    r = mult_by_power(c, k, m)
    assert eval_marking(c, r) == 192
    assert c.is_acyclic()


def test_mult_identity_exponent():
    c, _, m = fig_pc_29()
    r = mult_by_power(c, m, Marking(c))
    assert eval_marking(c, r) == 29


def test_mult_random():
    rng = rng_for("mult-random")
    for _ in range(120):
        q = rng.choice([2, 3])
        c, nodes = random_circuit(rng, q, 6)
        k = Marking(c, random_marking(rng, c, nodes, density=0.4))
        m = Marking(c, random_marking(rng, c, nodes, density=0.3))
        vk = naive_marking_value(c, dict(k.digits))
        vm = naive_marking_value(c, dict(m.digits))
        r = mult_by_power(c, k, m)
        assert c.is_acyclic()
        if vm >= -64:
            got = naive_marking_value(c, dict(r.digits))
            assert got == vk * q**vm if vm >= 0 else got * q ** (-vm) == vk


def test_mult_no_multi_edges():
    rng = rng_for("mult-edges")
    for _ in range(60):
        c, nodes = random_circuit(rng, 2, 5)
        k = Marking(c, random_marking(rng, c, nodes, density=0.5))
        m = Marking(c, random_marking(rng, c, nodes, density=0.5))
        mult_by_power(c, k, m)
        # succ maps are dicts, so a multi-edge would have collapsed; check
        # instead that every digit is legal and targets exist
        for u, edges in c.succ.items():
            for v, d in edges.items():
                assert v in c.succ
                assert -c.q < d < c.q and d != 0


def test_negate():
    c, _, m = fig_pc_29()
    negate(m)
    assert eval_marking(c, m) == -29
    digits_before = dict(m.digits)
    negate(negate(m))
    assert m.digits == digits_before
    empty = Marking(c)
    assert negate(empty).digits == {}


def test_const_marking():
    c = new_circuit(2)
    assert const_marking(c, 0).digits == {}
    one = const_marking(c, 1)
    assert len(one.digits) == 1
    assert eval_marking(c, one) == 1
    minus7 = const_marking(c, -7)
    assert eval_marking(c, minus7) == -7


@pytest.mark.parametrize("q", [2, 3, 5])
def test_const_marking_random(q):
    rng = rng_for("const-%d" % q)
    c = new_circuit(q)
    for _ in range(40):
        n = rng.randint(-500, 500)
        assert eval_marking(c, const_marking(c, n)) == n


def test_markings_from_other_circuit_rejected():
    c1, _, m1 = fig_pc_29()
    c2, _, m2 = fig_pc_29()
    with pytest.raises(CircuitMismatch):
        add_markings(c1, m1, m2)
    with pytest.raises(CircuitMismatch):
        eval_marking(c1, m2)


def test_op_cost_independent_of_circuit_size():
    """Arithmetic cost depends on the touched supports, not on |Gamma|."""

    def run(padding):
        c = new_circuit(2)
        for _ in range(padding):
            c.new_node()
        a = c.new_node()
        b = c.new_node({a: 1})
        k = Marking(c, {a: 1, b: 1})
        m = Marking(c, {a: 1, b: -1})
        c.op_cost = 0
        r = add_markings(c, k, m)
        m2 = clone_marking(c, r)
        negate(m2)
        mult_by_power(c, r, m2)
        return c.op_cost

    assert run(0) == run(500)


def test_tower_chain_is_linear_size():
    for q in (2, 3):
        for n in range(5):
            c, m = fig_tower_chain(q, n)
            assert len(c) == n + 1
            if q == 2 and n == 4:
                assert eval_marking(c, m, max_bits=1 << 17) == 65536
