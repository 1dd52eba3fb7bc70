"""Reduced power circuits: sorted node order, comparison, and reduction.

A reduced circuit augments a power circuit with the list of its nodes
sorted by value (all values distinct) and a bit vector whose bit i says
that ``q * e(u_i) == e(u_{i+1})``.  On that structure the value order of
two markings is decided by one digit scan from the most significant node
downward, without evaluating anything; the scan also reports whether the
two values differ by exactly 1.

Reduction (``extend_reduce`` / ``reduce_circuit``) absorbs a set U of
not-yet-reduced nodes into the sorted part one node at a time, in
topological order.  A collision with an existing equal-valued node is
resolved by prolonging the affected chain with a preventive clone and
carrying overflowing digits upward, q-ary style.
"""

from .circuit import Marking, clone_node
from .errors import NotAPowerCircuit, NotReduced, UnknownNode

LT, EQ, GT = -1, 0, 1


class Ordering3:
    """Three-way comparison result plus a |difference| == 1 flag."""

    __slots__ = ("sign", "unit_diff")

    def __init__(self, sign, unit_diff):
        self.sign = sign
        self.unit_diff = unit_diff

    @property
    def is_lt(self):
        return self.sign < 0

    @property
    def is_eq(self):
        return self.sign == 0

    @property
    def is_gt(self):
        return self.sign > 0

    def __repr__(self):
        sym = {LT: "LT", EQ: "EQ", GT: "GT"}[self.sign]
        return "Ordering3(%s, unit_diff=%r)" % (sym, self.unit_diff)

    def __eq__(self, other):
        if isinstance(other, Ordering3):
            return self.sign == other.sign and self.unit_diff == other.unit_diff
        return NotImplemented


class ReducedCircuit:
    """Sorted-node view of a power circuit.

    order[i] is the i-th smallest node, bits[i] flags e(order[i+1]) ==
    q*e(order[i]), and pos is the inverse of order.  Mutations go
    through ``insert_sorted`` so the three stay in sync.
    """

    __slots__ = ("circuit", "order", "bits", "pos", "last_stats")

    def __init__(self, circuit, order=None, bits=None):
        self.circuit = circuit
        self.order = list(order) if order else []
        self.bits = list(bits) if bits else []
        self.pos = {u: i for i, u in enumerate(self.order)}
        self.last_stats = None
        if len(self.bits) != max(0, len(self.order) - 1):
            raise NotReduced("bit vector length does not match node count")

    def __len__(self):
        return len(self.order)

    def insert_sorted(self, u, index, bit_left, bit_right):
        """Splice node u at ``index``; callers supply the two new bits."""
        n = len(self.order)
        self.order.insert(index, u)
        if n == 0:
            pass
        elif index == 0:
            self.bits.insert(0, bit_right)
        elif index == n:
            self.bits.append(bit_left)
        else:
            # the old gap bit is replaced by the two around the new node
            self.bits[index - 1] = bit_left
            self.bits.insert(index, bit_right)
        for i in range(index, len(self.order)):
            self.pos[self.order[i]] = i

    def chain_end(self, index):
        """Index of the last node of the maximal chain through ``index``."""
        i = index
        while i < len(self.bits) and self.bits[i]:
            i += 1
        return i

    def chain_start(self, index):
        i = index
        while i > 0 and self.bits[i - 1]:
            i -= 1
        return i

    def chain_count(self):
        """Number of maximal chains = nodes minus set bits."""
        return len(self.order) - sum(1 for b in self.bits if b)

    def base_chain_length(self):
        """Length of the maximal chain starting at the value-1 node."""
        if not self.order:
            return 0
        return self.chain_end(0) + 1


# -- digit scan comparison -------------------------------------------


def _scan(view, delta):
    """Sign of ``sum(delta[u] * e(u))`` over a reduced view, plus unit flag.

    ``delta`` maps nodes to digits of magnitude <= 2q-2.  Works from the
    most significant digit down: a digit of magnitude >= 2 decides the
    sign outright; a lone +-1 decides unless the next lower exponent
    (present exactly when the chain bit below is set) carries a digit of
    the opposite sign, in which case the two merge into a single digit
    one position down and the scan continues.
    """
    order, bits = view.order, view.bits
    pos = view.pos
    q = view.circuit.q
    top = -1
    for u, d in delta.items():
        if d:
            i = pos[u]
            if i > top:
                top = i
    if top < 0:
        return Ordering3(EQ, False)
    i = top
    cur = delta.get(order[i], 0)
    while True:
        if cur == 0:
            if i == 0:
                return Ordering3(EQ, False)
            i -= 1
            cur = delta.get(order[i], 0)
            continue
        if cur > 1 or cur < -1:
            return Ordering3(GT if cur > 0 else LT, False)
        # |cur| == 1
        if i == 0:
            # order[0] is the unique value-1 leaf, so the sum is cur itself
            return Ordering3(GT if cur > 0 else LT, True)
        if not bits[i - 1]:
            return Ordering3(GT if cur > 0 else LT, False)
        below = delta.get(order[i - 1], 0)
        if below == 0 or (below > 0) == (cur > 0):
            return Ordering3(GT if cur > 0 else LT, False)
        cur = cur * q + below
        i -= 1


def _delta_of(a, b):
    """Digit map of a - b without materialising a marking."""
    delta = dict(a)
    for u, d in b.items():
        nd = delta.get(u, 0) - d
        if nd:
            delta[u] = nd
        else:
            delta.pop(u, None)
    return delta


def _digits_of(m):
    return m.digits if isinstance(m, Marking) else m


def compare(view, k, m):
    """Ordering of e(K) relative to e(M): GT means e(K) > e(M).

    Single digit scan, no evaluation; ``unit_diff`` is set exactly when
    ``|e(K) - e(M)| == 1``.
    """
    return _scan(view, _delta_of(_digits_of(k), _digits_of(m)))


def sign_of(view, m):
    """Sign of e(M) in {-1, 0, +1} (comparison against the empty marking)."""
    return _scan(view, dict(_digits_of(m))).sign


def is_divisible_by_power(view, m, k):
    """Whether q**e(K) divides e(M).

    The empty marking (value 0) is divisible by everything.  Otherwise
    q**e(K) | e(M) iff e(K) <= e(L_u) for the minimal-value node u of
    supp M, which is a single marking comparison.
    """
    dm = _digits_of(m)
    dk = _digits_of(k)
    if not dm:
        return True
    u = min(dm, key=view.pos.__getitem__)
    lam = view.circuit.succ[u]
    return _scan(view, _delta_of(lam, dk)).sign >= 0


# -- base chain prolongation (procedure PBC) -------------------------


def prolong_base_chain(rc):
    """Append one node to the base chain, keeping the circuit reduced.

    Finds the smallest i with e(v_i) > q**i (the base chain length),
    inserts a fresh node whose successor marking spells i in base q over
    the base chain, and fixes the two neighbouring bits.
    """
    circuit = rc.circuit
    q = circuit.q
    i = rc.base_chain_length()
    succ = {}
    rep = i
    p = 0
    while rep:
        if rep % q:
            succ[rc.order[p]] = rep % q
        rep //= q
        p += 1
    u = circuit.new_node(succ)
    bit_left = i > 0  # e(u) = q**i = q * e(v_{i-1})
    bit_right = False
    if i < len(rc.order):
        right = _scan(rc, _delta_of(circuit.succ[rc.order[i]], succ))
        bit_right = right.is_gt and right.unit_diff
    rc.insert_sorted(u, i, bit_left, bit_right)
    return u


# -- reduction (procedures ERed / Red) --------------------------------


def _topological_order(circuit, unreduced):
    """Successor-first DFS postorder of U, ties by ascending node id."""
    order = []
    seen = set()
    for start in sorted(unreduced):
        if start in seen:
            continue
        stack = [(start, None)]
        while stack:
            u, targets = stack.pop()
            if targets is None:
                if u in seen:
                    continue
                seen.add(u)
                targets = sorted(v for v in circuit.succ[u] if v in unreduced)
                stack.append((u, targets))
                for v in reversed(targets):
                    if v not in seen:
                        stack.append((v, None))
            else:
                order.append(u)
    return order


def _increment_successor_marking(rc, succ):
    """Add 1 to the value of the digit map ``succ`` along the base chain.

    Walks the base chain for the first digit below q-1, zeroing the
    saturated prefix; prolongs the base chain first when every digit up
    to its top is q-1.
    """
    q = rc.circuit.q
    ell = 0
    while True:
        if ell >= rc.base_chain_length():
            prolong_base_chain(rc)
        node = rc.order[ell]
        if succ.get(node, 0) < q - 1:
            break
        ell += 1
    for j in range(ell):
        succ.pop(rc.order[j], None)
    node = rc.order[ell]
    d = succ.get(node, 0) + 1
    if d:
        succ[node] = d
    else:
        succ.pop(node, None)


def _carry_into(view, digits, start_index, amount, q):
    """Add ``amount`` to digits[order[start_index]] with q-ary carries.

    A digit overflowing D is rewritten as beta*q + gamma with gamma
    keeping the sign of the overflowing value; beta moves one chain
    position up.  Returns the number of carry steps (cost accounting
    against the potential C = sum |M(v)|).
    """
    order = view.order
    steps = 0
    i = start_index
    add = amount
    while add:
        u = order[i]
        alpha = digits.get(u, 0) + add
        if -q < alpha < q:
            if alpha:
                digits[u] = alpha
            else:
                digits.pop(u, None)
            return steps
        beta = alpha // q if alpha > 0 else -((-alpha) // q)
        gamma = alpha - beta * q
        if gamma:
            digits[u] = gamma
        else:
            digits.pop(u, None)
        add = beta
        i += 1
        steps += 1
    return steps


class ReduceStats:
    """Counters recorded by one extend_reduce run (growth assertions)."""

    __slots__ = ("u_size", "created", "deleted", "carry_steps", "initial_digit_mass")

    def __init__(self):
        self.u_size = 0
        self.created = 0
        self.deleted = 0
        self.carry_steps = 0
        self.initial_digit_mass = 0


def extend_reduce(rc, unreduced, markings=()):
    """Absorb the node set ``unreduced`` into the reduced part of rc.

    ``rc`` describes the already-reduced subgraph; edges from the reduced
    part into U must not exist (checked).  Every marking in ``markings``
    is rewritten in place so its value is preserved; markings supported
    entirely inside the reduced part are preserved automatically and
    need not be passed.  Growth of the reduced part is bounded by 2|U|
    (asserted).  Raises NotAPowerCircuit when a node with negative
    successor value turns up.
    """
    circuit = rc.circuit
    q = circuit.q
    unreduced = set(unreduced)
    markings = list(markings)
    stats = ReduceStats()
    stats.u_size = len(unreduced)
    for u in unreduced:
        if u not in circuit.succ:
            raise UnknownNode(u)
        stats.initial_digit_mass += sum(abs(d) for d in circuit.succ[u].values())
    for v in rc.order:
        for t in circuit.succ[v]:
            if t in unreduced:
                raise NotReduced("edge from the reduced part into U")
    for m in markings:
        m.require_alive()
        stats.initial_digit_mass += sum(abs(d) for d in m.digits.values())

    size_before = len(rc.order)
    for u_i in _topological_order(circuit, unreduced):
        unreduced.discard(u_i)
        lam = circuit.succ[u_i]
        if not rc.order:
            # a topologically minimal node over an empty reduced part is a leaf
            rc.insert_sorted(u_i, 0, False, False)
            continue
        if _scan(rc, dict(lam)).sign < 0:
            raise NotAPowerCircuit("node %r has e(L) < 0" % (u_i,))
        # binary search for the first j with e(u_i) <= e(v_j); nodes are
        # compared through their successor markings, which both live in
        # the reduced part
        lo, hi = 0, len(rc.order)
        collision = None
        while lo < hi:
            mid = (lo + hi) // 2
            c = _scan(rc, _delta_of(lam, circuit.succ[rc.order[mid]]))
            if c.sign == 0:
                collision = mid
                break
            if c.sign < 0:
                hi = mid
            else:
                lo = mid + 1
        if collision is None:
            j = lo
            bit_left = False
            if j > 0:
                left = _scan(rc, _delta_of(lam, circuit.succ[rc.order[j - 1]]))
                bit_left = left.is_gt and left.unit_diff
            bit_right = False
            if j < len(rc.order):
                right = _scan(rc, _delta_of(circuit.succ[rc.order[j]], lam))
                bit_right = right.is_gt and right.unit_diff
            rc.insert_sorted(u_i, j, bit_left, bit_right)
            continue
        # collision: e(u_i) == e(v_j).  Preventively prolong the chain
        # through v_j with a clone of its top node multiplied by q, then
        # replace u_i by v_j in all tracked digit maps, carrying upward.
        j = collision
        v_j = rc.order[j]
        v_k = rc.order[rc.chain_end(j)]
        v = clone_node(circuit, v_k)
        stats.created += 1
        before_pbc = len(rc.order)
        _increment_successor_marking(rc, circuit.succ[v])
        if len(rc.order) > before_pbc:
            stats.created += 1  # the increment prolonged the base chain
        insert_at = rc.pos[v_k] + 1
        bit_right = False
        if insert_at < len(rc.order):
            right = _scan(rc, _delta_of(circuit.succ[rc.order[insert_at]], circuit.succ[v]))
            bit_right = right.is_gt and right.unit_diff
        rc.insert_sorted(v, insert_at, True, bit_right)
        start = rc.pos[v_j]
        digit_maps = [m.digits for m in markings]
        digit_maps.extend(circuit.succ[w] for w in unreduced)
        for digits in digit_maps:
            if u_i in digits:
                d = digits.pop(u_i)
                stats.carry_steps += _carry_into(rc, digits, start, d, q)
        circuit.delete_node(u_i)
        stats.deleted += 1

    growth = len(rc.order) - size_before
    assert growth <= 2 * stats.u_size, "reduction growth bound violated"
    rc.last_stats = stats
    return rc, markings


def reduce_circuit(circuit, markings=()):
    """Reduce a whole circuit (procedure Red): ERed over an empty reduced part.

    Returns the reduced view plus the adjusted markings; the final node
    count is bounded by twice the original (asserted).  Raises
    NotAPowerCircuit for graphs violating the power circuit condition.
    """
    original = len(circuit.succ)
    rc = ReducedCircuit(circuit)
    rc, marks = extend_reduce(rc, set(circuit.succ), list(markings))
    assert len(rc.order) <= 2 * original, "Red growth bound violated"
    return rc, marks


def is_power_circuit(circuit):
    """Whether the graph satisfies the power circuit condition (no abort).

    Runs reduction on a throwaway copy; cyclic graphs and graphs with a
    negative successor value both yield False.
    """
    probe = circuit.copy()
    if not probe.is_acyclic():
        return False
    try:
        reduce_circuit(probe)
    except NotAPowerCircuit:
        return False
    return True


def verify_reduced(rc, node_value=None):
    """Independent O(n^2) checker for the ReducedCircuit invariants.

    Confirms distinctness, sortedness and bit correctness with the
    comparison scan, and against exact node values when a ``node_value``
    oracle (circuit, node) -> int is supplied.
    """
    circuit = rc.circuit
    assert sorted(rc.order) == sorted(circuit.succ), "order omits or invents nodes"
    assert len(rc.bits) == max(0, len(rc.order) - 1)
    assert rc.pos == {u: i for i, u in enumerate(rc.order)}
    for i in range(len(rc.order) - 1):
        a, b = rc.order[i], rc.order[i + 1]
        c = _scan(rc, _delta_of(circuit.succ[b], circuit.succ[a]))
        assert c.sign > 0, "order not strictly sorted at %d" % i
        assert rc.bits[i] == (c.is_gt and c.unit_diff), "bit %d wrong" % i
    if node_value is not None:
        values = [node_value(circuit, u) for u in rc.order]
        for i in range(len(values) - 1):
            assert values[i] < values[i + 1]
            assert rc.bits[i] == (values[i] * circuit.q == values[i + 1])
    return True
