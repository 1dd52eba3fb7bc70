"""Base-q power circuits: the graph store, markings, and cloning arithmetic.

A power circuit over a base q >= 2 is a directed acyclic edge-labelled
graph without multi-edges.  Edge labels and marking digits come from the
digit set D = {-q+1, ..., q-1}.  Each node u evaluates to
``e(u) = q ** e(L_u)`` where L_u is the successor marking formed by the
outgoing edges of u; a marking M evaluates to ``sum(M(u) * e(u))``.
Leaves evaluate to 1.  Values grow like towers of q, so evaluation is a
guarded test oracle only (see ``eval_marking``); the solver stack never
evaluates anything.

Representation: ``PowerCircuit.succ[u]`` is the sparse map of u's
outgoing edges (target -> nonzero digit).  That map *is* the successor
marking L_u, which keeps cloning and reduction carries cheap.  Node ids
are ints, handed out once and never reused after deletion.
"""

from .errors import (
    CircuitMismatch,
    ConsumedMarking,
    InvalidBase,
    NotAPowerCircuit,
    Overflow,
    UnknownNode,
)

DEFAULT_MAX_BITS = 4096


class PowerCircuit:
    """Mutable power circuit graph over a fixed base q.

    Only structural operations live here; ordering/reduction state is
    layered on top by ``reduction.ReducedCircuit`` and ``treed``.
    """

    __slots__ = ("q", "succ", "_next_id", "op_cost")

    def __init__(self, q):
        if not isinstance(q, int) or isinstance(q, bool) or q < 2:
            raise InvalidBase("base must be an integer >= 2, got %r" % (q,))
        self.q = q
        self.succ = {}
        self._next_id = 0
        # running count of nodes/edges touched by arithmetic operations;
        # tests assert this never depends on the circuit size
        self.op_cost = 0

    # -- structure ---------------------------------------------------

    def __len__(self):
        return len(self.succ)

    def __contains__(self, u):
        return u in self.succ

    def nodes(self):
        return self.succ.keys()

    def check_digit(self, d):
        if not (-self.q < d < self.q):
            raise ValueError("digit %d outside D for q=%d" % (d, self.q))
        return d

    def new_node(self, successors=None):
        """Add a fresh node; ``successors`` maps existing nodes to digits."""
        u = self._next_id
        self._next_id += 1
        edges = {}
        if successors:
            for v, d in successors.items():
                if v not in self.succ:
                    raise UnknownNode("edge target %r does not exist" % (v,))
                if d != 0:
                    self.check_digit(d)
                    edges[v] = d
        self.succ[u] = edges
        return u

    def new_node_with_id(self, u, successors=None):
        """Add a node under an explicit id (used by the file loader)."""
        if u in self.succ:
            raise ValueError("node id %r already present" % (u,))
        edges = {}
        if successors:
            for v, d in successors.items():
                if d != 0:
                    self.check_digit(d)
                    edges[v] = d
        self.succ[u] = edges
        if u >= self._next_id:
            self._next_id = u + 1
        return u

    def delete_node(self, u):
        """Remove a node; the id is retired and never reused."""
        if u not in self.succ:
            raise UnknownNode(u)
        del self.succ[u]

    def copy(self):
        other = PowerCircuit(self.q)
        other.succ = {u: dict(e) for u, e in self.succ.items()}
        other._next_id = self._next_id
        return other

    def is_acyclic(self):
        """Check acyclicity by iterative DFS (invariant checker helper)."""
        WHITE, GRAY, BLACK = 0, 1, 2
        color = dict.fromkeys(self.succ, WHITE)
        for start in self.succ:
            if color[start] != WHITE:
                continue
            stack = [(start, iter(self.succ[start]))]
            color[start] = GRAY
            while stack:
                u, it = stack[-1]
                advanced = False
                for v in it:
                    if color[v] == GRAY:
                        return False
                    if color[v] == WHITE:
                        color[v] = GRAY
                        stack.append((v, iter(self.succ[v])))
                        advanced = True
                        break
                if not advanced:
                    color[u] = BLACK
                    stack.pop()
        return True


class Marking:
    """Sparse node -> digit map with a value e(M) = sum M(u)*e(u).

    Digits are kept in D\\{0}; zero digits are never stored, so the
    support equals the stored keys.  A marking is tied to one circuit
    and becomes invalid once consumed by ``add_markings`` or
    ``mult_by_power`` (the paper's operations destroy their operands).
    """

    __slots__ = ("circuit", "digits", "alive", "_leaf")

    def __init__(self, circuit, digits=None):
        self.circuit = circuit
        self.digits = {}
        self.alive = True
        self._leaf = None  # set by treed registration
        if digits:
            for u, d in digits.items():
                self.set_digit(u, d)

    def require_alive(self):
        if not self.alive:
            raise ConsumedMarking("marking was consumed by a previous operation")

    def digit(self, u):
        return self.digits.get(u, 0)

    def set_digit(self, u, d):
        if u not in self.circuit.succ:
            raise UnknownNode(u)
        if d == 0:
            self.digits.pop(u, None)
        else:
            self.circuit.check_digit(d)
            self.digits[u] = d

    def support(self):
        return self.digits.keys()

    def __len__(self):
        return len(self.digits)

    def __repr__(self):
        state = "" if self.alive else " (consumed)"
        return "<Marking %s%s>" % (dict(sorted(self.digits.items())), state)


def new_circuit(q):
    """Create an empty power circuit with base q (InvalidBase if q < 2)."""
    return PowerCircuit(q)


def _check_operands(circuit, *markings):
    for m in markings:
        m.require_alive()
        if m.circuit is not circuit:
            raise CircuitMismatch("marking belongs to a different circuit")


# -- evaluation oracle ----------------------------------------------


def _node_values(circuit, needed, max_bits):
    """Exact node values for ``needed`` and everything below them.

    Raises NotAPowerCircuit when some e(L_u) < 0 is encountered and
    Overflow when an exponent would push a node value past max_bits
    bits.  Cyclic graphs are rejected as NotAPowerCircuit.
    """
    q = circuit.q
    memo = {}
    in_progress = set()
    for root in needed:
        if root not in circuit.succ:
            raise UnknownNode(root)
        stack = [root]
        while stack:
            u = stack[-1]
            if u in memo:
                stack.pop()
                continue
            pending = [v for v in circuit.succ[u] if v not in memo]
            if pending:
                if u not in in_progress:
                    in_progress.add(u)
                for v in pending:
                    if v in in_progress:
                        raise NotAPowerCircuit("cycle through node %r" % (v,))
                stack.extend(pending)
                continue
            in_progress.discard(u)
            stack.pop()
            exponent = sum(d * memo[v] for v, d in circuit.succ[u].items())
            if exponent < 0:
                raise NotAPowerCircuit(
                    "node %r has successor value %d < 0" % (u, exponent)
                )
            if exponent and exponent * (q.bit_length() - 1) > max_bits:
                raise Overflow(
                    "q**%d exceeds the %d bit budget" % (exponent, max_bits)
                )
            value = q**exponent
            if value.bit_length() > max_bits:
                raise Overflow(
                    "q**%d exceeds the %d bit budget" % (exponent, max_bits)
                )
            memo[u] = value
    return memo


def eval_marking(circuit, marking, max_bits=DEFAULT_MAX_BITS):
    """Exact value of a marking; a guarded test oracle, never used by solvers."""
    marking.require_alive()
    if marking.circuit is not circuit:
        raise CircuitMismatch("marking belongs to a different circuit")
    values = _node_values(circuit, list(marking.digits), max_bits)
    return sum(d * values[u] for u, d in marking.digits.items())


def eval_node(circuit, u, max_bits=DEFAULT_MAX_BITS):
    """Exact value q**e(L_u) of a single node (same guards as eval_marking)."""
    return _node_values(circuit, [u], max_bits)[u]


# -- cloning and arithmetic ------------------------------------------


def clone_node(circuit, u):
    """New node with a copy of u's successor marking and no incoming arcs."""
    if u not in circuit.succ:
        raise UnknownNode(u)
    edges = dict(circuit.succ[u])
    circuit.op_cost += 1 + len(edges)
    v = circuit._next_id
    circuit._next_id += 1
    circuit.succ[v] = edges
    return v


def clone_marking(circuit, marking):
    """Clone every support node; the new marking lives on the clones only.

    The original marking is left untouched (cloning is non-destructive,
    unlike add/mult which consume their operands).
    """
    marking.require_alive()
    if marking.circuit is not circuit:
        raise CircuitMismatch("marking belongs to a different circuit")
    fresh = Marking(circuit)
    for u, d in marking.digits.items():
        fresh.digits[clone_node(circuit, u)] = d
    circuit.op_cost += len(marking.digits)
    return fresh


def add_markings(circuit, k, m):
    """Marking of value e(K) + e(M); consumes both operands.

    Nodes where the digit sum stays in D are merged in place (zero sums
    vanish).  A node u with K(u)+M(u) outside D is resolved by cloning:
    the original keeps K(u) and the clone carries M(u).
    """
    _check_operands(circuit, k, m)
    q = circuit.q
    result = Marking(circuit)
    digits = dict(k.digits)
    for u, d in m.digits.items():
        s = digits.get(u, 0) + d
        if -q < s < q:
            if s == 0:
                digits.pop(u, None)
            else:
                digits[u] = s
        else:
            # conflict: the original node keeps K(u), a clone carries M(u)
            digits[clone_node(circuit, u)] = d
    circuit.op_cost += len(k.digits) + len(m.digits)
    result.digits = digits
    k.alive = False
    m.alive = False
    return result


def mult_by_power(circuit, k, m):
    """Marking of value e(K) * q**e(M); consumes both operands.

    Both operands are cloned, then every clone of supp K is wired to
    every clone of supp M with the digit M assigns to the target.  The
    clones have no incoming arcs, which rules out cycles and
    multi-edges.  The returned marking sits on the K clones; the M
    clones become plain graph structure.
    """
    _check_operands(circuit, k, m)
    k_clone = clone_marking(circuit, k)
    m_clone = clone_marking(circuit, m)
    for u in k_clone.digits:
        row = circuit.succ[u]
        for v, d in m_clone.digits.items():
            row[v] = d
    circuit.op_cost += len(k_clone.digits) * len(m_clone.digits)
    k.alive = False
    m.alive = False
    return k_clone


def negate(marking):
    """Flip every digit in place (value becomes -e(M)); returns the marking."""
    marking.require_alive()
    for u in marking.digits:
        marking.digits[u] = -marking.digits[u]
    marking.circuit.op_cost += len(marking.digits)
    return marking


def const_marking(circuit, n):
    """Marking with the machine-integer value n.

    Builds a fresh chain of nodes of values q**0, q**1, ... as needed
    (each chain node's successor marking spells out its exponent in
    base q over the lower chain nodes) and marks it with the q-ary
    digits of ``|n|``, signed.  Reduction later merges these chain
    nodes with any equal-valued ones already present.
    """
    result = Marking(circuit)
    if n == 0:
        return result
    q = circuit.q
    sign = 1 if n > 0 else -1
    mag = abs(n)
    digits = []
    while mag:
        digits.append(mag % q)
        mag //= q
    chain = []
    for exponent in range(len(digits)):
        rep = exponent
        succ = {}
        pos = 0
        while rep:
            if rep % q:
                succ[chain[pos]] = rep % q
            rep //= q
            pos += 1
        chain.append(circuit.new_node(succ))
    for exponent, d in enumerate(digits):
        if d:
            result.digits[chain[exponent]] = sign * d
    circuit.op_cost += len(digits)
    return result


def tow(q, n, max_bits=DEFAULT_MAX_BITS):
    """Tower function tow_q(0) = 1, tow_q(n+1) = q**tow_q(n); test helper."""
    if q < 2:
        raise InvalidBase(q)
    if n < 0:
        raise ValueError("tower height must be >= 0")
    value = 1
    for _ in range(n):
        if value * (q.bit_length() - 1) > max_bits:
            raise Overflow("tow_%d(%d) exceeds %d bits" % (q, n, max_bits))
        value = q**value
        if value.bit_length() > max_bits:
            raise Overflow("tow_%d(%d) exceeds %d bits" % (q, n, max_bits))
    return value
