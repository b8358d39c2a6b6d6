"""Model checking.

:func:`evaluate` flattens a sentence into a small node program and runs it in
a numba kernel.  At every existential node the literal conjuncts (atoms and
negated atoms) are folded into a bitset of candidate vertices before the
remaining conjuncts are tried, so quantifier blocks that spell out an induced
pattern behave like a backtracking subgraph search.  Universal nodes are run as
``!E v !body`` with the negation pushed one level down.

:func:`evaluate_reference` is the plain recursive definition and is kept as an
independent check on the kernel.
"""

from __future__ import annotations

from functools import lru_cache

import numba
import numpy as np

from ..errors import FreeVariableError
from ..graph import Graph
from .ast import (
    Adj,
    And,
    Bottom,
    Eq,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    Top,
    free_variables,
    is_literal,
    variables,
)

OP_TRUE, OP_FALSE, OP_ADJ, OP_EQ, OP_NOT, OP_AND, OP_OR, OP_EXISTS = range(8)


def evaluate_reference(f: Formula, g: Graph, env: dict | None = None) -> bool:
    env = {} if env is None else env
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Adj):
        return g.has_edge(env[f.a], env[f.b])
    if isinstance(f, Eq):
        return env[f.a] == env[f.b]
    if isinstance(f, Not):
        return not evaluate_reference(f.body, g, env)
    if isinstance(f, And):
        return all(evaluate_reference(p, g, env) for p in f.parts)
    if isinstance(f, Or):
        return any(evaluate_reference(p, g, env) for p in f.parts)
    if isinstance(f, (Exists, Forall)):
        test = any if isinstance(f, Exists) else all
        return test(evaluate_reference(f.body, g, {**env, f.var: v}) for v in range(g.n))
    raise TypeError(f"not a formula: {f!r}")


# -- compilation ---------------------------------------------------------


def _negate(f: Formula) -> Formula:
    if isinstance(f, Not):
        return f.body
    if isinstance(f, Top):
        return Bottom()
    if isinstance(f, Bottom):
        return Top()
    if isinstance(f, Or):
        return And(tuple(_negate(p) for p in f.parts))
    return Not(f)


class _Program:
    def __init__(self, f: Formula):
        self.slots = {v: i for i, v in enumerate(sorted(variables(f)))}
        self.op, self.a, self.b = [], [], []
        self.c0, self.c1, self.l0, self.l1 = [], [], [], []
        self.kids = []
        self.lk, self.la, self.lb, self.ln = [], [], [], []
        self.depth = 0
        self.max_depth = 0
        self.root = self.emit(f)
        as_arr = lambda xs: np.array(xs, dtype=np.int64)
        self.arrays = tuple(
            as_arr(x)
            for x in (self.op, self.a, self.b, self.c0, self.c1, self.l0, self.l1,
                      self.kids, self.lk, self.la, self.lb, self.ln)
        )

    def _node(self, op, a=0, b=0):
        self.op.append(op)
        self.a.append(a)
        self.b.append(b)
        for lst in (self.c0, self.c1, self.l0, self.l1):
            lst.append(0)
        return len(self.op) - 1

    def _children(self, node, children):
        ids = [self.emit(c) for c in children]
        self.c0[node] = len(self.kids)
        self.kids.extend(ids)
        self.c1[node] = len(self.kids)

    def emit(self, f: Formula) -> int:
        if isinstance(f, Top):
            return self._node(OP_TRUE)
        if isinstance(f, Bottom):
            return self._node(OP_FALSE)
        if isinstance(f, Adj):
            return self._node(OP_ADJ, self.slots[f.a], self.slots[f.b])
        if isinstance(f, Eq):
            return self._node(OP_EQ, self.slots[f.a], self.slots[f.b])
        if isinstance(f, Not):
            node = self._node(OP_NOT)
            self._children(node, [f.body])
            return node
        if isinstance(f, (And, Or)):
            node = self._node(OP_AND if isinstance(f, And) else OP_OR)
            self._children(node, f.parts)
            return node
        if isinstance(f, Forall):
            node = self._node(OP_NOT)
            self._children(node, [Exists(f.var, _negate(f.body))])
            return node
        if isinstance(f, Exists):
            parts = list(f.body.parts) if isinstance(f.body, And) else [f.body]
            lits = [p for p in parts if is_literal(p)]
            rest = [p for p in parts if not is_literal(p) and not isinstance(p, Top)]
            # b holds the nesting depth, which picks the scratch row for candidates
            node = self._node(OP_EXISTS, self.slots[f.var], self.depth)
            self.max_depth = max(self.max_depth, self.depth + 1)
            self.l0[node] = len(self.lk)
            for lit in lits:
                neg = isinstance(lit, Not)
                atom = lit.body if neg else lit
                self.lk.append(0 if isinstance(atom, Adj) else 1)
                self.la.append(self.slots[atom.a])
                self.lb.append(self.slots[atom.b])
                self.ln.append(int(neg))
            self.l1[node] = len(self.lk)
            self.depth += 1
            self._children(node, rest)
            self.depth -= 1
            return node
        raise TypeError(f"not a formula: {f!r}")


@numba.njit(cache=True)
def _bit(words, u, v):
    return (words[u, v >> 6] >> np.uint64(v & 63)) & np.uint64(1)


@numba.njit(cache=True)
def _run(node, op, na, nb, c0, c1, l0, l1, kids, lk, la, lb, ln, env, words, n, scratch):
    o = op[node]
    if o == 0:
        return True
    if o == 1:
        return False
    if o == 2:
        return _bit(words, env[na[node]], env[nb[node]]) == 1
    if o == 3:
        return env[na[node]] == env[nb[node]]
    if o == 4:
        return not _run(kids[c0[node]], op, na, nb, c0, c1, l0, l1, kids, lk, la, lb, ln, env, words, n, scratch)
    if o == 5:
        for c in range(c0[node], c1[node]):
            if not _run(kids[c], op, na, nb, c0, c1, l0, l1, kids, lk, la, lb, ln, env, words, n, scratch):
                return False
        return True
    if o == 6:
        for c in range(c0[node], c1[node]):
            if _run(kids[c], op, na, nb, c0, c1, l0, l1, kids, lk, la, lb, ln, env, words, n, scratch):
                return True
        return False
    # existential block
    v = na[node]
    nw = words.shape[1]
    cand = scratch[nb[node]]
    for w in range(nw):
        cand[w] = ~np.uint64(0)
    rem = n & 63
    if rem:
        cand[nw - 1] = (np.uint64(1) << np.uint64(rem)) - np.uint64(1)
    if n == 0:
        cand[0] = np.uint64(0)
    for t in range(l0[node], l1[node]):
        x, y, neg = la[t], lb[t], ln[t]
        if x == v and y == v:
            holds = lk[t] == 1  # x = x holds, x ~ x never does
            if holds == (neg == 1):
                for w in range(nw):
                    cand[w] = np.uint64(0)
        elif x == v or y == v:
            u = env[y] if x == v else env[x]
            if lk[t] == 0:
                for w in range(nw):
                    if neg:
                        cand[w] &= ~words[u, w]
                    else:
                        cand[w] &= words[u, w]
            else:
                one = np.uint64(1) << np.uint64(u & 63)
                if neg:
                    cand[u >> 6] &= ~one
                else:
                    keep = cand[u >> 6] & one
                    for w in range(nw):
                        cand[w] = np.uint64(0)
                    cand[u >> 6] = keep
        else:
            if lk[t] == 0:
                holds = _bit(words, env[x], env[y]) == 1
            else:
                holds = env[x] == env[y]
            if holds == (neg == 1):
                for w in range(nw):
                    cand[w] = np.uint64(0)
    if c0[node] == c1[node]:
        for w in range(nw):
            if cand[w] != 0:
                return True
        return False
    saved = env[v]
    for x in range(n):
        if (cand[x >> 6] >> np.uint64(x & 63)) & np.uint64(1):
            env[v] = x
            ok = True
            for c in range(c0[node], c1[node]):
                if not _run(kids[c], op, na, nb, c0, c1, l0, l1, kids, lk, la, lb, ln, env, words, n, scratch):
                    ok = False
                    break
            if ok:
                env[v] = saved
                return True
    env[v] = saved
    return False


@lru_cache(maxsize=256)
def compile_formula(f: Formula) -> _Program:
    return _Program(f)


def evaluate(f: Formula, g: Graph) -> bool:
    """Truth value of the sentence ``f`` on ``g``."""
    free = free_variables(f)
    if free:
        raise FreeVariableError(f"cannot evaluate a formula with free variables {sorted(free)}")
    prog = compile_formula(f)
    env = np.full(max(1, len(prog.slots)), -1, dtype=np.int64)
    scratch = np.empty((max(1, prog.max_depth), g.words.shape[1]), dtype=np.uint64)
    return bool(_run(prog.root, *prog.arrays, env, g.words, g.n, scratch))
