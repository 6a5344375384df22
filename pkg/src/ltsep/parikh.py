"""Letter-count reasoning over NFAs via integer flow systems.

A word of L(nfa, i, f) corresponds to a multiset of transitions that forms an
Eulerian path from an initial to a final state; conversely any conserved,
source-connected edge multiplicity vector decomposes into such a path.  This
module encodes these flows as integer feasibility problems, decides
threshold-matching between two languages (fixed threshold, and in the limit
over all thresholds via pump certificates), and reconstructs witness words
from feasible flows.

Connectivity of the used-edge subgraph to the chosen source is enforced by
lazily generated cut rows rather than an upfront spanning-structure encoding:
solve, check the support of the solution, and forbid disconnected supports
until the support is connected.  Integer feasibility itself is delegated to
scipy's MILP interface; returned solutions are re-verified in exact integer
arithmetic before use.
"""

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import milp, LinearConstraint, Bounds

from .automata import Nfa, trim

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


class SolverStall(RuntimeError):
    """The backend solver returned neither a solution nor an infeasibility proof."""


class MipModel:
    """A thin incremental builder for pure integer feasibility problems."""

    def __init__(self):
        self.lb = []
        self.ub = []
        self.rows = []  # (terms: dict var->coef, lo, hi)

    def add_var(self, lb=0, ub=None):
        self.lb.append(lb)
        self.ub.append(ub if ub is not None else np.inf)
        return len(self.lb) - 1

    def add_row(self, terms, lo, hi):
        self.rows.append((dict(terms), lo, hi))

    def add_eq(self, terms, rhs):
        self.add_row(terms, rhs, rhs)

    def add_le(self, terms, rhs):
        self.add_row(terms, -np.inf, rhs)

    def add_ge(self, terms, rhs):
        self.add_row(terms, rhs, np.inf)

    def solve(self):
        """Return an exact integer solution list, None if infeasible.

        Raises SolverStall when the backend fails to settle the instance or
        when its solution does not survive exact re-verification.
        """
        nvars = len(self.lb)
        if nvars == 0:
            return []
        data, rix, cix, lo, hi = [], [], [], [], []
        for r, (terms, l, h) in enumerate(self.rows):
            for v, c in terms.items():
                if c:
                    data.append(c)
                    rix.append(r)
                    cix.append(v)
            lo.append(l)
            hi.append(h)
        if self.rows:
            a = sparse.csc_array(
                (data, (rix, cix)), shape=(len(self.rows), nvars), dtype=float
            )
            constraints = LinearConstraint(a, lo, hi)
        else:
            constraints = ()
        # minimizing the variable sum keeps witness flows small; feasibility
        # and infeasibility proofs are unaffected
        res = milp(
            c=np.ones(nvars),
            constraints=constraints,
            integrality=np.ones(nvars),
            bounds=Bounds(np.array(self.lb, dtype=float), np.array(self.ub, dtype=float)),
        )
        if res.status == 2:  # proven infeasible
            return None
        if res.status != 0 or res.x is None:
            raise SolverStall("solver status %s: %s" % (res.status, res.message))
        sol = [int(round(x)) for x in res.x]
        self._verify(sol)
        return sol

    def _verify(self, sol):
        for v, x in enumerate(sol):
            if x < self.lb[v] - 1e-9 or x > self.ub[v] + 1e-9:
                raise SolverStall("solution violates variable bounds")
        for (terms, l, h) in self.rows:
            s = sum(c * sol[v] for v, c in terms.items())
            if (l != -np.inf and s < l) or (h != np.inf and s > h):
                raise SolverStall("solution violates a constraint row")


@dataclass(frozen=True)
class FlowSystem:
    """The flow view of one language L(nfa, i, f).

    The automaton is trimmed to its useful part; edges is the ordered
    transition list the multiplicity variables refer to.
    """

    nfa: Nfa
    i: frozenset
    f: frozenset
    edges: tuple

    @property
    def letters(self):
        return self.nfa.alphabet


def flow_system(nfa, i, f):
    nfa2, (i2,), (f2,) = trim(nfa, [set(i)], [set(f)])
    edges = tuple(sorted(nfa2.transitions))
    return FlowSystem(nfa2, frozenset(i2), frozenset(f2), edges)


@dataclass
class FlowAssignment:
    """A realizable flow: edge multiplicities plus endpoint choice."""

    edge_mult: dict
    source: int
    sink: int
    letter_counts: dict

    def total(self):
        return sum(self.edge_mult.values())


@dataclass
class _SideVars:
    system: FlowSystem
    edge_vars: list
    src_vars: dict
    snk_vars: dict

    def count_terms(self, sym, coef=1, extra=None):
        terms = {} if extra is None else extra
        for e, v in zip(self.system.edges, self.edge_vars):
            if e[1] == sym:
                terms[v] = terms.get(v, 0) + coef
        return terms

    def count_var(self, model, sym, cap):
        """A single bounded variable tied by equality to the letter's count."""
        x = model.add_var(0, cap)
        terms = self.count_terms(sym)
        terms[x] = terms.get(x, 0) - 1
        model.add_eq(terms, 0)
        return x


def _add_flow(model, system, cap):
    """Add one side's flow variables and conservation rows to the model."""
    edge_vars = [model.add_var(0, cap) for _ in system.edges]
    src_vars = {q: model.add_var(0, 1) for q in sorted(system.i)}
    snk_vars = {q: model.add_var(0, 1) for q in sorted(system.f)}
    if not src_vars or not snk_vars:
        # empty language: no endpoints selectable
        model.add_eq({}, 1)
        return _SideVars(system, edge_vars, src_vars, snk_vars)
    model.add_eq({v: 1 for v in src_vars.values()}, 1)
    model.add_eq({v: 1 for v in snk_vars.values()}, 1)
    for q in range(system.nfa.n_states):
        terms = {}
        for (p, _a, r), v in zip(system.edges, edge_vars):
            if p == r:
                continue
            if p == q:
                terms[v] = terms.get(v, 0) + 1
            if r == q:
                terms[v] = terms.get(v, 0) - 1
        if q in src_vars:
            terms[src_vars[q]] = terms.get(src_vars[q], 0) - 1
        if q in snk_vars:
            terms[snk_vars[q]] = terms.get(snk_vars[q], 0) + 1
        model.add_eq(terms, 0)
    return _SideVars(system, edge_vars, src_vars, snk_vars)


def _add_circulation(model, system, cap):
    """Conserved flow with no endpoints (a disjoint union of cycles)."""
    cyc_vars = [model.add_var(0, cap) for _ in system.edges]
    for q in range(system.nfa.n_states):
        terms = {}
        for (p, _a, r), v in zip(system.edges, cyc_vars):
            if p == r:
                continue
            if p == q:
                terms[v] = terms.get(v, 0) + 1
            if r == q:
                terms[v] = terms.get(v, 0) - 1
        if terms:
            model.add_eq(terms, 0)
    return cyc_vars


@dataclass
class _ConnReq:
    """One support-connectivity requirement checked after each solve."""

    system: FlowSystem
    var_groups: list  # per edge: list of variables whose sum is the flow value
    src_vars: dict
    cap: int

    def violation(self, sol):
        """Return a set C of support states unreachable from the source, or None."""
        values = [sum(sol[v] for v in grp) for grp in self.var_groups]
        used_edges = [e for e, val in zip(self.system.edges, values) if val > 0]
        if not used_edges:
            return None
        src = None
        for q, v in self.src_vars.items():
            if sol[v] > 0:
                src = q
        support = {src} if src is not None else set()
        for (p, _a, q) in used_edges:
            support.add(p)
            support.add(q)
        succ = {}
        for (p, _a, q) in used_edges:
            succ.setdefault(p, set()).add(q)
        seen = set()
        stack = [src] if src is not None else []
        while stack:
            p = stack.pop()
            if p in seen:
                continue
            seen.add(p)
            stack.extend(succ.get(p, ()))
        unreached = support - seen
        return unreached or None

    def add_cut(self, model, comp):
        """Forbid flow into comp without entering flow or an in-comp source."""
        entering = []
        for e, grp in zip(self.system.edges, self.var_groups):
            if e[2] in comp and e[0] not in comp:
                entering.extend(grp)
        srcs = [v for q, v in self.src_vars.items() if q in comp]
        for e, grp in zip(self.system.edges, self.var_groups):
            if e[2] in comp and e[0] in comp:
                terms = {}
                for v in grp:
                    terms[v] = terms.get(v, 0) + 1
                for v in entering:
                    terms[v] = terms.get(v, 0) - self.cap
                for v in srcs:
                    terms[v] = terms.get(v, 0) - self.cap * len(grp)
                model.add_le(terms, 0)


def _solve_connected(model, reqs, max_rounds=200):
    """Solve, adding connectivity cuts until every requirement holds."""
    for _ in range(max_rounds):
        sol = model.solve()
        if sol is None:
            return None
        bad = False
        for req in reqs:
            comp = req.violation(sol)
            if comp is not None:
                req.add_cut(model, comp)
                bad = True
        if not bad:
            return sol
    raise SolverStall("connectivity cut generation did not converge")


def _extract(side, sol):
    mult = {}
    counts = {}
    for e, v in zip(side.system.edges, side.edge_vars):
        x = sol[v]
        if x:
            mult[e] = x
            counts[e[1]] = counts.get(e[1], 0) + x
    src = next(q for q, v in side.src_vars.items() if sol[v] > 0)
    snk = next(q for q, v in side.snk_vars.items() if sol[v] > 0)
    return FlowAssignment(mult, src, snk, counts)


def _add_support_reach(model, system, side, cap):
    """One-shot support-connectivity encoding for a single flow side.

    Edge-use indicators z_e plus an auxiliary commodity: the chosen source
    injects |E| units, each used edge absorbs one unit at its tail, and the
    commodity may only travel along used edges.  Feasible exactly when every
    used edge's tail is reachable from the source through used edges, which
    together with conservation makes the flow Eulerian-decomposable.  The
    big-M coefficient is |E|+1, independent of the flow cap.
    """
    edges = system.edges
    if not edges or not side.src_vars:
        return
    big = len(edges) + 1
    z = [model.add_var(0, 1) for _ in edges]
    y = [model.add_var(0, big) for _ in edges]
    for m, zi, yi in zip(side.edge_vars, z, y):
        model.add_le({m: 1, zi: -cap}, 0)  # used => z = 1
        model.add_ge({m: 1, zi: -1}, 0)  # z = 1 => used
        model.add_le({yi: 1, zi: -big}, 0)  # commodity only on used edges
    for q in range(system.nfa.n_states):
        terms = {}
        for (p, _a, r), zi, yi in zip(edges, z, y):
            if p == q:
                terms[yi] = terms.get(yi, 0) - 1
                terms[zi] = terms.get(zi, 0) - 1
            if r == q:
                terms[yi] = terms.get(yi, 0) + 1
        if q in side.src_vars:
            terms[side.src_vars[q]] = terms.get(side.src_vars[q], 0) + big
        if terms:
            model.add_ge(terms, 0)


@dataclass
class FeasResult:
    status: str
    assignment: object = None


def feasible(system, count_eq=None, count_ge=None, count_zero_rest=False, cap=100_000):
    """Search for a flow whose letter counts satisfy the given constraints.

    count_eq: symbol -> exact count; count_ge: symbol -> lower bound;
    count_zero_rest forces every unmentioned letter of the system to count 0.
    """
    count_eq = dict(count_eq or {})
    count_ge = dict(count_ge or {})
    if not system.i or not system.f:
        # trimmed-empty language: feasible only never
        return FeasResult(UNSAT)
    model = MipModel()
    side = _add_flow(model, system, cap)
    mentioned = set(count_eq) | set(count_ge)
    for sym, c in count_eq.items():
        model.add_eq(side.count_terms(sym), c)
    for sym, c in count_ge.items():
        model.add_ge(side.count_terms(sym), c)
    if count_zero_rest:
        for sym in system.letters:
            if sym not in mentioned:
                terms = side.count_terms(sym)
                if terms:
                    model.add_eq(terms, 0)
    _add_support_reach(model, system, side, cap)
    try:
        sol = model.solve()
    except SolverStall:
        return FeasResult(UNKNOWN)
    if sol is None:
        return FeasResult(UNSAT)
    return FeasResult(SAT, _extract(side, sol))


@dataclass
class MatchResult:
    status: str
    assignment1: object = None
    assignment2: object = None
    certain: bool = True  # UNSAT answers: whether the box bound was generous


def _max_letter_count(system, sym):
    """Upper bound on the count of sym over the language, or None if unbounded."""
    # an edge inside a nontrivial strongly connected component can repeat;
    # any other edge is crossed at most once by a source-sink path
    n = system.nfa.n_states
    adj = {}
    for (p, _a, q) in system.edges:
        adj.setdefault(p, set()).add(q)
    # Tarjan-free SCC via Kosaraju on the small graphs we face
    order = []
    seen = set()
    for s in range(n):
        if s in seen:
            continue
        stack = [(s, iter(sorted(adj.get(s, ()))))]
        seen.add(s)
        while stack:
            v, it = stack[-1]
            advanced = False
            for w in it:
                if w not in seen:
                    seen.add(w)
                    stack.append((w, iter(sorted(adj.get(w, ())))))
                    advanced = True
                    break
            if not advanced:
                order.append(v)
                stack.pop()
    radj = {}
    for (p, _a, q) in system.edges:
        radj.setdefault(q, set()).add(p)
    comp = {}
    for s in reversed(order):
        if s in comp:
            continue
        stack = [s]
        while stack:
            v = stack.pop()
            if v in comp:
                continue
            comp[v] = s
            stack.extend(w for w in radj.get(v, ()) if w not in comp)
    count = 0
    for (p, a, q) in system.edges:
        if a != sym:
            continue
        if comp.get(p) == comp.get(q):
            return None  # on a cycle (includes self-loops)
        count += 1
    return count


def _fixed_bound(sys1, sys2, d):
    """A generous per-letter count bound for minimal threshold matchings.

    A minimal matching pair never needs any letter count far past the
    threshold: surplus cycles (length at most the state count) can be removed
    from both sides while staying in the both-at-least-d branch.
    """
    return (d or 1) + 2 * (sys1.nfa.n_states + sys2.nfa.n_states) + 2


def match_fixed(sys1, sys2, letters, d, cap=100_000):
    """Find letter-count vectors of the two languages equal up to threshold d.

    d=None asks for exactly equal vectors.  Letters outside a side's alphabet
    count as the constant 0 on that side.
    """
    if not sys1.i or not sys1.f or not sys2.i or not sys2.f:
        return MatchResult(UNSAT)
    model = MipModel()
    s1 = _add_flow(model, sys1, cap)
    s2 = _add_flow(model, sys2, cap)
    letters = list(letters)
    for sym in letters:
        t1 = s1.count_terms(sym)
        t2 = s2.count_terms(sym)
        if d is None:
            terms = dict(t1)
            for v, c in t2.items():
                terms[v] = terms.get(v, 0) - c
            model.add_eq(terms, 0)
            continue
        m1 = _max_letter_count(sys1, sym) if t1 else 0
        m2 = _max_letter_count(sys2, sym) if t2 else 0
        bounded_low = (m1 is not None and m1 < d) or (m2 is not None and m2 < d)
        if bounded_low or not t1 or not t2:
            # the both->=d branch is unreachable: force equality
            terms = dict(t1)
            for v, c in t2.items():
                terms[v] = terms.get(v, 0) - c
            model.add_eq(terms, 0)
            continue
        x1 = s1.count_var(model, sym, cap)
        x2 = s2.count_var(model, sym, cap)
        dif = model.add_var(0, 1)
        model.add_le({x1: 1, x2: -1, dif: -cap}, 0)
        model.add_le({x2: 1, x1: -1, dif: -cap}, 0)
        model.add_ge({x1: 1, dif: -d}, 0)
        model.add_ge({x2: 1, dif: -d}, 0)
    reqs = [
        _ConnReq(sys1, [[v] for v in s1.edge_vars], s1.src_vars, cap),
        _ConnReq(sys2, [[v] for v in s2.edge_vars], s2.src_vars, cap),
    ]
    try:
        sol = _solve_connected(model, reqs)
    except SolverStall:
        return MatchResult(UNKNOWN)
    if sol is None:
        certain = d is None or _fixed_bound(sys1, sys2, d) <= cap
        return MatchResult(UNSAT, certain=certain)
    return MatchResult(SAT, _extract(s1, sol), _extract(s2, sol))


@dataclass
class PumpCertificate:
    """Base flows plus circulations matching at every counting threshold.

    Off the unbounded letter set U, base counts and cycle counts agree between
    the two sides; on U both cycles have count >= 1.  Hence base + t*cycle on
    each side realizes a matching pair at threshold t for every t.
    """

    base1: FlowAssignment
    base2: FlowAssignment
    cycle1: dict
    cycle2: dict
    unbounded_set: frozenset

    def cycle_counts(self, which):
        cyc = self.cycle1 if which == 1 else self.cycle2
        counts = {}
        for (p, a, q), m in cyc.items():
            counts[a] = counts.get(a, 0) + m
        return counts

    def pumped(self, which, t):
        """The flow base + t*cycle for one side, as a FlowAssignment."""
        base = self.base1 if which == 1 else self.base2
        cyc = self.cycle1 if which == 1 else self.cycle2
        mult = dict(base.edge_mult)
        for e, m in cyc.items():
            mult[e] = mult.get(e, 0) + t * m
        counts = {}
        for (p, a, q), m in mult.items():
            counts[a] = counts.get(a, 0) + m
        return FlowAssignment(mult, base.source, base.sink, counts)


def match_limit(sys1, sys2, letters, cap=100_000):
    """Find a PumpCertificate: matching vectors at every threshold, or report none."""
    if not sys1.i or not sys1.f or not sys2.i or not sys2.f:
        return MatchResult(UNSAT)
    model = MipModel()
    s1 = _add_flow(model, sys1, cap)
    s2 = _add_flow(model, sys2, cap)
    c1 = _add_circulation(model, sys1, cap)
    c2 = _add_circulation(model, sys2, cap)

    def cyc_terms(system, cvars, sym, coef=1, into=None):
        terms = {} if into is None else into
        for e, v in zip(system.edges, cvars):
            if e[1] == sym:
                terms[v] = terms.get(v, 0) + coef
        return terms

    letters = list(letters)
    u_vars = {}
    for sym in letters:
        b1 = s1.count_terms(sym)
        b2 = s2.count_terms(sym)
        g1 = cyc_terms(sys1, c1, sym)
        g2 = cyc_terms(sys2, c2, sym)
        if not g1 or not g2:
            # some side cannot grow this letter: it can never join U
            for a, b in ((b1, b2), (g1, g2)):
                terms = dict(a)
                for v, c in b.items():
                    terms[v] = terms.get(v, 0) - c
                if terms:
                    model.add_eq(terms, 0)
            continue

        def bounded(terms):
            x = model.add_var(0, cap)
            t = dict(terms)
            t[x] = t.get(x, 0) - 1
            model.add_eq(t, 0)
            return x

        x1, x2, y1, y2 = bounded(b1), bounded(b2), bounded(g1), bounded(g2)
        u = model.add_var(0, 1)
        u_vars[sym] = u
        for a, b in ((x1, x2), (x2, x1), (y1, y2), (y2, y1)):
            model.add_le({a: 1, b: -1, u: -cap}, 0)
        model.add_ge({y1: 1, u: -1}, 0)
        model.add_ge({y2: 1, u: -1}, 0)
    reqs = [
        _ConnReq(sys1, [[v] for v in s1.edge_vars], s1.src_vars, cap),
        _ConnReq(sys2, [[v] for v in s2.edge_vars], s2.src_vars, cap),
        _ConnReq(
            sys1,
            [[v, w] for v, w in zip(s1.edge_vars, c1)],
            s1.src_vars,
            cap,
        ),
        _ConnReq(
            sys2,
            [[v, w] for v, w in zip(s2.edge_vars, c2)],
            s2.src_vars,
            cap,
        ),
    ]
    try:
        sol = _solve_connected(model, reqs)
    except SolverStall:
        return MatchResult(UNKNOWN)
    if sol is None:
        return MatchResult(UNSAT, certain=False)
    base1 = _extract(s1, sol)
    base2 = _extract(s2, sol)
    cyc1 = {e: sol[v] for e, v in zip(sys1.edges, c1) if sol[v]}
    cyc2 = {e: sol[v] for e, v in zip(sys2.edges, c2) if sol[v]}
    u_set = frozenset(sym for sym, v in u_vars.items() if sol[v])
    cert = PumpCertificate(base1, base2, cyc1, cyc2, u_set)
    return MatchResult(SAT, cert, None)


def realize_word(nfa, i, f, assignment):
    """Reconstruct a word of L(nfa, i, f) from a feasible flow (Eulerian path)."""
    mult = {e: m for e, m in assignment.edge_mult.items() if m}
    if not mult:
        if assignment.source in set(i) and assignment.source in set(f):
            return ()
        raise ValueError("zero flow but no shared initial/final state")
    remaining = {}
    for (p, a, q), m in mult.items():
        remaining.setdefault(p, []).append([a, q, m])
    stack = [(assignment.source, None)]
    rev = []
    while stack:
        v, sym = stack[-1]
        out = remaining.get(v, [])
        while out and out[-1][2] == 0:
            out.pop()
        if out:
            a, q, _m = out[-1]
            out[-1][2] -= 1
            stack.append((q, a))
        else:
            rev.append(sym)
            stack.pop()
    word = [a for a in reversed(rev) if a is not None]
    if len(word) != sum(mult.values()):
        raise ValueError("flow is not Eulerian-path decomposable")
    return tuple(word)
