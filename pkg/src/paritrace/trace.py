"""The fixpoint semantics engine.

Membership of a finitely represented input in an automaton's trace
semantics is decided by *restricting* the defining equation system to the
input: the carrier of the equation for priority class i becomes the finite
map lattice (states of priority i) -> (sets of input positions), where a
position is a suffix class of the lasso or a node of the tree generator.
Equation bodies act position-locally, so the restriction is closed under
them; its adequacy is enforced empirically by the differential oracle
suite rather than proven.

Ordinary semantics alternates signs (mu on odd priority classes, nu on
even ones); the decorated semantics is the all-nu system whose bodies also
pin the input's priorities against the automaton's, and whose positive
answers mean "some run realises exactly this decoration".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from . import hes as hes_mod
from .automata import (
    AutomatonError,
    BuchiWordAutomaton,
    DeterministicExceptionAutomaton,
    ParityTreeAutomaton,
    ParityWordAutomaton,
    buchi_to_parity,
)
from .hes import Equation, FLetter, HierEqSystem, make_phi_body
from .lattice import MU, NU, FunctionLattice, PowersetLattice, kleene_fixpoint
from .omega_input import (
    DecoratedLassoWord,
    DecoratedRegularTreeRep,
    DecorationError,
    LassoWord,
    RegularTreeRep,
    check_decorated_invariant,
    decorate_run,
    flatten_word,
    normalize,
)
from . import oracle as oracle_mod

__all__ = [
    "AlphabetMismatchError",
    "GradeMismatchError",
    "BOTTOM",
    "SolveStats",
    "MembershipVerdict",
    "FlatteningReport",
    "RestrictedHes",
    "build_restricted_hes",
    "parity_trace_membership",
    "buchi_trace_membership",
    "decorated_trace_membership",
    "tree_language_membership",
    "finite_trace_membership",
    "finite_trace_enum",
    "infinitary_trace_membership",
    "det_exception_behavior",
    "flattening_theorem_check",
]


class AlphabetMismatchError(Exception):
    """Input letters/symbols do not fit the automaton's alphabet."""


class GradeMismatchError(Exception):
    """A decorated input's grade differs from the queried state's priority."""


class _Bottom:
    """The exception value of the deterministic-with-exception semantics."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "bottom"

    def __bool__(self) -> bool:
        return False


BOTTOM = _Bottom()


@dataclass(frozen=True)
class SolveStats:
    iterations: tuple[int, ...]
    body_evals: int

    def to_json(self) -> dict:
        return {"iterations": list(self.iterations), "body_evals": self.body_evals}


@dataclass
class MembershipVerdict:
    value: bool
    witness: Any = None
    stats: SolveStats | None = None

    def __bool__(self) -> bool:
        return self.value

    def to_json(self) -> dict:
        doc: dict = {"schema_version": 1, "verdict": self.value}
        if self.witness is not None:
            doc["witness"] = str(self.witness)
        if self.stats is not None:
            doc["stats"] = self.stats.to_json()
        return doc


class RestrictedHes:
    """An equation system restricted to one (automaton, input) pair.

    Equation i-1 (0-based) belongs to priority class i and lives in the
    lattice (states of priority i) -> P(positions).  Empty priority classes
    keep their equation over a one-point lattice so the indexing of the
    defining system stays intact.
    """

    def __init__(self, hes, carriers, positions, start, mode, kind):
        self.hes: HierEqSystem = hes
        self.carriers: tuple[FunctionLattice, ...] = tuple(carriers)
        self.positions = tuple(positions)
        self.start = start
        self.mode = mode
        self.kind = kind

    @property
    def two_n(self) -> int:
        return len(self.carriers)

    def member(self, assignment: tuple, state: str, priority: int, pos=None) -> bool:
        """Does the suffix at ``pos`` (default: the input itself) belong to
        the solved variable of ``state``?"""
        pos = self.start if pos is None else pos
        carrier = self.carriers[priority - 1]
        mask = carrier.get(assignment[priority - 1], state)
        return bool((mask >> self.positions.index(pos)) & 1)

    def solve(self, **kwargs) -> hes_mod.Solution:
        return hes_mod.solve(self.hes, **kwargs)


def _stats(sol: hes_mod.Solution) -> SolveStats:
    return SolveStats(sol.iterations, sol.body_evals)


# ---------------------------------------------------------------------------
# Restricted-system construction
# ---------------------------------------------------------------------------

def _word_positions(w) -> tuple[int, ...]:
    return tuple(range(w.n_positions))


def _word_system(
    aut: ParityWordAutomaton,
    w,
    *,
    decorated: bool,
    partition: list[tuple[str, ...]] | None = None,
    signs: list[str] | None = None,
) -> RestrictedHes:
    """Shared builder for the word-case restricted systems.

    ``partition[k]`` lists the states of equation k; successor slots send a
    state y to the equation ``class_of[y]``.  The c-part offers every
    transition of a state at every position; the sigma-part accepts exactly
    the alternatives whose letter (and, in decorated mode, whose priority)
    matches the input at that position.
    """
    positions = _word_positions(w)
    if decorated:
        letters = {sym for sym, _ in w.stem + w.cycle}
    else:
        letters = set(w.stem + w.cycle)
    missing = letters - set(aut.alphabet)
    if missing:
        raise AlphabetMismatchError(f"letters not in automaton alphabet: {sorted(missing)}")
    if partition is None:
        partition = [aut.priority_class(i) for i in range(1, aut.two_n + 1)]
        signs = [MU if i % 2 == 1 else NU for i in range(1, aut.two_n + 1)]
        if decorated:
            signs = [NU] * aut.two_n
    class_of = {}
    index_in_class = {}
    for k, block in enumerate(partition):
        for yi, y in enumerate(block):
            class_of[y] = k
            index_in_class[y] = yi
    moves_by_state: dict[str, list] = {y: [] for y in aut.states}
    for (src, a, y) in aut.transitions:
        moves_by_state[src].append((a, class_of[y], index_in_class[y]))
    pos_lat = PowersetLattice(positions)
    n_eq = len(partition)

    at = w.letter  # (sym, prio) pairs in decorated mode, letters otherwise

    equations = []
    carriers = []
    for k, block in enumerate(partition):
        carrier = FunctionLattice(block, pos_lat)
        carriers.append(carrier)
        c_part: dict = {}
        for x in block:
            moves = moves_by_state[x]
            for p in positions:
                nxt = w.next_pos(p)
                c_part[(x, p)] = tuple(
                    FLetter(a, ((ky, yi, nxt),)) for (a, ky, yi) in moves
                )
        if decorated:
            prio_of_eq = k + 1

            def sigma(cell, letter, _prio=prio_of_eq):
                sym, q = at(cell[1])
                return letter.tag == sym and q == _prio
        else:

            def sigma(cell, letter):
                return letter.tag == at(cell[1])

        body = make_phi_body(carrier, c_part, sigma, n_equations=n_eq)
        equations.append(Equation(f"u{k + 1}", carrier, signs[k], body))
    return RestrictedHes(
        HierEqSystem(equations),
        carriers,
        positions,
        0,
        "decorated" if decorated else "ordinary",
        "word",
    )


def _tree_system(aut: ParityTreeAutomaton, t, *, decorated: bool) -> RestrictedHes:
    nodes = t.node_ids()
    pos_index = {n: i for i, n in enumerate(nodes)}
    for n in nodes:
        lab = t.label(n)
        sym = lab[0] if decorated else lab
        if sym not in aut.alphabet:
            raise AlphabetMismatchError(f"tree symbol {sym!r} not in automaton alphabet")
        if aut.alphabet.arity(sym) != len(t.children(n)):
            raise AlphabetMismatchError(
                f"node {n!r}: symbol {sym!r} has arity {aut.alphabet.arity(sym)}, "
                f"tree gives {len(t.children(n))} children"
            )
    partition = [aut.priority_class(i) for i in range(1, aut.two_n + 1)]
    signs = (
        [NU] * aut.two_n
        if decorated
        else [MU if i % 2 == 1 else NU for i in range(1, aut.two_n + 1)]
    )
    class_of = {y: aut.priority(y) - 1 for y in aut.states}
    index_in_class = {y: partition[class_of[y]].index(y) for y in aut.states}
    pos_lat = PowersetLattice(tuple(range(len(nodes))))
    n_eq = aut.two_n

    equations = []
    carriers = []
    for k, block in enumerate(partition):
        carrier = FunctionLattice(block, pos_lat)
        carriers.append(carrier)
        c_part: dict = {}
        for x in block:
            trans = aut.transitions_from(x)
            for n in nodes:
                kids = t.children(n)
                letters = []
                for sym, targets in trans:
                    if len(targets) != len(kids):
                        continue
                    slots = tuple(
                        (class_of[y], index_in_class[y], pos_index[c])
                        for y, c in zip(targets, kids)
                    )
                    letters.append(FLetter(sym, slots))
                c_part[(x, pos_index[n])] = tuple(letters)
        if decorated:
            prio_of_eq = k + 1

            def sigma(cell, letter, _prio=prio_of_eq, _nodes=nodes):
                sym, q = t.label(_nodes[cell[1]])
                return letter.tag == sym and q == _prio
        else:

            def sigma(cell, letter, _nodes=nodes):
                return letter.tag == t.label(_nodes[cell[1]])

        body = make_phi_body(carrier, c_part, sigma, n_equations=n_eq)
        equations.append(Equation(f"u{k + 1}", carrier, signs[k], body))
    rh = RestrictedHes(
        HierEqSystem(equations),
        carriers,
        tuple(range(len(nodes))),
        pos_index[t.root],
        "decorated" if decorated else "ordinary",
        "tree",
    )
    rh.node_ids = nodes
    return rh


def build_restricted_hes(aut, input_obj, mode: str = "ordinary") -> RestrictedHes:
    """Restrict the defining equation system of ``aut`` to one input.

    ``mode`` is ``"ordinary"`` (alternating signs, plain input) or
    ``"decorated"`` (all-nu, decorated input).
    """
    if mode not in ("ordinary", "decorated"):
        raise ValueError(f"mode must be 'ordinary' or 'decorated', got {mode!r}")
    decorated = mode == "decorated"
    if isinstance(aut, ParityWordAutomaton):
        if decorated and not isinstance(input_obj, DecoratedLassoWord):
            raise TypeError("decorated mode needs a DecoratedLassoWord")
        if not decorated and not isinstance(input_obj, LassoWord):
            raise TypeError("ordinary mode needs a LassoWord")
        return _word_system(aut, input_obj, decorated=decorated)
    if isinstance(aut, ParityTreeAutomaton):
        if decorated and not isinstance(input_obj, DecoratedRegularTreeRep):
            raise TypeError("decorated mode needs a DecoratedRegularTreeRep")
        if not decorated and not isinstance(input_obj, RegularTreeRep):
            raise TypeError("ordinary mode needs a RegularTreeRep")
        return _tree_system(aut, input_obj, decorated=decorated)
    raise TypeError(f"cannot restrict {type(aut).__name__}")


# ---------------------------------------------------------------------------
# Membership operations
# ---------------------------------------------------------------------------

def _require_state(aut, x: str):
    if x not in aut.states:
        raise AutomatonError(f"undeclared state {x!r}")


def parity_trace_membership(
    aut: ParityWordAutomaton, x: str, w: LassoWord
) -> MembershipVerdict:
    """Is the lasso's infinite word in the parity trace semantics at x?"""
    _require_state(aut, x)
    rh = build_restricted_hes(aut, w, "ordinary")
    sol = rh.solve()
    value = rh.member(sol.assignment, x, aut.priority(x))
    return MembershipVerdict(value, stats=_stats(sol))


def buchi_trace_membership(
    aut: BuchiWordAutomaton, x: str, w: LassoWord
) -> MembershipVerdict:
    """Membership for an automaton given by its accepting set.

    Builds the two-block system directly from the accepting partition
    (non-accepting states under mu, accepting under nu).
    """
    _require_state(aut, x)
    parity = buchi_to_parity(aut)
    partition = [
        tuple(s for s in aut.states if s not in aut.accepting),
        tuple(s for s in aut.states if s in aut.accepting),
    ]
    rh = _word_system(parity, w, decorated=False, partition=partition, signs=[MU, NU])
    sol = rh.solve()
    value = rh.member(sol.assignment, x, 2 if x in aut.accepting else 1)
    return MembershipVerdict(value, stats=_stats(sol))


def decorated_trace_membership(aut, x: str, xi) -> MembershipVerdict:
    """Is the decorated input realised by some run from x?

    Requires the input's grade to equal the priority of x and the input to
    satisfy the decorated parity law.
    """
    _require_state(aut, x)
    problems = check_decorated_invariant(xi)
    if problems:
        raise DecorationError("; ".join(problems))
    if aut.priority(x) != xi.grade:
        raise GradeMismatchError(
            f"state {x!r} has priority {aut.priority(x)}, input has grade {xi.grade}"
        )
    rh = build_restricted_hes(aut, xi, "decorated")
    sol = rh.solve()
    value = rh.member(sol.assignment, x, aut.priority(x))
    return MembershipVerdict(value, stats=_stats(sol))


def tree_language_membership(
    aut: ParityTreeAutomaton, x: str, t: RegularTreeRep
) -> MembershipVerdict:
    """Is the unfolding of the tree representation in the language at x?"""
    _require_state(aut, x)
    rh = build_restricted_hes(aut, t, "ordinary")
    sol = rh.solve()
    value = rh.member(sol.assignment, x, aut.priority(x))
    return MembershipVerdict(value, stats=_stats(sol))


def _finite_word_system(aut: ParityWordAutomaton, word: tuple[str, ...]):
    """One mu-equation over all states for membership of a finite word."""
    missing = set(word) - set(aut.alphabet)
    if missing:
        raise AlphabetMismatchError(f"letters not in automaton alphabet: {sorted(missing)}")
    positions = tuple(range(len(word) + 1))  # len(word) is the end marker
    pos_lat = PowersetLattice(positions)
    carrier = FunctionLattice(aut.states, pos_lat)
    idx = {y: i for i, y in enumerate(aut.states)}
    c_part: dict = {}
    end = len(word)
    for x in aut.states:
        moves = [(a, y) for (src, a, y) in aut.transitions if src == x]
        for p in positions:
            letters = []
            if p == end:
                letters.append(FLetter("✓", ()))
            else:
                for (a, y) in moves:
                    letters.append(FLetter(a, ((0, idx[y], p + 1),)))
            c_part[(x, p)] = tuple(letters)

    def sigma(cell, letter):
        x, p = cell
        if letter.tag == "✓":
            return x in aut.final
        return letter.tag == word[p]

    body = make_phi_body(carrier, c_part, sigma, n_equations=1)
    system = HierEqSystem([Equation("u1", carrier, MU, body)])
    return system, carrier


def finite_trace_membership(aut: ParityWordAutomaton, x: str, word) -> bool:
    """Does some run over the finite word end with the termination flag?"""
    _require_state(aut, x)
    word = tuple(word)
    system, carrier = _finite_word_system(aut, word)
    sol = hes_mod.solve(system)
    mask = carrier.get(sol.assignment[0], x)
    return bool(mask & 1)


def finite_trace_enum(aut: ParityWordAutomaton, x: str, maxlen: int) -> frozenset:
    """All termination-flagged words of length <= maxlen accepted from x.

    Computed as the least fixpoint of the word-building one-step map over
    the lattice of bounded-length word sets (the enumeration counterpart of
    the finite-trace equation), not by path search; the oracle's
    breadth-first enumeration is the independent route.
    """
    _require_state(aut, x)
    if maxlen < 0:
        raise ValueError("maxlen must be >= 0")
    if len(aut.alphabet) ** maxlen > 4096:
        raise ValueError(f"maxlen {maxlen} enumerates too many words")
    words: list[tuple[str, ...]] = [()]
    for _ in range(maxlen):
        words = words + [
            (a,) + w for a in aut.alphabet for w in words if len(w) < maxlen
        ]
    words = sorted(set(words), key=lambda w: (len(w), w))
    widx = {w: i for i, w in enumerate(words)}
    word_lat = PowersetLattice(tuple(words))
    carrier = FunctionLattice(aut.states, word_lat)
    sidx = {y: i for i, y in enumerate(aut.states)}
    # prepend[a][i] = index of a . words[i], when still within the bound
    prepend = {
        a: [widx.get((a,) + w) for w in words] for a in aut.alphabet
    }
    moves = {y: [] for y in aut.states}
    for (src, a, y) in aut.transitions:
        moves[src].append((a, sidx[y]))
    epsilon_bit = 1 << widx[()]

    def body(elem):
        out = []
        for y in aut.states:
            mask = epsilon_bit if y in aut.final else 0
            for (a, ti) in moves[y]:
                src_mask = elem[ti]
                pre = prepend[a]
                m = src_mask
                while m:
                    low = (m & -m).bit_length() - 1
                    m &= m - 1
                    tgt = pre[low]
                    if tgt is not None:
                        mask |= 1 << tgt
            out.append(mask)
        return tuple(out)

    value, _steps = kleene_fixpoint(body, carrier, MU)
    return frozenset(word_lat.to_set(carrier.get(value, x)))


def infinitary_trace_membership(aut: ParityWordAutomaton, x: str, w: LassoWord) -> bool:
    """Does any infinite run over the lasso exist from x (acceptance ignored)?

    A single nu-equation over all states.
    """
    _require_state(aut, x)
    rh = _word_system(aut, w, decorated=False, partition=[aut.states], signs=[NU])
    sol = rh.solve()
    return rh.member(sol.assignment, x, 1)


def det_exception_behavior(aut: DeterministicExceptionAutomaton, x: str):
    """Total decorated behavior of a deterministic automaton at x.

    Simulates the unique run; returns the decorated lasso/tree when the run
    is total and satisfies the parity law, and BOTTOM otherwise (exception
    reached, or the generated decoration fails the law).
    """
    _require_state(aut, x)
    if aut.word_kind:
        seen = {x: 0}
        pairs: list[tuple[str, int]] = []
        cur = x
        while True:
            if cur not in aut.delta:
                return BOTTOM
            sym, (nxt,) = aut.delta[cur]
            pairs.append((sym, aut.priority(cur)))
            if nxt in seen:
                split = seen[nxt]
                stem, cycle = tuple(pairs[:split]), tuple(pairs[split:])
                xi = DecoratedLassoWord(stem, cycle)
                if check_decorated_invariant(xi):
                    return BOTTOM
                return xi
            seen[nxt] = len(pairs)
            cur = nxt
    # tree case: the reachable state graph is the run generator
    reach = {x}
    stack = [x]
    while stack:
        y = stack.pop()
        if y not in aut.delta:
            return BOTTOM
        _, targets = aut.delta[y]
        for z in targets:
            if z not in reach:
                reach.add(z)
                stack.append(z)
    nodes = {
        y: ((aut.delta[y][0], aut.priority(y)), aut.delta[y][1]) for y in reach
    }
    xi = DecoratedRegularTreeRep(nodes, x)
    if check_decorated_invariant(xi):
        return BOTTOM
    return xi


@dataclass
class FlatteningReport:
    """Outcome of comparing plain membership with decorated-witness existence."""

    agree: bool
    membership: bool
    witness_found: bool
    witness: DecoratedLassoWord | None
    checks: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "agree": self.agree,
            "membership": self.membership,
            "witness_found": self.witness_found,
            "witness": None if self.witness is None else str(self.witness),
            "checks": dict(self.checks),
        }


def flattening_theorem_check(
    aut: ParityWordAutomaton, x: str, w: LassoWord
) -> FlatteningReport:
    """Membership-level check that flattening the decorated semantics gives
    the plain semantics.

    The left side is the engine's parity membership; the right side is the
    existence of a decorated input of grade priority(x) that flattens to the
    word and is decorated-accepted, searched via the oracle's product-graph
    run extraction (complete for regular witnesses by positional
    determinacy).  Every returned witness is re-verified on the decorated
    route before it counts.
    """
    left = parity_trace_membership(aut, x, w)
    overdict = oracle_mod.lasso_acceptance(aut, x, w)
    checks: dict = {}
    witness = None
    witness_ok = False
    if overdict.value:
        witness = decorate_run(overdict.run, aut.priorities)
        checks["invariant"] = not check_decorated_invariant(witness, aut.priority(x))
        checks["flatten_equal"] = normalize(flatten_word(witness)) == normalize(w)
        checks["decorated_membership"] = decorated_trace_membership(aut, x, witness).value
        witness_ok = all(checks.values())
    agree = left.value == overdict.value and left.value == witness_ok
    return FlatteningReport(
        agree=agree,
        membership=left.value,
        witness_found=witness_ok,
        witness=witness if witness_ok else None,
        checks=checks,
    )
