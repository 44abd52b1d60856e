"""One-step greedy coupling of the flip dynamics on a neighboring pair.

For a pair (sigma, tau) differing only at v, most alternating components
are identical in the two colorings and are coupled by the identity; the
difference structure D collects, per color c, the components that differ.
For a color c outside {s, t} = {sigma(v), tau(v)} with delta_c c-colored
neighbors u_1 < ... < u_m of v, the component of v on the sigma side
decomposes exactly as S_sigma(v,c) = {v} + sum of S_tau(u_i, s) (distinct
components counted once; repeated ones are recorded as empty), and
symmetrically on the tau side.  The greedy coupling pairs the big
component on each side against the largest opposite block entry and
couples the rest so that both marginals are exactly the single-coloring
flip distribution.

The colors s and t themselves are handled through one unified block built
from the {s,t}-colored subgraph with v removed: its components are
classified by whether they attach to v through s-colored neighbors
(reaching v on the tau side), t-colored neighbors (sigma side), or both.
When no component attaches both ways the two sides pair independently,
which on a proper pair reduces to two singleton coalescing moves; when a
component attaches both ways the two big components are paired directly
against each other, which keeps every mass nonnegative and both marginals
exact (the per-side pairing used for the generic blocks can go negative
there).

A move is terminating when one of its flips is rooted at v or at a
neighbor of v flipped toward the opposite disagreement color; these are
exactly the moves in D.  Non-terminating moves never change the Hamming
distance; terminating moves may (including to 0 or above 1), but a
terminating move can also relocate the disagreement to another vertex at
distance 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .dynamics import FlipProbabilities
from .errors import CapacityError, InputError, InvariantError
from .graphs import (
    Coloring,
    Graph,
    NeighboringPair,
    alternating_component,
    enumerate_flips,
    flip,
    hamming,
)

# A flip is (vertex set, low color, high color); None stands for "no flip
# on this side".
Flip = tuple[frozenset[int], int, int]


def _mk_flip(vertices: frozenset[int], c1: int, c2: int) -> Flip:
    return (vertices, min(c1, c2), max(c1, c2))


@dataclass(frozen=True)
class CoupledMove:
    """One joint move: a flip (or nothing) on each side, with its mass."""

    sigma_flip: Optional[Flip]
    tau_flip: Optional[Flip]
    mass: Fraction
    terminating: bool

    def apply(self, pair: NeighboringPair) -> tuple[Coloring, Coloring]:
        sig, tau = pair.sigma, pair.tau
        if self.sigma_flip is not None:
            comp, lo, hi = self.sigma_flip
            sig = flip(sig, comp, lo, hi)
        if self.tau_flip is not None:
            comp, lo, hi = self.tau_flip
            tau = flip(tau, comp, lo, hi)
        return sig, tau


@dataclass(frozen=True)
class Signature:
    """Block summary for one color: component sizes seen from both sides.

    For a color c outside {s, t}: A and B are the sizes of the v-rooted
    components on the sigma and tau side, a and b the per-neighbor block
    entry sizes (vertex order, repeats zeroed), i_max and j_max the lowest
    indices attaining max(a) and max(b).

    For c == s the sigma side is empty by definition (A = 0, a all zero);
    B is the size of the v-rooted tau component and b holds the sigma-side
    entries of the s-colored neighbors.  If some {s,t}-component attaches
    to v both ways, the big sigma-side component appears as a b entry
    (once) and j_max maximizes b_j minus one on that entry.  For c == t
    the mirror applies: B = 0, b all zero, and A is the big sigma-side
    component unless it already appears as a b entry of the c == s
    signature, in which case A = 0.
    """

    c: int
    delta: int
    A: int
    B: int
    a: tuple[int, ...]
    b: tuple[int, ...]
    i_max: Optional[int]
    j_max: Optional[int]


def _dedup(sets: list[frozenset[int]]) -> list[frozenset[int]]:
    """Zero out repeats: later occurrences of an equal set become empty."""
    seen: set[frozenset[int]] = set()
    out = []
    for sset in sets:
        if sset and sset in seen:
            out.append(frozenset())
        else:
            if sset:
                seen.add(sset)
            out.append(sset)
    return out


def _argmax_lowest(sizes: Sequence[int]) -> int:
    best = 0
    for i in range(1, len(sizes)):
        if sizes[i] > sizes[best]:
            best = i
    return best


class _GenericBlock:
    """Difference block for one color c outside {s, t} with delta_c > 0."""

    def __init__(self, pair: NeighboringPair, c: int):
        g, sig, tau, v = pair.graph, pair.sigma, pair.tau, pair.v
        self.c = c
        self.u = pair.neighbors_colored(c)
        self.sv_sigma = alternating_component(g, sig, v, c)
        self.sv_tau = alternating_component(g, tau, v, c)
        self.a_sets = _dedup([alternating_component(g, tau, u, pair.s) for u in self.u])
        self.b_sets = _dedup([alternating_component(g, sig, u, pair.t) for u in self.u])
        self.A = len(self.sv_sigma)
        self.B = len(self.sv_tau)
        if self.A != 1 + sum(len(x) for x in self.a_sets):
            raise InvariantError(f"block {c}: sigma component does not decompose")
        if self.B != 1 + sum(len(x) for x in self.b_sets):
            raise InvariantError(f"block {c}: tau component does not decompose")
        self.i_max = _argmax_lowest([len(x) for x in self.a_sets])
        self.j_max = _argmax_lowest([len(x) for x in self.b_sets])

    def moves(self, pair: NeighboringPair, probs: FlipProbabilities, nk: int) -> list[CoupledMove]:
        s, t, c = pair.s, pair.t, self.c
        pA = probs.mass(self.A)
        pB = probs.mass(self.B)
        out = []
        if pA != 0:
            out.append(
                CoupledMove(
                    _mk_flip(self.sv_sigma, s, c),
                    _mk_flip(self.a_sets[self.i_max], c, s),
                    Fraction(pA, nk),
                    True,
                )
            )
        if pB != 0:
            out.append(
                CoupledMove(
                    _mk_flip(self.b_sets[self.j_max], c, t),
                    _mk_flip(self.sv_tau, t, c),
                    Fraction(pB, nk),
                    True,
                )
            )
        for i in range(len(self.u)):
            q = probs.mass(len(self.a_sets[i])) - (pA if i == self.i_max else 0)
            qp = probs.mass(len(self.b_sets[i])) - (pB if i == self.j_max else 0)
            if q < 0 or qp < 0:
                raise InvariantError(
                    f"negative residual mass in block {c}: flip vector not monotone"
                )
            both = min(q, qp)
            if both != 0:
                out.append(
                    CoupledMove(
                        _mk_flip(self.b_sets[i], c, t),
                        _mk_flip(self.a_sets[i], c, s),
                        Fraction(both, nk),
                        True,
                    )
                )
            if q - both != 0:
                out.append(
                    CoupledMove(
                        None, _mk_flip(self.a_sets[i], c, s), Fraction(q - both, nk), True
                    )
                )
            if qp - both != 0:
                out.append(
                    CoupledMove(
                        _mk_flip(self.b_sets[i], c, t), None, Fraction(qp - both, nk), True
                    )
                )
        return out

class _DisagreementBlock:
    """Unified block for the two disagreement colors s and t."""

    def __init__(self, pair: NeighboringPair):
        g, sig, v = pair.graph, pair.sigma, pair.v
        s, t = pair.s, pair.t
        self.x = pair.neighbors_colored(s)
        self.y = pair.neighbors_colored(t)
        cols = sig.colors

        # Components of the {s,t}-colored subgraph with v removed, strict
        # alternation as everywhere else.
        comp_of: dict[int, frozenset[int]] = {}

        def component_without_v(start: int) -> frozenset[int]:
            if start in comp_of:
                return comp_of[start]
            seen = {start}
            frontier = [start]
            while frontier:
                nxt = []
                for w in frontier:
                    want = t if cols[w] == s else s
                    for z in g.adj[w]:
                        if z != v and cols[z] == want and z not in seen:
                            seen.add(z)
                            nxt.append(z)
                frontier = nxt
            fs = frozenset(seen)
            for w in fs:
                comp_of[w] = fs
            return fs

        classes: list[frozenset[int]] = []
        class_index: dict[frozenset[int], int] = {}
        for w in list(self.x) + list(self.y):
            comp = component_without_v(w)
            if comp not in class_index:
                class_index[comp] = len(classes)
                classes.append(comp)
        has_x = [False] * len(classes)
        has_y = [False] * len(classes)
        for w in self.x:
            has_x[class_index[comp_of[w]]] = True
        for w in self.y:
            has_y[class_index[comp_of[w]]] = True

        self.classes = classes
        self.class_of = {w: class_index[comp_of[w]] for w in list(self.x) + list(self.y)}
        self.mixed = [i for i in range(len(classes)) if has_x[i] and has_y[i]]
        self.pure_x = [i for i in range(len(classes)) if has_x[i] and not has_y[i]]
        self.pure_y = [i for i in range(len(classes)) if has_y[i] and not has_x[i]]

        lam: set[int] = {v}
        for i in range(len(classes)):
            if has_y[i]:
                lam |= classes[i]
        big_m: set[int] = {v}
        for i in range(len(classes)):
            if has_x[i]:
                big_m |= classes[i]
        self.lam = frozenset(lam)  # = S_sigma(v, t)
        self.m = frozenset(big_m)  # = S_tau(v, s)
        if self.lam != alternating_component(g, sig, v, t):
            raise InvariantError("sigma-side disagreement component mismatch")
        if self.m != alternating_component(g, pair.tau, v, s):
            raise InvariantError("tau-side disagreement component mismatch")

    def moves(self, pair: NeighboringPair, probs: FlipProbabilities, nk: int) -> list[CoupledMove]:
        s, t = pair.s, pair.t
        p_lam = probs.mass(len(self.lam))
        p_m = probs.mass(len(self.m))
        px = [len(self.classes[i]) for i in self.pure_x]
        py = [len(self.classes[i]) for i in self.pure_y]
        out = []

        def emit(sf, tf, mass):
            if mass != 0:
                out.append(CoupledMove(sf, tf, Fraction(mass, nk), True))

        if self.mixed:
            both = min(p_lam, p_m)
            emit(_mk_flip(self.lam, s, t), _mk_flip(self.m, s, t), both)
            emit(_mk_flip(self.lam, s, t), None, p_lam - both)
            emit(None, _mk_flip(self.m, s, t), p_m - both)
            for i in self.pure_x:
                emit(_mk_flip(self.classes[i], s, t), None, probs.mass(len(self.classes[i])))
            for j in self.pure_y:
                emit(None, _mk_flip(self.classes[j], s, t), probs.mass(len(self.classes[j])))
            return out

        if py:
            j_hat = _argmax_lowest(py)
            emit(_mk_flip(self.lam, s, t), _mk_flip(self.classes[self.pure_y[j_hat]], s, t), p_lam)
            for idx, j in enumerate(self.pure_y):
                residual = probs.mass(py[idx]) - (p_lam if idx == j_hat else 0)
                if residual < 0:
                    raise InvariantError("negative residual in disagreement block")
                emit(None, _mk_flip(self.classes[j], s, t), residual)
        else:
            emit(_mk_flip(self.lam, s, t), None, p_lam)
        if px:
            i_hat = _argmax_lowest(px)
            emit(_mk_flip(self.classes[self.pure_x[i_hat]], s, t), _mk_flip(self.m, s, t), p_m)
            for idx, i in enumerate(self.pure_x):
                residual = probs.mass(px[idx]) - (p_m if idx == i_hat else 0)
                if residual < 0:
                    raise InvariantError("negative residual in disagreement block")
                emit(_mk_flip(self.classes[i], s, t), None, residual)
        else:
            emit(None, _mk_flip(self.m, s, t), p_m)
        return out


def difference_sets(pair: NeighboringPair) -> dict[int, list[tuple[str, Optional[Flip]]]]:
    """The difference structure D as labeled flips per color.

    For each color c the list holds ("sigma:v" / "tau:v") entries for the
    two v-rooted components and ("sigma:u<i>" / "tau:u<i>") entries for
    the per-neighbor block components (empty components appear as None).
    The nonempty flips across all colors are exactly the components
    coupled non-identically.
    """
    out: dict[int, list[tuple[str, Optional[Flip]]]] = {}
    s, t = pair.s, pair.t
    for c in range(pair.k):
        if c == s or c == t:
            continue
        entries: list[tuple[str, Optional[Flip]]] = []
        if pair.delta(c) == 0:
            entries.append(("sigma:v", _mk_flip(frozenset([pair.v]), s, c)))
            entries.append(("tau:v", _mk_flip(frozenset([pair.v]), t, c)))
        else:
            blk = _GenericBlock(pair, c)
            entries.append(("sigma:v", _mk_flip(blk.sv_sigma, s, c)))
            entries.append(("tau:v", _mk_flip(blk.sv_tau, t, c)))
            for i, u in enumerate(blk.u):
                aset = blk.a_sets[i]
                bset = blk.b_sets[i]
                entries.append((f"tau:u{u}", _mk_flip(aset, c, s) if aset else None))
                entries.append((f"sigma:u{u}", _mk_flip(bset, c, t) if bset else None))
        out[c] = entries
    blk = _DisagreementBlock(pair)
    s_entries: list[tuple[str, Optional[Flip]]] = [("sigma:v", None)]
    s_entries.append(("tau:v", _mk_flip(blk.m, s, t)))
    for u in blk.x:
        cls = blk.classes[blk.class_of[u]]
        s_entries.append((f"tau:u{u}", None))
        # sigma-side component of an s-colored neighbor; mixed classes
        # reach v and coincide with the big sigma component.
        comp = blk.lam if blk.class_of[u] in blk.mixed else cls
        s_entries.append((f"sigma:u{u}", _mk_flip(comp, s, t)))
    out[s] = s_entries
    t_entries: list[tuple[str, Optional[Flip]]] = [("sigma:v", _mk_flip(blk.lam, s, t))]
    t_entries.append(("tau:v", None))
    for u in blk.y:
        cls = blk.classes[blk.class_of[u]]
        comp = blk.m if blk.class_of[u] in blk.mixed else cls
        t_entries.append((f"tau:u{u}", _mk_flip(comp, s, t)))
        t_entries.append((f"sigma:u{u}", None))
    out[t] = t_entries
    return out


def signature(pair: NeighboringPair, c: int) -> Signature:
    """Block summary for color c; defined when delta_c > 0 or c is s or t."""
    if not (0 <= c < pair.k):
        raise InputError(f"color {c} out of range")
    s, t = pair.s, pair.t
    delta = pair.delta(c)
    if c != s and c != t:
        if delta == 0:
            raise InputError(f"color {c} absent from the neighborhood and not a disagreement color")
        blk = _GenericBlock(pair, c)
        return Signature(
            c=c,
            delta=delta,
            A=blk.A,
            B=blk.B,
            a=tuple(len(x) for x in blk.a_sets),
            b=tuple(len(x) for x in blk.b_sets),
            i_max=blk.i_max,
            j_max=blk.j_max,
        )
    blk = _DisagreementBlock(pair)
    if c == s:
        b_sizes: list[int] = []
        mixed_entry = None
        seen: set[int] = set()
        for u in blk.x:
            ci = blk.class_of[u]
            if ci in seen:
                b_sizes.append(0)
                continue
            seen.add(ci)
            if ci in blk.mixed:
                if mixed_entry is None:
                    mixed_entry = len(b_sizes)
                    b_sizes.append(len(blk.lam))
                else:
                    b_sizes.append(0)
            else:
                b_sizes.append(len(blk.classes[ci]))
        # all mixed classes share the big sigma component, so only the
        # first mixed neighbor contributes an entry
        if mixed_entry is not None:
            adjusted = [v - (1 if i == mixed_entry else 0) for i, v in enumerate(b_sizes)]
            j_max = _argmax_lowest(adjusted) if b_sizes else None
        else:
            j_max = _argmax_lowest(b_sizes) if b_sizes else None
        return Signature(
            c=c,
            delta=delta,
            A=0,
            B=len(blk.m),
            a=tuple([0] * len(blk.x)),
            b=tuple(b_sizes),
            i_max=None,
            j_max=j_max,
        )
    a_sizes: list[int] = []
    seen = set()
    for u in blk.y:
        ci = blk.class_of[u]
        if ci in seen or ci in blk.mixed:
            a_sizes.append(0)
            continue
        seen.add(ci)
        a_sizes.append(len(blk.classes[ci]))
    return Signature(
        c=c,
        delta=delta,
        A=0 if blk.mixed else len(blk.lam),
        B=0,
        a=tuple(a_sizes),
        b=tuple([0] * len(blk.y)),
        i_max=_argmax_lowest(a_sizes) if a_sizes else None,
        j_max=None,
    )


@dataclass(frozen=True)
class CouplingDistribution:
    """Full one-step coupled move list with exact masses."""

    moves: tuple[CoupledMove, ...]
    noop_mass: Fraction

    def total_mass(self) -> Fraction:
        return self.noop_mass + sum((m.mass for m in self.moves), Fraction(0))

    def sigma_marginal(self) -> dict[Flip, Fraction]:
        out: dict[Flip, Fraction] = {}
        for m in self.moves:
            if m.sigma_flip is not None:
                out[m.sigma_flip] = out.get(m.sigma_flip, Fraction(0)) + m.mass
        return out

    def tau_marginal(self) -> dict[Flip, Fraction]:
        out: dict[Flip, Fraction] = {}
        for m in self.moves:
            if m.tau_flip is not None:
                out[m.tau_flip] = out.get(m.tau_flip, Fraction(0)) + m.mass
        return out

    def terminating_mass(self) -> Fraction:
        return sum((m.mass for m in self.moves if m.terminating), Fraction(0))


def _difference_moves(
    pair: NeighboringPair, probs: FlipProbabilities
) -> tuple[list[CoupledMove], set[Flip]]:
    """All non-identity moves plus the sigma-side flip identities in D."""
    nk = pair.graph.n * pair.k
    s, t = pair.s, pair.t
    moves: list[CoupledMove] = []
    sigma_labels: set[Flip] = set()

    for c in range(pair.k):
        if c == s or c == t:
            continue
        if pair.delta(c) == 0:
            vset = frozenset([pair.v])
            moves.append(
                CoupledMove(
                    _mk_flip(vset, s, c), _mk_flip(vset, t, c), Fraction(1, nk), True
                )
            )
            sigma_labels.add(_mk_flip(vset, s, c))
        else:
            blk = _GenericBlock(pair, c)
            moves.extend(blk.moves(pair, probs, nk))
            sigma_labels.add(_mk_flip(blk.sv_sigma, s, c))
            for bset in blk.b_sets:
                if bset:
                    sigma_labels.add(_mk_flip(bset, c, t))

    blk = _DisagreementBlock(pair)
    moves.extend(blk.moves(pair, probs, nk))
    sigma_labels.add(_mk_flip(blk.lam, s, t))
    for i in blk.pure_x:
        sigma_labels.add(_mk_flip(blk.classes[i], s, t))
    return moves, sigma_labels


def greedy_coupling_distribution(
    pair: NeighboringPair, probs: FlipProbabilities
) -> CouplingDistribution:
    """The complete coupled one-step distribution for a neighboring pair.

    Both marginals equal the single-coloring flip distribution exactly;
    tests enforce this on exhaustive small instances.  Moves of mass zero
    are omitted, as are flips the probability vector never performs.
    """
    nk = pair.graph.n * pair.k
    moves, sigma_labels = _difference_moves(pair, probs)
    for f in enumerate_flips(pair.graph, pair.sigma):
        if f in sigma_labels:
            continue
        p = probs.mass(len(f[0]))
        if p != 0:
            moves.append(CoupledMove(f, f, Fraction(p, nk), False))
    total = sum((m.mass for m in moves), Fraction(0))
    if total > 1:
        raise InvariantError("coupled move masses exceed 1")
    return CouplingDistribution(moves=tuple(moves), noop_mass=1 - total)


def is_terminating(pair: NeighboringPair, move: CoupledMove) -> bool:
    """Recompute the terminating predicate from the move's flips.

    A move terminates iff its sigma flip is rooted at v or is the
    component of a neighbor of v toward tau(v), or symmetrically for the
    tau flip toward sigma(v).
    """
    v, s, t = pair.v, pair.s, pair.t
    nbrs = set(pair.graph.adj[v])
    scols = pair.sigma.colors

    def side_hits(f: Optional[Flip], toward: int, cols) -> bool:
        if f is None:
            return False
        comp, lo, hi = f
        if v in comp:
            return True
        if toward not in (lo, hi):
            return False
        other = hi if lo == toward else lo
        return any(u in nbrs and cols[u] == other for u in comp)

    if side_hits(move.sigma_flip, t, scols):
        return True
    tcols = pair.tau.colors
    return side_hits(move.tau_flip, s, tcols)


def terminating_mass(pair: NeighboringPair, probs: FlipProbabilities) -> Fraction:
    """Exact probability that one coupled step performs a terminating move."""
    return greedy_coupling_distribution(pair, probs).terminating_mass()


def expected_distance_change(pair: NeighboringPair, probs: FlipProbabilities) -> Fraction:
    """Exact E[hamming after one coupled step] - 1."""
    total = Fraction(0)
    for m in greedy_coupling_distribution(pair, probs).moves:
        sig, tau = m.apply(pair)
        total += m.mass * (hamming(sig, tau) - 1)
    return total


def greedy_coupling_step(
    pair: NeighboringPair, probs: FlipProbabilities, rng
) -> tuple[Coloring, Coloring]:
    """Sample one coupled step by drawing from the full move distribution."""
    dist = greedy_coupling_distribution(pair, probs)
    u = rng.random()
    acc = 0.0
    for m in dist.moves:
        acc += float(m.mass)
        if u < acc:
            return m.apply(pair)
    return pair.sigma, pair.tau


@dataclass(frozen=True)
class TerminationRecord:
    """Outcome of running the coupling until the distance leaves 1."""

    t_stop: int
    final_sigma: Coloring
    final_tau: Coloring
    final_distance: int
    steps_with_flips: int
    terminating_moves_seen: int
    pre_stop_sigma: Coloring
    pre_stop_tau: Coloring


class CoupledWalk:
    """Mutable coupled trajectory with an exact-per-step fast sampler.

    Draws (vertex, color) uniformly like the single chain.  A draw whose
    sigma-side component is coupled by the identity flips both colorings
    together with the usual acceptance coin; draws that select difference
    structure instead fall into one combined class from which the moves of
    D are emitted with their exact masses.  The emission probabilities are
    mass / Q where Q is the total probability of the combined class
    (same-color draws plus draws selecting a sigma-side component of D),
    which always bounds the total mass of D.
    """

    def __init__(self, pair: NeighboringPair, probs: FlipProbabilities, rng, batch: int = 4096):
        self.g = pair.graph
        self.k = pair.k
        self.n = pair.graph.n
        self.nk = self.n * self.k
        self.probs = probs
        self.rng = rng
        self.pair = pair
        self.steps = 0
        self.flips_applied = 0
        self.terminating_seen = 0
        self._final = None
        self._dirty = True
        self._moves: list[CoupledMove] = []
        self._move_cum: list[float] = []
        self._q = 0.0
        self._batch = batch
        self._idx = batch  # force refill
        self._vs = self._cs = self._us = None

    def _refill(self):
        self._vs = self.rng.integers(self.n, size=self._batch)
        self._cs = self.rng.integers(self.k, size=self._batch)
        self._us = self.rng.random(size=self._batch)
        self._idx = 0

    def _rebuild(self):
        moves, labels = _difference_moves(self.pair, self.probs)
        self._moves = moves
        q_draws = self.n + sum(len(f[0]) for f in labels)
        self._q = q_draws / self.nk
        cum = []
        acc = 0.0
        for m in moves:
            acc += float(m.mass)
            cum.append(acc)
        if acc > self._q + 1e-12:
            raise InvariantError("difference mass exceeds its draw budget")
        self._move_cum = cum
        self._labels = labels
        self._dirty = False

    def _sigma_component_class(self, x: int, c: int) -> tuple[bool, frozenset[int]]:
        """BFS for S_sigma(x, c), noting whether it belongs to D."""
        cols = self.pair.sigma.colors
        v = self.pair.v
        t = self.pair.t
        base = cols[x]
        nbrs_v = self.g.adj[v]
        in_d = False
        qual = None
        if t == base or t == c:
            qual = c if t == base else base
        seen = {x}
        frontier = [x]
        while frontier:
            nxt = []
            for w in frontier:
                want = c if cols[w] == base else base
                for z in self.g.adj[w]:
                    if cols[z] == want and z not in seen:
                        seen.add(z)
                        nxt.append(z)
            frontier = nxt
        if v in seen:
            in_d = True
        elif qual is not None:
            vn = set(nbrs_v)
            in_d = any(w in vn and cols[w] == qual for w in seen)
        return in_d, frozenset(seen)

    def step(self) -> Optional[CoupledMove]:
        """Advance one step; returns the applied move, or None for a no-op."""
        if self._idx >= self._batch:
            self._refill()
        x = int(self._vs[self._idx])
        c = int(self._cs[self._idx])
        u = float(self._us[self._idx])
        self._idx += 1
        self.steps += 1

        cols = self.pair.sigma.colors
        if c == cols[x]:
            in_d, comp = True, None
        else:
            in_d, comp = self._sigma_component_class(x, c)

        if not in_d:
            alpha = len(comp)
            p = self.probs.mass_float(alpha)
            if p > 0 and u < p / alpha:
                lo, hi = min(cols[x], c), max(cols[x], c)
                sig = flip(self.pair.sigma, comp, lo, hi)
                tau = flip(self.pair.tau, comp, lo, hi)
                self.pair = NeighboringPair(self.g, sig, tau)
                self.flips_applied += 1
                self._dirty = True
                return CoupledMove((comp, lo, hi), (comp, lo, hi), Fraction(0), False)
            return None

        if self._dirty:
            self._rebuild()
        target = u * self._q
        lo_i, hi_i = 0, len(self._move_cum)
        while lo_i < hi_i:
            mid = (lo_i + hi_i) // 2
            if self._move_cum[mid] <= target:
                lo_i = mid + 1
            else:
                hi_i = mid
        if lo_i >= len(self._moves):
            return None
        move = self._moves[lo_i]
        sig, tau = move.apply(self.pair)
        self.flips_applied += 1
        self.terminating_seen += 1
        self._dirty = True
        d = hamming(sig, tau)
        if d == 1:
            self.pair = NeighboringPair(self.g, sig, tau)
            return move
        # distance left 1: store the final colorings without pair wrapping
        self._final = (sig, tau, d)
        return move

    def run_until_distance_change(self, step_cap: int) -> TerminationRecord:
        self._final = None
        while self._final is None:
            if self.steps >= step_cap:
                raise CapacityError(f"no distance change within {step_cap} steps")
            before = self.pair
            self.step()
        sig, tau, d = self._final
        return TerminationRecord(
            t_stop=self.steps,
            final_sigma=sig,
            final_tau=tau,
            final_distance=d,
            steps_with_flips=self.flips_applied,
            terminating_moves_seen=self.terminating_seen,
            pre_stop_sigma=before.sigma,
            pre_stop_tau=before.tau,
        )


def variable_length_coupling(
    pair: NeighboringPair,
    probs: FlipProbabilities,
    rng,
    step_cap: Optional[int] = None,
) -> TerminationRecord:
    """Run the coupled chain from a neighboring pair until the distance
    leaves 1 (coalescence or growth), and report when and how it ended.

    Terminating moves can relocate the disagreement vertex while keeping
    the distance at 1; the walk continues through those.  step_cap
    defaults to 100 * n * k and a walk exceeding it raises CapacityError.
    """
    if step_cap is None:
        step_cap = 100 * pair.graph.n * pair.k
    walk = CoupledWalk(pair, probs, rng)
    return walk.run_until_distance_change(step_cap)
