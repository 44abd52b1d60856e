"""Linear programs bounding the one-step distance change of the coupling.

The decision variables are the flip probabilities p_1..p_N (N = n_max),
the contraction rate lam, and two surrogate variables x, y that cap the
per-block cost once a block has at least m_star entries.  Constraint
families:

  base/mono/cap   p_1 = 1, monotonicity, alpha * p_alpha <= 1
  H/...           exact per-block cost for blocks with m < m_star entries,
                  over all entry vectors a, b in {0..N}^m (not both sides
                  all zero), big-component sizes A in [1 + max a,
                  min(1 + sum a, N + 1)] and B likewise; each min() is
                  expanded into its 2^m linear branches
  own/...         blocks of the disagreement colors with m >= 2 entries
  sur/...         definitions of x and y plus the closing constraint
                  2x + m_star * y <= -1 + m_star * lam
  cap3/...        optional shifted cap alpha * p_{alpha-2} <= 3
  mix/...         (mixed kind) lam dominates lam_sing, lam_good and the
                  gamma-weighted mix of lam_bad and lam_good

The mixed kind splits the rate into lam_sing (single-entry blocks),
lam_bad (the two extremal two-entry shapes at the support edge) and
lam_good (everything else), reflecting that Bad states are rare along a
burned-in trajectory.

The H families are huge (tens of thousands of tuples), so LPInstance
keeps them symbolically: solving works by constraint generation against
an exact rational simplex, and a final exact feasibility pass over every
tuple certifies the optimum.  A float cross-check against scipy's
linprog on the fully expanded program is available separately.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional

from .dynamics import FlipProbabilities
from .errors import InputError, InvariantError
from .simplex import SimplexResult, solve_simplex

ZERO = Fraction(0)


def h_value(
    probs,
    A: int,
    B: int,
    a: tuple[int, ...],
    b: tuple[int, ...],
) -> Fraction:
    """Exact per-block cost H(A, B, a, b) under a flip vector.

    probs may be a FlipProbabilities or a 0-indexable sequence of
    Fractions giving p_1.. (entries beyond the sequence are zero).
    H = (A - max a - 1) p_A + (B - max b - 1) p_B + sum_i f_i with
    f_i = a_i q_i + b_i q'_i - min(q_i, q'_i), q_i = p_{a_i} minus p_A on
    the lowest index attaining max a, and q'_i symmetrically.
    """
    if len(a) != len(b) or not a:
        raise InputError("entry vectors must be nonempty and equal length")

    if isinstance(probs, FlipProbabilities):
        pm = probs.mass
    else:
        vals = list(probs)

        def pm(alpha: int) -> Fraction:
            if 1 <= alpha <= len(vals):
                return Fraction(vals[alpha - 1])
            return ZERO

    i_max = max(range(len(a)), key=lambda i: (a[i], -i))
    j_max = max(range(len(b)), key=lambda i: (b[i], -i))
    pA = pm(A)
    pB = pm(B)
    total = (A - a[i_max] - 1) * pA + (B - b[j_max] - 1) * pB
    for i in range(len(a)):
        q = pm(a[i]) - (pA if i == i_max else ZERO)
        qp = pm(b[i]) - (pB if i == j_max else ZERO)
        total += a[i] * q + b[i] * qp - min(q, qp)
    return total


def g_surrogate(probs, a: int, b: int) -> Fraction:
    """a p_a + b p_b - min(p_a, p_b), the two-entry surrogate cost."""
    if isinstance(probs, FlipProbabilities):
        pa, pb = probs.mass(a), probs.mass(b)
    else:
        vals = list(probs)
        pa = Fraction(vals[a - 1]) if 1 <= a <= len(vals) else ZERO
        pb = Fraction(vals[b - 1]) if 1 <= b <= len(vals) else ZERO
    return a * pa + b * pb - min(pa, pb)


@dataclass(frozen=True)
class LinearConstraint:
    """coeffs . vars <= rhs (or == rhs), with a stable label."""

    label: str
    coeffs: tuple[tuple[str, Fraction], ...]
    rel: str
    rhs: Fraction

    def lhs_value(self, assignment: dict[str, Fraction]) -> Fraction:
        return sum((c * assignment.get(v, ZERO) for v, c in self.coeffs), ZERO)

    def slack(self, assignment: dict[str, Fraction]) -> Fraction:
        return self.rhs - self.lhs_value(assignment)


def _mk_constraint(label: str, coeffs: dict[str, Fraction], rel: str, rhs) -> LinearConstraint:
    items = tuple(sorted((v, Fraction(c)) for v, c in coeffs.items() if c != 0))
    return LinearConstraint(label=label, coeffs=items, rel=rel, rhs=Fraction(rhs))


def _pvar(alpha: int) -> str:
    return f"p{alpha}"


class HFamily:
    """All exact block constraints for one entry count m, kept symbolic."""

    def __init__(
        self,
        m: int,
        n_max: int,
        lam_var_for: Callable[[tuple, tuple, int, int], str],
        label_for: Optional[Callable[[tuple, tuple, int, int], str]] = None,
    ):
        self.m = m
        self.n_max = n_max
        self.lam_var_for = lam_var_for
        self.label_for = label_for or self.default_label

    def default_label(self, a, b, A, B) -> str:
        astr = ",".join(map(str, a))
        bstr = ",".join(map(str, b))
        return f"H/m={self.m}/a={astr}/b={bstr}/A={A}/B={B}"

    def tuples(self) -> Iterator[tuple[tuple, tuple, int, int]]:
        import itertools

        n, m = self.n_max, self.m
        pairs = list(itertools.product(range(n + 1), repeat=2))
        for combo in itertools.combinations_with_replacement(pairs, m):
            a = tuple(p[0] for p in combo)
            b = tuple(p[1] for p in combo)
            if all(x == 0 for x in a) or all(x == 0 for x in b):
                continue
            a_lo, a_hi = 1 + max(a), min(1 + sum(a), n + 1)
            b_lo, b_hi = 1 + max(b), min(1 + sum(b), n + 1)
            for A in range(a_lo, a_hi + 1):
                for B in range(b_lo, b_hi + 1):
                    yield a, b, A, B

    def branch_constraints(self, a, b, A, B) -> list[LinearConstraint]:
        """The 2^m linear forms whose conjunction is H(A,B,a,b) <= rhs."""
        import itertools

        m, n = self.m, self.n_max
        i_max = max(range(m), key=lambda i: (a[i], -i))
        j_max = max(range(m), key=lambda i: (b[i], -i))
        lam = self.lam_var_for(a, b, A, B)
        base_label = self.label_for(a, b, A, B)
        out = []
        for branch in itertools.product("ab", repeat=m):
            coeffs: dict[str, Fraction] = {}

            def add(alpha: int, w) -> None:
                if w != 0 and 1 <= alpha <= n:
                    coeffs[_pvar(alpha)] = coeffs.get(_pvar(alpha), ZERO) + w

            add(A, A - a[i_max] - 1)
            add(B, B - b[j_max] - 1)
            for i in range(m):
                wa = a[i] - (1 if branch[i] == "a" else 0)
                wb = b[i] - (1 if branch[i] == "b" else 0)
                add(a[i], wa)
                if i == i_max:
                    add(A, -wa)
                add(b[i], wb)
                if i == j_max:
                    add(B, -wb)
            coeffs[lam] = coeffs.get(lam, ZERO) - m
            out.append(
                _mk_constraint(
                    f"{base_label}/br={''.join(branch)}", coeffs, "<=", Fraction(-1)
                )
            )
        return out

    def tuple_slack(self, a, b, A, B, assignment: dict[str, Fraction]) -> Fraction:
        pvals = [assignment.get(_pvar(i), ZERO) for i in range(1, self.n_max + 1)]
        lam = assignment.get(self.lam_var_for(a, b, A, B), ZERO)
        return (-1 + self.m * lam) - h_value(pvals, A, B, a, b)

    def scan(
        self, pf: list[float], lam_of: dict[str, float], tol: float
    ) -> list[tuple[float, tuple]]:
        """Float pre-scan; returns (violation, tuple) with violation > tol."""
        m = self.m
        out = []

        def pfv(alpha: int) -> float:
            return pf[alpha] if 0 <= alpha < len(pf) else 0.0

        for a, b, A, B in self.tuples():
            i_max = max(range(m), key=lambda i: (a[i], -i))
            j_max = max(range(m), key=lambda i: (b[i], -i))
            pA, pB = pfv(A), pfv(B)
            h = (A - a[i_max] - 1) * pA + (B - b[j_max] - 1) * pB
            for i in range(m):
                q = pfv(a[i]) - (pA if i == i_max else 0.0)
                qp = pfv(b[i]) - (pB if i == j_max else 0.0)
                h += a[i] * q + b[i] * qp - min(q, qp)
            rhs = -1.0 + m * lam_of[self.lam_var_for(a, b, A, B)]
            if h - rhs > tol:
                out.append((h - rhs, (a, b, A, B)))
        return out


@dataclass
class LPInstance:
    """A program with explicit structural constraints and symbolic families."""

    name: str
    variables: tuple[str, ...]
    constraints: tuple[LinearConstraint, ...]
    families: tuple[HFamily, ...]
    objective_var: str
    meta: dict = field(default_factory=dict)

    def without(self, label_prefix: str) -> "LPInstance":
        kept = tuple(c for c in self.constraints if not c.label.startswith(label_prefix))
        if len(kept) == len(self.constraints):
            raise InputError(f"no constraint labeled {label_prefix}*")
        return LPInstance(
            name=f"{self.name}-without-{label_prefix}",
            variables=self.variables,
            constraints=kept,
            families=self.families,
            objective_var=self.objective_var,
            meta=dict(self.meta),
        )

    def all_constraints(self) -> Iterator[LinearConstraint]:
        """Every constraint fully expanded (large for the H families)."""
        yield from self.constraints
        for fam in self.families:
            for a, b, A, B in fam.tuples():
                yield from fam.branch_constraints(a, b, A, B)


@dataclass(frozen=True)
class LPSolution:
    status: str
    objective_value: Optional[Fraction]
    assignment: dict[str, Fraction]
    rounds: int = 0
    active_constraints: int = 0


def _structural(
    n_max: int,
    m_star: int,
    lam_own: str,
    lam_close: str,
    cap3: bool,
) -> list[LinearConstraint]:
    cons: list[LinearConstraint] = []
    cons.append(_mk_constraint("base/p1", {"p1": Fraction(1)}, "==", 1))
    for alpha in range(2, n_max + 1):
        cons.append(
            _mk_constraint(
                f"mono/{alpha}",
                {_pvar(alpha): Fraction(1), _pvar(alpha - 1): Fraction(-1)},
                "<=",
                0,
            )
        )
    for alpha in range(1, n_max + 1):
        cons.append(_mk_constraint(f"cap/{alpha}", {_pvar(alpha): Fraction(alpha)}, "<=", 1))
    if cap3:
        for j in range(1, n_max + 1):
            cons.append(_mk_constraint(f"cap3/{j + 2}", {_pvar(j): Fraction(j + 2)}, "<=", 3))

    import itertools

    for m in range(2, m_star):
        for bvec in itertools.combinations_with_replacement(range(n_max + 1), m):
            if bvec[-1] == 0:
                continue
            big = sum(bvec)
            coeffs: dict[str, Fraction] = {}
            if 1 <= big <= n_max and big - bvec[-1] != 0:
                coeffs[_pvar(big)] = coeffs.get(_pvar(big), ZERO) + (big - bvec[-1])
            for bi in bvec:
                if bi >= 1:
                    coeffs[_pvar(bi)] = coeffs.get(_pvar(bi), ZERO) + bi
            coeffs[lam_own] = coeffs.get(lam_own, ZERO) - m
            bstr = ",".join(map(str, bvec))
            cons.append(_mk_constraint(f"own/m={m}/b={bstr}", coeffs, "<=", -1))

    for A in range(0, n_max + 2):
        coeffs = {"x": Fraction(-1)}
        if 1 <= A <= n_max and A != 2:
            coeffs[_pvar(A)] = Fraction(A - 2)
        cons.append(_mk_constraint(f"sur/x/A={A}", coeffs, "<=", 0))
    for a in range(0, n_max + 1):
        for b in range(a + 1, n_max + 1):
            for br in ("a", "b"):
                coeffs = {"y": Fraction(-1)}

                def addp(alpha: int, w: int) -> None:
                    if w != 0 and 1 <= alpha <= n_max:
                        coeffs[_pvar(alpha)] = coeffs.get(_pvar(alpha), ZERO) + w

                addp(a, a)
                addp(b, b)
                addp(a if br == "a" else b, -1)
                cons.append(_mk_constraint(f"sur/y/a={a}/b={b}/br={br}", coeffs, "<=", 0))
    cons.append(
        _mk_constraint(
            "sur/close",
            {"x": Fraction(2), "y": Fraction(m_star), lam_close: Fraction(-m_star)},
            "<=",
            -1,
        )
    )
    return cons


def build_vigoda_lp(n_max: int = 7, m_star: int = 3) -> LPInstance:
    """The one-step program whose optimum is the classical 11/6 barrier."""
    if n_max < 2 or m_star < 2:
        raise InputError("need n_max >= 2 and m_star >= 2")
    variables = tuple(_pvar(i) for i in range(1, n_max + 1)) + ("lam", "x", "y")
    cons = _structural(n_max, m_star, lam_own="lam", lam_close="lam", cap3=False)
    fams = tuple(
        HFamily(m, n_max, lam_var_for=lambda a, b, A, B: "lam")
        for m in range(1, m_star)
    )
    return LPInstance(
        name=f"one-step-n{n_max}-m{m_star}",
        variables=variables,
        constraints=tuple(cons),
        families=fams,
        objective_var="lam",
        meta={"kind": "vigoda", "n_max": n_max, "m_star": m_star},
    )


def build_tight_lp() -> LPInstance:
    """The five-constraint reduced program over p_1..p_7.

    Its optimum equals the full program's 11/6, and the constraint
    involving p_6 (tight/4) is redundant: dropping it leaves the optimum
    unchanged.
    """
    n_max = 7
    variables = tuple(_pvar(i) for i in range(1, n_max + 1)) + ("lam",)
    cons: list[LinearConstraint] = []
    cons.append(_mk_constraint("base/p1", {"p1": Fraction(1)}, "==", 1))
    for alpha in range(2, n_max + 1):
        cons.append(
            _mk_constraint(
                f"mono/{alpha}",
                {_pvar(alpha): Fraction(1), _pvar(alpha - 1): Fraction(-1)},
                "<=",
                0,
            )
        )
    # each entry: (label, base coeffs, the two min() arguments, lam weight)
    specs = [
        ("tight/1", {1: 1, 2: 1, 3: -2}, ({1: 1, 2: -1}, {2: 1, 3: -1}), 1),
        ("tight/2", {1: 1, 2: -1, 3: 3, 4: -3}, ({1: 1, 2: -1}, {3: 1, 4: -1}), 1),
        ("tight/3", {1: 1, 2: -1, 4: 4, 5: -4}, ({1: 1, 2: -1}, {4: 1, 5: -1}), 1),
        ("tight/4", {1: 2, 3: 5}, ({1: 1, 3: -1}, {3: 1, 6: -1}), 2),
        ("tight/5", {1: 2, 3: 5}, ({1: 1, 3: -1}, {3: 1, 7: -1}), 2),
    ]
    for label, base, (arg_a, arg_b), lam_w in specs:
        for br, arg in (("a", arg_a), ("b", arg_b)):
            coeffs: dict[str, Fraction] = {}
            for alpha, w in base.items():
                coeffs[_pvar(alpha)] = coeffs.get(_pvar(alpha), ZERO) + w
            for alpha, w in arg.items():
                coeffs[_pvar(alpha)] = coeffs.get(_pvar(alpha), ZERO) - w
            coeffs["lam"] = Fraction(-lam_w)
            cons.append(_mk_constraint(f"{label}/br={br}", coeffs, "<=", -1))
    return LPInstance(
        name="reduced-tight",
        variables=variables,
        constraints=tuple(cons),
        families=(),
        objective_var="lam",
        meta={"kind": "tight", "n_max": n_max},
    )


BAD_TUPLES_NOTE = "two-entry shapes at the support edge rated lam_bad"


def build_mixed_lp(
    n_max: int = 6,
    m_star: int = 3,
    gamma: Fraction = Fraction(25597784, 10**6),
    cap3: bool = True,
) -> LPInstance:
    """The program with Bad shapes discounted by their occupation ratio.

    gamma weighs lam_bad against lam_good: lam must dominate lam_sing,
    lam_good, and (gamma lam_bad + lam_good)/(gamma + 1); there is no
    direct lam >= lam_bad constraint.
    """
    if n_max < 4 or m_star < 3:
        raise InputError("mixed program needs n_max >= 4 and m_star >= 3")
    gamma = Fraction(gamma)
    if gamma <= 0:
        raise InputError("gamma must be positive")
    variables = tuple(_pvar(i) for i in range(1, n_max + 1)) + (
        "lam",
        "lam_sing",
        "lam_bad",
        "lam_good",
        "x",
        "y",
    )
    cons = _structural(n_max, m_star, lam_own="lam_good", lam_close="lam_good", cap3=cap3)
    cons.append(
        _mk_constraint("mix/sing", {"lam_sing": Fraction(1), "lam": Fraction(-1)}, "<=", 0)
    )
    cons.append(
        _mk_constraint("mix/good", {"lam_good": Fraction(1), "lam": Fraction(-1)}, "<=", 0)
    )
    cons.append(
        _mk_constraint(
            "mix/bad",
            {
                "lam_bad": gamma / (gamma + 1),
                "lam_good": Fraction(1, 1) / (gamma + 1),
                "lam": Fraction(-1),
            },
            "<=",
            0,
        )
    )

    def lam_for(a, b, A, B) -> str:
        m = len(a)
        if m == 1:
            return "lam_sing"
        if m == 2:
            # The Bad configuration has entries (1,1) against (3,3) with the
            # big side realizable at 7; its relaxation copies at B = 6 carry an
            # identical linear form (p_7 = 0 and the min() always selects the
            # small side's argument), so the lam_bad rating must cover the
            # whole tight range B in {6,7} or the discount is vacuous.
            if a == (1, 1) and b == (3, 3) and B >= 6:
                return "lam_bad"
            if a == (3, 3) and b == (1, 1) and A >= 6:
                return "lam_bad"
        return "lam_good"

    def label_for_factory(fam_m: int):
        def label_for(a, b, A, B) -> str:
            if lam_for(a, b, A, B) == "lam_bad":
                if b == (3, 3):
                    return f"bad/(1,1,3,3,B={B})/A={A}"
                return f"bad/(3,3,1,1,A={A})/B={B}"
            astr = ",".join(map(str, a))
            bstr = ",".join(map(str, b))
            return f"H/m={fam_m}/a={astr}/b={bstr}/A={A}/B={B}"

        return label_for

    fams = tuple(
        HFamily(m, n_max, lam_var_for=lam_for, label_for=label_for_factory(m))
        for m in range(1, m_star)
    )
    return LPInstance(
        name=f"mixed-n{n_max}-m{m_star}",
        variables=variables,
        constraints=tuple(cons),
        families=fams,
        objective_var="lam",
        meta={
            "kind": "mixed",
            "n_max": n_max,
            "m_star": m_star,
            "gamma": gamma,
            "cap3": cap3,
        },
    )


def _violated_family_tuples_exact(
    lp: LPInstance, assignment: dict[str, Fraction]
) -> list[tuple[HFamily, tuple]]:
    out = []
    for fam in lp.families:
        for a, b, A, B in fam.tuples():
            if fam.tuple_slack(a, b, A, B, assignment) < 0:
                out.append((fam, (a, b, A, B)))
    return out


def solve(lp: LPInstance, max_rounds: int = 200) -> LPSolution:
    """Exact optimum by constraint generation over the symbolic families.

    Solves the structural subset, scans the families in floats for
    violated tuples, verifies candidates exactly, adds the maximizing
    branch of each confirmed violation, and repeats.  Finishes with a
    full exact feasibility pass over every family tuple; an assignment
    optimal for the subset and feasible for the whole program is optimal
    for the whole program.
    """
    active: list[LinearConstraint] = list(lp.constraints)
    added_labels: set[str] = set()
    objective = {lp.objective_var: Fraction(1)}
    rounds = 0
    while True:
        rounds += 1
        if rounds > max_rounds:
            raise InvariantError("constraint generation did not converge")
        res: SimplexResult = solve_simplex(
            lp.variables, [(dict(c.coeffs), c.rel, c.rhs) for c in active], objective
        )
        if res.status != "optimal":
            return LPSolution(status=res.status, objective_value=None, assignment={},
                              rounds=rounds, active_constraints=len(active))
        assignment = res.assignment
        n_max = lp.meta.get("n_max", 0)
        pf = [0.0] * (n_max + 2)
        for i in range(1, n_max + 1):
            pf[i] = float(assignment.get(_pvar(i), ZERO))
        lam_of = {
            v: float(assignment.get(v, ZERO))
            for v in lp.variables
            if v.startswith("lam")
        }

        candidates: list[tuple[float, HFamily, tuple]] = []
        for fam in lp.families:
            for viol, t in fam.scan(pf, lam_of, tol=1e-12):
                candidates.append((viol, fam, t))
        confirmed: list[tuple[float, HFamily, tuple]] = []
        for viol, fam, t in candidates:
            if fam.tuple_slack(*t, assignment) < 0:
                confirmed.append((viol, fam, t))
        if not confirmed:
            # floats found nothing; certify exactly before declaring victory
            exact_violations = _violated_family_tuples_exact(lp, assignment)
            if not exact_violations:
                value = assignment.get(lp.objective_var, ZERO)
                return LPSolution(
                    status="optimal",
                    objective_value=value,
                    assignment=assignment,
                    rounds=rounds,
                    active_constraints=len(active),
                )
            to_add = [(0.0, fam, t) for fam, t in exact_violations[:50]]
        else:
            confirmed.sort(key=lambda e: -e[0])
            to_add = confirmed[:50]

        # prune inactive previously-added family branches to keep the
        # working set small; structural constraints always stay
        keep: list[LinearConstraint] = []
        for c in active:
            if c.label in added_labels and c.slack(assignment) > 0:
                continue
            keep.append(c)
        active = keep
        for _, fam, t in to_add:
            best = None
            for c in fam.branch_constraints(*t):
                val = c.lhs_value(assignment) - c.rhs
                if best is None or val > best[0]:
                    best = (val, c)
            c = best[1]
            if c.label not in {a.label for a in active}:
                active.append(c)
                added_labels.add(c.label)


@dataclass(frozen=True)
class SlackReport:
    """Exact slacks per label; family labels are at tuple granularity."""

    slacks: dict[str, Fraction]
    tight: tuple[str, ...]
    violated: tuple[str, ...]

    @property
    def feasible(self) -> bool:
        return not self.violated


def slack_report(lp: LPInstance, assignment: dict[str, Fraction]) -> SlackReport:
    """Evaluate every constraint exactly at the given assignment.

    Structural constraints report their own slack.  Family constraints
    are reported per tuple: the slack is rhs minus the exact block cost
    h_value, i.e. the minimum over the tuple's branches.
    """
    slacks: dict[str, Fraction] = {}
    tight: list[str] = []
    violated: list[str] = []
    for c in lp.constraints:
        s = c.slack(assignment)
        slacks[c.label] = s
        if c.rel == "==":
            if s != 0:
                violated.append(c.label)
            else:
                tight.append(c.label)
        else:
            if s < 0:
                violated.append(c.label)
            elif s == 0:
                tight.append(c.label)
    for fam in lp.families:
        for a, b, A, B in fam.tuples():
            s = fam.tuple_slack(a, b, A, B, assignment)
            label = fam.label_for(a, b, A, B)
            slacks[label] = s
            if s < 0:
                violated.append(label)
            elif s == 0:
                tight.append(label)
    return SlackReport(slacks=slacks, tight=tuple(sorted(tight)), violated=tuple(sorted(violated)))


def extend_assignment(
    lp: LPInstance, probs: FlipProbabilities, lam: Fraction
) -> dict[str, Fraction]:
    """Assignment from a flip vector: p from probs, every lam variable set
    to lam, and x, y set to their smallest feasible values."""
    n_max = lp.meta.get("n_max")
    assignment: dict[str, Fraction] = {}
    for i in range(1, n_max + 1):
        assignment[_pvar(i)] = probs.mass(i)
    for v in lp.variables:
        if v.startswith("lam"):
            assignment[v] = Fraction(lam)
    if "x" in lp.variables:
        assignment["x"] = max(
            (A - 2) * probs.mass(A) for A in range(0, n_max + 2)
        )
    if "y" in lp.variables:
        best = ZERO
        for a in range(0, n_max + 1):
            for b in range(a + 1, n_max + 1):
                best = max(best, g_surrogate(probs, a, b))
        assignment["y"] = best
    return assignment


def solve_float(lp: LPInstance):
    """Cross-check: solve the fully expanded program with scipy (floats).

    Returns (status, objective) where objective is a float.  Intended for
    tests; the exact path never depends on it.
    """
    import numpy as np
    from scipy.optimize import linprog

    var_index = {v: i for i, v in enumerate(lp.variables)}
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for c in lp.all_constraints():
        row = [0.0] * len(lp.variables)
        for v, coef in c.coeffs:
            row[var_index[v]] += float(coef)
        if c.rel == "==":
            a_eq.append(row)
            b_eq.append(float(c.rhs))
        else:
            a_ub.append(row)
            b_ub.append(float(c.rhs))
    cvec = [0.0] * len(lp.variables)
    cvec[var_index[lp.objective_var]] = 1.0
    res = linprog(
        cvec,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=(0, None),
        method="highs",
    )
    status = "optimal" if res.status == 0 else ("infeasible" if res.status == 2 else "other")
    return status, (float(res.fun) if res.status == 0 else None)


_NAME_RE = re.compile(r"[^A-Za-z0-9_]")


def write_lp_file(lp: LPInstance, path: str) -> None:
    """Write the fully expanded program in CPLEX LP text format, plus a
    JSON sidecar at path + '.json' with exact rational coefficients."""
    used: dict[str, int] = {}

    def safe(label: str) -> str:
        base = _NAME_RE.sub("_", label)
        n = used.get(base, 0)
        used[base] = n + 1
        return base if n == 0 else f"{base}_{n}"

    side = {
        "name": lp.name,
        "variables": list(lp.variables),
        "objective": lp.objective_var,
        "meta": {k: str(v) for k, v in lp.meta.items()},
        "constraints": [],
    }
    with open(path, "w") as fh:
        fh.write(f"\\ {lp.name}\nMinimize\n obj: {lp.objective_var}\nSubject To\n")
        for c in lp.all_constraints():
            terms = []
            for v, coef in c.coeffs:
                sign = "+" if coef >= 0 else "-"
                mag = abs(coef)
                coef_txt = f"{float(mag):.17g}"
                terms.append(f"{sign} {coef_txt} {v}")
            rel = "=" if c.rel == "==" else "<="
            fh.write(f" {safe(c.label)}: {' '.join(terms)} {rel} {float(c.rhs):.17g}\n")
            side["constraints"].append(
                {
                    "label": c.label,
                    "coeffs": {v: f"{coef.numerator}/{coef.denominator}" for v, coef in c.coeffs},
                    "rel": c.rel,
                    "rhs": f"{c.rhs.numerator}/{c.rhs.denominator}",
                }
            )
        fh.write("Bounds\n")
        for v in lp.variables:
            fh.write(f" 0 <= {v}\n")
        fh.write("End\n")
    with open(path + ".json", "w") as fh:
        json.dump(side, fh)


def write_solution(sol: LPSolution, path: str) -> None:
    obj = sol.objective_value
    payload = {
        "status": sol.status,
        "objective": None if obj is None else f"{obj.numerator}/{obj.denominator}",
        "assignment": {
            v: f"{x.numerator}/{x.denominator}" for v, x in sorted(sol.assignment.items())
        },
        "rounds": sol.rounds,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def mixing_time_bound(
    n: int, k: int, d: int, lambda_star: Fraction, n_max: int
) -> int:
    """Step bound for the variable-length path argument.

    With alpha = (k - lambda_star d)/(k - d - 2), beta = n k/(k - d - 2)
    and excursion width W = 2 n_max + 1, the bound is
    2 ceil(2 beta W / alpha) ceil(ln n / alpha).  Requires k > d + 2 and
    k > lambda_star d.
    """
    if n < 2:
        raise InputError("need n >= 2")
    if k <= d + 2:
        raise InputError(f"need k > d + 2, got k={k}, d={d}")
    lam = Fraction(lambda_star)
    if k <= lam * d:
        raise InputError(f"need k > lambda_star * d = {lam * d}")
    alpha = (k - lam * d) / (k - d - 2)
    beta = Fraction(n * k, k - d - 2)
    w = 2 * n_max + 1
    first = -((-2 * beta * w) // alpha)  # exact ceil of a Fraction ratio
    x = math.log(n) / float(alpha)
    near = round(x)
    second = near if abs(x - near) < 1e-9 else math.ceil(x)
    second = max(second, 1)
    return 2 * int(first) * int(second)
