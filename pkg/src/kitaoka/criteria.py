"""The obstruction pipeline: structural and enumerative rules, each backed by a
theorem about fields admitting a universal classical ternary form, evaluated
in a fixed cheap-to-expensive order with machine-checkable certificates.

A fired rule's certificate re-validates from scratch through the public module
APIs; the verdict NoUniversalTernary requires at least one fired rule whose
scan was not budget-limited. KnownPositive comes only from the catalog flag.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import cone, lattice, units
from .errors import BudgetExceeded, RequiresKOne
from .field import Elem, Field, contains_sqrt, sqrt_exact, two_is_ramified

NO_UNIVERSAL_TERNARY = "NoUniversalTernary"
INCONCLUSIVE = "Inconclusive"
KNOWN_POSITIVE = "KnownPositive"

RULE_CITATIONS = {
    "R1": "a totally real field of odd degree admits no universal ternary "
          "classical form (local obstruction)",
    "R2": "with four or more classes of totally positive units modulo squares, "
          "every universal classical lattice splits off four orthogonal unit "
          "summands, so its rank is at least 4",
    "R3": "if 2 is unramified, the only totally real field admitting a "
          "universal ternary classical form is Q(sqrt5)",
    "R4": "with exactly one nonsquare totally positive unit class eps, a "
          "universal ternary classical lattice forces 2*eps = square and "
          "sqrt2 not in the field",
    "R5": "with exactly one nonsquare totally positive unit class eps, a "
          "universal ternary classical lattice forces every indecomposable "
          "lambda to satisfy lambda = square or eps*lambda = square",
    "R6": "with exactly one nonsquare totally positive unit class, a universal "
          "ternary classical lattice forces every totally positive alpha with "
          "N(alpha) < 2^d to have 2-power norm",
    "R7": "no totally real field containing sqrt6 or sqrt33 admits a universal "
          "ternary classical lattice",
    "R8": "a quartic field with sqrt2 absent, or with a nonsquare totally "
          "positive unit, admits no universal ternary quadratic form",
    "E1": "a field admitting a universal ternary classical lattice with one "
          "nonsquare unit class has 2*O+ inside sums of squares (bounded scan, "
          "evidence only: the needed number of squares is unbounded a priori)",
    "E2": "a field with sqrt2 absent admitting a universal ternary classical "
          "form has every element of 2*O+ represented by <1,1,2,2> (bounded "
          "scan, evidence only)",
}

RULE_ORDER = ["R1", "R2", "R3", "R4", "R5", "R6", "R7", "R8", "E1", "E2"]


@dataclass(frozen=True)
class Budgets:
    trace_bound: int = 20
    node_limit: int = 10_000_000
    s_max: int = 6
    evidence_trace_bound: int = 6
    descent_max_iter: int = 64

    def to_dict(self) -> dict:
        return {
            "trace_bound": self.trace_bound,
            "node_limit": self.node_limit,
            "s_max": self.s_max,
            "evidence_trace_bound": self.evidence_trace_bound,
            "descent_max_iter": self.descent_max_iter,
        }


@dataclass
class RuleResult:
    rule_id: str
    fired: bool
    applicable: bool
    citation: str
    certificate: dict
    budget_limited: bool = False

    def to_dict(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "fired": self.fired,
            "applicable": self.applicable,
            "budget_limited": self.budget_limited,
            "citation": self.citation,
            "certificate": self.certificate,
        }


@dataclass
class ObstructionReport:
    field_id: str
    verdict: str
    primary_rule: str | None
    rules: list[RuleResult]
    budgets: Budgets
    unit_class_exponent: int  # k with |U+/U^2| = 2^k
    epsilon: str | None

    def rule(self, rule_id: str) -> RuleResult:
        return next(r for r in self.rules if r.rule_id == rule_id)

    def to_dict(self) -> dict:
        return {
            "field_id": self.field_id,
            "verdict": self.verdict,
            "primary_rule": self.primary_rule,
            "unit_class_exponent": self.unit_class_exponent,
            "epsilon": self.epsilon,
            "rules": [r.to_dict() for r in self.rules],
            "budgets": self.budgets.to_dict(),
        }


@dataclass(frozen=True)
class SquaresEntry:
    alpha: Elem
    squares_needed: int | None  # None: not found within s_max (evidence only)


@dataclass(frozen=True)
class SquaresReport:
    entries: tuple[SquaresEntry, ...]
    trace_bound: int
    s_max: int

    @property
    def all_succeeded(self) -> bool:
        return all(e.squares_needed is not None for e in self.entries)

    def failures(self) -> list[SquaresEntry]:
        return [e for e in self.entries if e.squares_needed is None]


def check_sum_of_squares_2OK(
    f: Field, trace_bound: int, s_max: int, node_limit: int = 10_000_000
) -> SquaresReport:
    """For each totally positive alpha with Tr <= bound, the minimal s <= s_max
    with 2*alpha a sum of s squares, or a recorded failure-at-budget. Failure
    is evidence only, never an obstruction certificate by itself."""
    forms = {s: lattice.ones_form(f, s) for s in range(1, s_max + 1)}
    entries = []
    for alpha in cone.enumerate_tp_by_trace(f, trace_bound, node_limit):
        target = 2 * alpha
        found = None
        for s in range(1, s_max + 1):
            if lattice.represents(forms[s], target, node_limit) is not None:
                found = s
                break
        entries.append(SquaresEntry(alpha, found))
    return SquaresReport(tuple(entries), trace_bound, s_max)


def _unit_context(f: Field, node_limit: int):
    group = units.build_unit_group(f)
    data = units.tp_units_mod_squares(f, group, node_limit)
    return group, data


def obstruct(f: Field, budgets: Budgets | None = None) -> ObstructionReport:
    """Run every rule in order and assemble the verdict with certificates."""
    budgets = budgets or Budgets()
    nl = budgets.node_limit
    group, data = _unit_context(f, nl)
    k = data.k
    eps = data.epsilon
    results: list[RuleResult] = []

    def record(rule_id, fired, certificate, applicable=True, budget_limited=False):
        results.append(
            RuleResult(rule_id, fired, applicable, RULE_CITATIONS[rule_id],
                       certificate, budget_limited)
        )

    def guarded(rule_id, applicable, runner):
        if not applicable:
            record(rule_id, False, {"note": "not applicable"}, applicable=False)
            return
        try:
            fired, cert = runner()
            record(rule_id, fired, cert)
        except BudgetExceeded as e:
            record(rule_id, False, {"note": f"budget exceeded: {e}"}, budget_limited=True)

    # R1: odd degree
    record("R1", f.degree % 2 == 1, {"degree": f.degree})

    # R2: k >= 2
    record("R2", k >= 2, {"k": k, "classes": 2**k})

    # R3: 2 unramified and not Q(sqrt5)
    is_qsqrt5 = f.degree == 2 and f.spec.disc == 5
    record(
        "R3",
        (not two_is_ramified(f)) and not is_qsqrt5,
        {"disc": f.spec.disc, "two_ramified": two_is_ramified(f), "is_qsqrt5": is_qsqrt5},
    )

    # R4 (k=1): 2*eps must be a square and sqrt2 must be absent
    def run_r4():
        sqrt2 = contains_sqrt(f, 2)
        two_eps_root = sqrt_exact(f, 2 * eps)
        cert = {
            "k": 1,
            "epsilon": str(eps),
            "sqrt2_in_field": None if sqrt2 is None else str(sqrt2),
            "two_eps_square_root": None if two_eps_root is None else str(two_eps_root),
        }
        return (two_eps_root is None) or (sqrt2 is not None), cert

    guarded("R4", k == 1, run_r4)

    # R5 (k=1): an indecomposable lambda with neither lambda nor eps*lambda square
    def run_r5():
        scanned_to = 0
        for lam in cone.iter_indecomposables(f, budgets.trace_bound, nl):
            scanned_to = lam.trace()
            if sqrt_exact(f, lam) is not None:
                continue
            if sqrt_exact(f, eps * lam) is not None:
                continue
            cert = {
                "lambda": str(lam),
                "norm": lam.norm(),
                "lambda_square": False,
                "eps_lambda_square": False,
                "indecomposable": True,
                "scanned_up_to_trace": scanned_to,
            }
            return True, cert
        return False, {"scanned_up_to_trace": budgets.trace_bound, "counterexample": None}

    guarded("R5", k == 1, run_r5)

    # R6 (k=1): a certified non-2-power norm below 2^d
    def run_r6():
        scan = cone.small_norm_scan(f, budgets.trace_bound, "auto", nl)
        bad = scan.non_powers_of_two()
        cert = {
            "exhaustive_mod_units": scan.exhaustive,
            "trace_bound": scan.trace_bound,
            "norm_bound": scan.norm_bound,
        }
        if bad:
            cert["element"] = str(bad[0].elem)
            cert["norm"] = bad[0].norm
            return True, cert
        cert["element"] = None
        return False, cert

    guarded("R6", k == 1, run_r6)

    # R7: sqrt6 or sqrt33 in the field
    def run_r7():
        r6w = contains_sqrt(f, 6)
        r33w = contains_sqrt(f, 33)
        cert = {
            "sqrt6": None if r6w is None else str(r6w),
            "sqrt33": None if r33w is None else str(r33w),
        }
        return (r6w is not None) or (r33w is not None), cert

    guarded("R7", True, run_r7)

    # R8: quartic with sqrt2 absent or k >= 1
    def run_r8():
        sqrt2 = contains_sqrt(f, 2)
        fired = f.degree == 4 and (sqrt2 is None or k >= 1)
        cert = {
            "degree": f.degree,
            "sqrt2_in_field": None if sqrt2 is None else str(sqrt2),
            "k": k,
        }
        return fired, cert

    guarded("R8", f.degree == 4, run_r8)

    # E1 evidence: 2*O+ inside sums of squares (bounded)
    def run_e1():
        rep = check_sum_of_squares_2OK(f, budgets.evidence_trace_bound, budgets.s_max, nl)
        cert = {
            "trace_bound": rep.trace_bound,
            "s_max": rep.s_max,
            "checked": len(rep.entries),
            "all_succeeded": rep.all_succeeded,
            "failures": [str(e.alpha) for e in rep.failures()][:8],
        }
        return False, cert  # evidence rules never fire

    guarded("E1", True, run_e1)

    # E2 evidence: <1,1,2,2> coverage of 2*O+ (bounded)
    def run_e2():
        cov = lattice.check_1122_coverage(f, budgets.evidence_trace_bound, nl)
        cert = {
            "trace_bound": cov.trace_bound,
            "checked": cov.checked,
            "all_covered": cov.all_covered,
            "counterexample": None if cov.counterexample is None else str(cov.counterexample),
        }
        return False, cert  # evidence rules never fire

    guarded("E2", True, run_e2)

    fired = [r for r in results if r.fired and not r.budget_limited]
    if fired:
        verdict = NO_UNIVERSAL_TERNARY
        primary = fired[0].rule_id
    elif f.spec.known_positive:
        verdict = KNOWN_POSITIVE
        primary = None
    else:
        verdict = INCONCLUSIVE
        primary = None
    return ObstructionReport(
        field_id=f.id,
        verdict=verdict,
        primary_rule=primary,
        rules=results,
        budgets=budgets,
        unit_class_exponent=k,
        epsilon=None if eps is None else str(eps),
    )


# -- the k=1 necessary-condition profile admitted by a universal ternary ------------


@dataclass
class ConditionResult:
    condition: str
    status: str  # "pass" | "fail" | "evidence"
    exhaustive: bool
    certificate: dict

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "status": self.status,
            "exhaustive": self.exhaustive,
            "certificate": self.certificate,
        }


@dataclass
class ConditionProfile:
    field_id: str
    k: int
    epsilon: str
    conditions: list[ConditionResult]
    budgets: Budgets

    def condition(self, name: str) -> ConditionResult:
        return next(c for c in self.conditions if c.condition == name)

    def to_dict(self) -> dict:
        return {
            "field_id": self.field_id,
            "k": self.k,
            "epsilon": self.epsilon,
            "conditions": [c.to_dict() for c in self.conditions],
            "budgets": self.budgets.to_dict(),
        }


def necessary_condition_profile(f: Field, budgets: Budgets | None = None) -> ConditionProfile:
    """Evaluates, for a field with exactly one nonsquare totally positive unit
    class, each checkable necessary condition for admitting a universal
    ternary classical lattice. Scan-backed passes are bounded evidence unless
    flagged exhaustive."""
    budgets = budgets or Budgets()
    nl = budgets.node_limit
    group, data = _unit_context(f, nl)
    if data.k != 1:
        raise RequiresKOne(f"profile needs k = 1, {f.id} has k = {data.k}")
    eps = data.epsilon
    out: list[ConditionResult] = []

    # indecomposables: lambda = sq or eps*lambda = sq; and lambda = sq or 2*lambda = sq
    fail_eps = None
    fail_two = None
    for lam in cone.iter_indecomposables(f, budgets.trace_bound, nl):
        lam_sq = sqrt_exact(f, lam) is not None
        if not lam_sq and fail_eps is None and sqrt_exact(f, eps * lam) is None:
            fail_eps = lam
        if not lam_sq and fail_two is None and sqrt_exact(f, 2 * lam) is None:
            fail_two = lam
        if fail_eps is not None and fail_two is not None:
            break
    out.append(ConditionResult(
        "indecomposable_eps_square",
        "fail" if fail_eps is not None else "pass",
        False,
        {"counterexample": None if fail_eps is None else str(fail_eps),
         "trace_bound": budgets.trace_bound},
    ))
    out.append(ConditionResult(
        "indecomposable_two_square",
        "fail" if fail_two is not None else "pass",
        False,
        {"counterexample": None if fail_two is None else str(fail_two),
         "trace_bound": budgets.trace_bound},
    ))

    root = sqrt_exact(f, 2 * eps)
    out.append(ConditionResult(
        "two_eps_square",
        "pass" if root is not None else "fail",
        True,
        {"square_root": None if root is None else str(root),
         "two_ramified": two_is_ramified(f)},
    ))

    sqrt2 = contains_sqrt(f, 2)
    out.append(ConditionResult(
        "sqrt2_absent",
        "pass" if sqrt2 is None else "fail",
        True,
        {"witness": None if sqrt2 is None else str(sqrt2)},
    ))

    rep = check_sum_of_squares_2OK(f, budgets.evidence_trace_bound, budgets.s_max, nl)
    out.append(ConditionResult(
        "two_cone_sums_of_squares",
        "pass" if rep.all_succeeded else "evidence",
        False,
        {"trace_bound": rep.trace_bound, "s_max": rep.s_max,
         "failures": [str(e.alpha) for e in rep.failures()][:8]},
    ))

    scan = cone.small_norm_scan(f, budgets.trace_bound, "auto", nl)
    bad = scan.non_powers_of_two()
    out.append(ConditionResult(
        "small_norms_power_of_two",
        "fail" if bad else "pass",
        scan.exhaustive,
        {"counterexample": None if not bad else str(bad[0].elem),
         "norm": None if not bad else bad[0].norm,
         "trace_bound": scan.trace_bound},
    ))

    return ConditionProfile(f.id, data.k, str(eps), out, budgets)
