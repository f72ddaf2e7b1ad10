"""The query-complexity lab: symmetric Bernoulli boxes under min-rank costs.

Everything here orbits one family: n identical boxes worth M = 5*beta with
probability 1/alpha, priced either by the baseline cost min(|S|, alpha) or a
planted variant min(|S|, alpha, beta + |S - R|) that is cheaper only inside a
hidden alpha-subset R.  The family's headline property -- no positive-utility
strategy exists without knowing R, yet every R admits one -- is verified by
closed forms over all symmetric impulsive strategies; the query-distinguishing
experiment measures how often cost queries can tell the two oracles apart.

The asymptotic regime in which the distinguishing probability becomes
super-polynomially small needs n far beyond astronomical (the constants want
roughly n > e^310), so the lab verifies the finite building blocks exactly
(per-query agreement combinatorics, counting, family utilities) instead of
the asymptotic headline; reports say so explicitly.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .costs import HardnessCost, QueryCountingOracle
from .errors import DomainError

BANNER = (
    "the asymptotic indistinguishability regime is not desk-reproducible; "
    "this report verifies the finite building blocks exactly"
)

MAX_BUDGET = 10 ** 6
MAX_TRIALS = 10 ** 5


def _interval_ceil(build, *, what: str) -> int:
    """Ceiling of an irrational expression via interval arithmetic.

    `build` evaluates the expression in mpmath's interval context; precision
    is raised until both endpoints share a ceiling, so the result is exact
    (never a victim of one-ulp rounding across an integer boundary).
    """
    saved = mpmath.iv.prec
    try:
        for prec in (64, 128, 256, 512, 1024):
            mpmath.iv.prec = prec
            x = build()
            lo = int(mpmath.ceil(x.a))
            hi = int(mpmath.ceil(x.b))
            if lo == hi:
                return lo
    finally:
        mpmath.iv.prec = saved
    raise AssertionError(f"interval ceiling for {what} did not stabilize")


def _verify_ceiling(value: int, build, *, what: str) -> None:
    # back-substitution at an independent precision: value - 1 < x < value
    # must hold strictly (the expressions are irrational for integer n >= 3,
    # so landing exactly on an integer is impossible)
    saved = mpmath.iv.prec
    try:
        mpmath.iv.prec = 320
        x = build()
        if not (x.a > value - 1 and x.b < value):
            raise AssertionError(f"ceiling back-substitution failed for {what}")
    finally:
        mpmath.iv.prec = saved


@dataclass(frozen=True)
class HardnessParams:
    """n with its derived (alpha, beta, M, p); recomputed per call, never cached."""

    n: int
    alpha: int
    beta: int
    M: int
    p: Fraction

    @property
    def q(self) -> Fraction:
        return 1 - self.p


def hardness_params(n: int, *, alpha: int | None = None,
                    beta: int | None = None) -> HardnessParams:
    """alpha = ceil(ln n * sqrt(n) / 5), beta = ceil(ln^2 n / 5), M = 5*beta,
    p = 1/alpha -- computed with outward-rounded interval arithmetic so the
    integer ceilings are provably right.  Explicit alpha/beta overrides skip
    the formulas (used for small-n exhaustive testing)."""
    if alpha is None or beta is None:
        if n < 3:
            raise DomainError(f"derived parameters need n >= 3, got {n}")
    if alpha is None:
        build_a = lambda: mpmath.iv.ln(n) * mpmath.iv.sqrt(n) / 5
        alpha = _interval_ceil(build_a, what="alpha")
        _verify_ceiling(alpha, build_a, what="alpha")
    if beta is None:
        build_b = lambda: mpmath.iv.ln(n) ** 2 / 5
        beta = _interval_ceil(build_b, what="beta")
        _verify_ceiling(beta, build_b, what="beta")
    if not 1 <= alpha <= n:
        raise DomainError(f"need 1 <= alpha <= n, got alpha = {alpha}")
    if not 0 < beta < alpha:
        raise DomainError(f"need 0 < beta < alpha, got beta = {beta}, alpha = {alpha}")
    return HardnessParams(n=n, alpha=alpha, beta=beta, M=5 * beta,
                          p=Fraction(1, alpha))


def _cost_cap(params: HardnessParams, variant: str) -> int:
    if variant == "baseline":
        return params.alpha
    if variant == "planted_subsetR":
        return params.beta
    raise DomainError(f"variant must be baseline or planted_subsetR, got {variant!r}")


def symmetric_impulsive_utility(params: HardnessParams, s: int,
                                variant: str = "baseline") -> float:
    """Expected utility of impulsively opening s symmetric boxes, closed form.

    Halting at the first success, the expected cost telescopes to the clean
    identity E[min(#opened, m)] = (1 - q^k)/p with k = min(s, m), where m is
    the cost cap (alpha on the baseline, beta when opening inside the planted
    R).  Hence

        u(s) = M * (1 - q^s) - (1 - q^k)/p.

    Evaluated in floats via expm1/log1p (exact rational twin:
    symmetric_impulsive_utility_exact).
    """
    m = _cost_cap(params, variant)
    if not 0 <= s <= params.n:
        raise DomainError(f"need 0 <= s <= n, got s = {s}")
    if variant == "planted_subsetR" and s > params.alpha:
        raise DomainError(f"planted strategies open inside R: s <= alpha = {params.alpha}")
    if s == 0:
        return 0.0
    lq = math.log1p(-1.0 / params.alpha)
    k = min(s, m)
    hit = -math.expm1(s * lq)        # 1 - q^s
    cost = -math.expm1(k * lq) * params.alpha
    return params.M * hit - cost


def symmetric_impulsive_utility_exact(params: HardnessParams, s: int,
                                      variant: str = "baseline") -> Fraction:
    """Rational twin of the closed form (cost grows with s; meant for s <= ~30
    cross-checks and small-n exhaustive runs)."""
    m = _cost_cap(params, variant)
    if not 0 <= s <= params.n:
        raise DomainError(f"need 0 <= s <= n, got s = {s}")
    if variant == "planted_subsetR" and s > params.alpha:
        raise DomainError(f"planted strategies open inside R: s <= alpha = {params.alpha}")
    if s == 0:
        return Fraction(0)
    q = params.q
    k = min(s, m)
    return params.M * (1 - q ** s) - (1 - q ** k) / params.p


@dataclass(frozen=True)
class FamilyReport:
    """verify_family's findings: regime flags, the s-scan, per-case margins."""

    n: int
    alpha: int
    beta: int
    M: int
    regime: dict
    verdict: str                      # "pass" | "violation" | "regime not reached"
    max_baseline_utility: float       # over s >= 1
    argmax_s: int
    planted_utility: float            # opening all of R
    planted_lower_bound: float        # 5*beta*(1 - 1/e) - beta
    cases: tuple
    violations: tuple
    note: str

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "beta": self.beta,
            "M": self.M,
            "regime": dict(self.regime),
            "verdict": self.verdict,
            "max_baseline_utility": self.max_baseline_utility,
            "argmax_s": self.argmax_s,
            "planted_utility": self.planted_utility,
            "planted_lower_bound": self.planted_lower_bound,
            "cases": [dict(c) for c in self.cases],
            "violations": list(self.violations),
            "note": self.note,
            "banner": BANNER,
        }


def _case_of(s: int, alpha: int, beta: int) -> tuple[str, float]:
    """Proof-case label and utility bound for subset size s (baseline)."""
    if s == 0:
        return "case4:s=0", 0.0
    if s >= alpha:
        return "case1:s>=alpha", 5 * beta - alpha / 4.0
    if s >= 21 * beta:
        return "case2:21beta<=s<alpha", -beta / 4.0
    return "case3:0<s<21beta", (s / alpha) * (26 * beta - alpha)


def verify_family(n: int, *, alpha: int | None = None,
                  beta: int | None = None) -> FamilyReport:
    """Scan every symmetric impulsive strategy size s on the baseline cost.

    Symmetry is what makes the scan exhaustive: all boxes are identical, so
    some optimal strategy is impulsive and is determined by how many boxes it
    is prepared to open; utilities depend on s alone.  The report records the
    utility maximum (must stay < 0 for s >= 1), the planted strategy's
    utility (must be > 0), and for each proof case the minimum margin between
    the case's bound and the actual utilities it covers.
    """
    import numpy as np

    params = hardness_params(n, alpha=alpha, beta=beta)
    a, b, M = params.alpha, params.beta, params.M
    regime = {
        "alpha_gt_20beta": a > 20 * b,
        "alpha_gt_26beta": a > 26 * b,
    }
    in_regime = all(regime.values())

    s = np.arange(0, n + 1, dtype=np.float64)
    lq = math.log1p(-1.0 / a)
    hit = -np.expm1(s * lq)
    k = np.minimum(s, float(a))
    cost = -np.expm1(k * lq) * a
    u = M * hit - cost                     # u[0] == 0 exactly

    tail = u[1:]
    argmax = int(np.argmax(tail)) + 1
    max_u = float(tail[argmax - 1])
    planted = symmetric_impulsive_utility(params, a, "planted_subsetR")
    lower = 5 * b * (1 - 1 / math.e) - b

    case_stats: dict[str, dict] = {}
    violations = []
    for size in range(0, n + 1):
        name, bound = _case_of(size, a, b)
        margin = bound - float(u[size])
        stat = case_stats.setdefault(name, {
            "case": name, "count": 0, "bound": bound,
            "min_margin": math.inf, "min_margin_s": None,
        })
        stat["count"] += 1
        if margin < stat["min_margin"]:
            stat["min_margin"], stat["min_margin_s"] = margin, size
        if size >= 1 and u[size] >= 0:
            violations.append(size)

    if violations:
        verdict = "violation" if in_regime else "regime not reached"
    elif not in_regime:
        verdict = "regime not reached"
    elif planted <= 0:
        verdict = "violation"
    else:
        verdict = "pass"

    cases = tuple(
        {**case_stats[nm],
         "bound": ("varies (s/alpha)*(26beta-alpha)"
                   if nm.startswith("case3") else case_stats[nm]["bound"])}
        for nm in sorted(case_stats)
    )
    return FamilyReport(
        n=n, alpha=a, beta=b, M=M,
        regime=regime,
        verdict=verdict,
        max_baseline_utility=max_u,
        argmax_s=argmax,
        planted_utility=planted,
        planted_lower_bound=lower,
        cases=cases,
        violations=tuple(violations),
        note=("identical boxes admit an impulsive symmetric optimum, "
              "so the s-scan covers every strategy"),
    )


def hypergeometric_tail(n: int, alpha: int, beta: int) -> Fraction:
    """P(|S cap R| > beta) for independent uniform alpha-subsets S, R of [n].

    Exact summation: sum_{k > beta} C(alpha, k) C(n - alpha, alpha - k) / C(n, alpha).
    """
    total = math.comb(n, alpha)
    hits = sum(
        math.comb(alpha, k) * math.comb(n - alpha, alpha - k)
        for k in range(beta + 1, alpha + 1)
    )
    return Fraction(hits, total)


@dataclass(frozen=True)
class DistinguishTrial:
    """One replay: the hidden R, the query path, and both oracles' answers."""

    seed: int
    budget: int
    R: frozenset
    transcript: tuple = field(default_factory=tuple)

    @property
    def distinguishing(self) -> bool:
        return any(got != want for _, want, got in self.transcript)


def replay_trial(n: int, alpha: int, beta: int, R, queries,
                 seed: int = 0) -> DistinguishTrial:
    """Run one explicit query list against (c0, c_R), keeping the transcript.

    The transcript holds (S, c0 answer, c_R answer) per query; the c_R side
    goes through a QueryCountingOracle whose final count is asserted to equal
    the query-list length (the counting machinery is part of what the lab is
    expected to prove out).
    """
    c0 = HardnessCost(n, alpha)
    counted = QueryCountingOracle(HardnessCost(n, alpha, beta, R))
    transcript = []
    queries = [frozenset(S) for S in queries]
    for S in queries:
        transcript.append((S, c0.eval(S), counted.eval(S)))
    assert counted.count == len(queries)
    return DistinguishTrial(seed=seed, budget=len(queries),
                            R=frozenset(R), transcript=tuple(transcript))


@dataclass(frozen=True)
class DistinguishReport:
    n: int
    alpha: int
    beta: int
    algorithm: str
    trials: int
    budget: int
    queries_per_trial: int
    distinguishing_count: int
    rate: float
    aborted_count: int
    query_count_ok: bool
    fixed_set_stats: tuple
    witness: dict | None
    banner: str = BANNER

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "beta": self.beta,
            "algorithm": self.algorithm,
            "trials": self.trials,
            "budget": self.budget,
            "queries_per_trial": self.queries_per_trial,
            "distinguishing_count": self.distinguishing_count,
            "rate": self.rate,
            "aborted_count": self.aborted_count,
            "query_count_ok": self.query_count_ok,
            "fixed_set_stats": [dict(s) for s in self.fixed_set_stats],
            "witness": self.witness,
            "banner": self.banner,
        }


def distinguish_experiment(n: int, algorithm="random_uniform_alpha_sets",
                           budget: int = 100, trials: int = 1000,
                           seed: int = 0, *, alpha: int | None = None,
                           beta: int | None = None,
                           stats_sets: int = 5) -> DistinguishReport:
    """Replay a non-adaptive query algorithm against c_R for freshly planted R.

    `algorithm` is either the builtin name (each trial issues `budget`
    uniform random alpha-subsets) or a caller-provided list of query sets,
    replayed identically in every trial.  A trial is distinguishing when any
    query's c_R answer differs from c0's on the same set; for size-alpha
    queries that happens exactly when |S cap R| > beta.  Alongside the rate,
    the report compares, for fixed size-alpha sets, the empirical frequency
    of |S cap R| > beta with the exact hypergeometric tail (3-standard-error
    check).  Query counts against c_R are enforced per trial through
    QueryCountingOracle.
    """
    if not 1 <= budget <= MAX_BUDGET:
        raise DomainError(f"budget must be in [1, {MAX_BUDGET}], got {budget}")
    if not 1 <= trials <= MAX_TRIALS:
        raise DomainError(f"trials must be in [1, {MAX_TRIALS}], got {trials}")
    params = hardness_params(n, alpha=alpha, beta=beta)
    a, b = params.alpha, params.beta
    labels = range(1, n + 1)
    c0 = HardnessCost(n, a)

    if isinstance(algorithm, str):
        if algorithm != "random_uniform_alpha_sets":
            raise DomainError(f"unknown algorithm {algorithm!r}")
        algo_name = algorithm
        declared: list[frozenset] | None = None
        per_trial = budget
        aborted_per_trial = False
    else:
        algo_name = "caller_query_list"
        declared = [frozenset(S) for S in algorithm]
        for S in declared:
            if not S <= set(labels):
                raise DomainError(f"query {sorted(S)} outside 1..{n}")
        aborted_per_trial = len(declared) > budget
        per_trial = min(len(declared), budget)

    master = random.Random(seed)
    if declared is None:
        fixed_sets = [frozenset(master.sample(labels, a)) for _ in range(stats_sets)]
    else:
        fixed_sets = [S for S in declared[:per_trial] if len(S) == a]
    fixed_hits = [0] * len(fixed_sets)

    distinguishing = 0
    aborted = 0
    counts_ok = True
    witness: dict | None = None
    for t in range(trials):
        trial_seed = master.getrandbits(64)
        rng = random.Random(trial_seed)
        R = frozenset(rng.sample(labels, a))
        counted = QueryCountingOracle(HardnessCost(n, a, b, R))
        if declared is None:
            queries = [frozenset(rng.sample(labels, a)) for _ in range(per_trial)]
        else:
            queries = declared[:per_trial]
        found = None
        for S in queries:
            got = counted.eval(S)
            want = c0.eval(S)
            if got != want and found is None:
                found = (S, want, got)
        if counted.count != len(queries):
            counts_ok = False
        if aborted_per_trial:
            aborted += 1
        if found is not None:
            distinguishing += 1
            if witness is None:
                S, want, got = found
                witness = {
                    "trial": t,
                    "seed": trial_seed,
                    "S": sorted(S),
                    "c0": str(want),
                    "cR": str(got),
                    "overlap": len(S & R),
                }
        for idx, S in enumerate(fixed_sets):
            if len(S & R) > b:
                fixed_hits[idx] += 1

    stats = []
    exact = float(hypergeometric_tail(n, a, b))
    for S, hits in zip(fixed_sets, fixed_hits):
        emp = hits / trials
        se3 = 3.0 * math.sqrt(max(exact * (1.0 - exact), 0.0) / trials)
        stats.append({
            "set_size": len(S),
            "empirical": emp,
            "exact_tail": exact,
            "abs_diff": abs(emp - exact),
            "three_stderr": se3,
            "within": abs(emp - exact) <= se3 or trials * exact < 1e-12,
        })

    return DistinguishReport(
        n=n, alpha=a, beta=b,
        algorithm=algo_name,
        trials=trials,
        budget=budget,
        queries_per_trial=per_trial,
        distinguishing_count=distinguishing,
        rate=distinguishing / trials,
        aborted_count=aborted,
        query_count_ok=counts_ok,
        fixed_set_stats=tuple(stats),
        witness=witness,
    )
