"""Rule application search and obligation testing."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .. import types as T
from ..ffl.check import FflTypeError, typecheck_term
from ..ffl.evaluate import evaluate, run_function
from ..ffl.ops import context_names, context_types, normalize, positions, replace_at, subterm_at
from ..ffl.render import render
from ..ffl.terms import Lam, Probe, Term, kids
from ..gen import Constraints, GenConfig, GeneratorError, gen_one
from ..values import DEFAULT_BUDGET, Val, render_value
from .rules import SIDE_CONDITION, NoMatch, Obligation, get_rule


@dataclass
class SearchStats:
    positions: int = 0
    skeleton_matches: int = 0
    side_condition_failures: int = 0
    replay_mismatches: int = 0


@dataclass
class Justification:
    rule: str
    path: tuple
    instantiation: dict
    obligations: list  # of Obligation
    alternates: list = field(default_factory=list)  # further matching paths
    stats: SearchStats = field(default_factory=SearchStats)
    results: list = field(default_factory=list)  # obligation results, filled by callers
    names: tuple = ()  # binder names in scope at ``path``

    def describe_instantiation(self) -> dict:
        return {k: (render(v, self.names) if isinstance(v, Term) else str(v))
                for k, v in self.instantiation.items()}


@dataclass
class Mismatch:
    rule: str
    reason: str
    stats: SearchStats
    diff: Optional[str] = None

    def __str__(self):
        return self.reason + (f"\n{self.diff}" if self.diff else "")


def first_difference(a: Term, b: Term, path=()) -> Optional[tuple]:
    """Path of the outermost differing node, or None if equal."""
    if a == b:
        return None
    ka, kb = kids(a), kids(b)
    if type(a) is not type(b) or len(ka) != len(kb) or _node_label(a) != _node_label(b):
        return path
    for i, (x, y) in enumerate(zip(ka, kb)):
        if x != y:
            return first_difference(x, y, path + (i,))
    return path


def _node_label(t):
    return tuple(getattr(t, f) for f in ("op", "ty", "index", "value", "elem", "other", "tag")
                 if hasattr(t, f))


def term_diff(a: Term, b: Term) -> str:
    p = first_difference(a, b)
    if p is None:
        return ""
    return (f"first difference at {list(p)}:\n"
            f"  rewritten: {render(subterm_at(a, p))}\n"
            f"  target:    {render(subterm_at(b, p))}")


def justify_step(rule_name: str, src: Term, tgt: Term):
    """Find a position where ``rule_name`` rewrites ``src`` into ``tgt``.

    Positions are tried outermost first, left to right; every position is
    visited so that alternates and counters are complete. Both sides are
    compared after let-normalization.
    """
    rule = get_rule(rule_name)
    stats = SearchStats()
    hits: list = []
    first_side: Optional[str] = None
    first_diff: Optional[str] = None
    for path, sub, _depth in positions(src):
        stats.positions += 1
        inst = rule.match(sub, lambda p=path: context_types(src, p))
        if isinstance(inst, NoMatch):
            if inst.stage == SIDE_CONDITION:
                stats.skeleton_matches += 1
                stats.side_condition_failures += 1
                if first_side is None:
                    first_side = f"side condition failed at {list(path)}: {inst.reason}"
            continue
        stats.skeleton_matches += 1
        rewritten = normalize(replace_at(src, path, rule.build(inst)))
        if rewritten == tgt:
            hits.append((path, inst))
        else:
            stats.replay_mismatches += 1
            if first_diff is None:
                first_diff = f"rewriting at {list(path)} gives a different program\n" + term_diff(rewritten, tgt)
    if hits:
        path, inst = hits[0]
        return Justification(rule_name, path, inst, rule.obligations(inst),
                             [p for p, _ in hits[1:]], stats, names=context_names(src, path))
    if first_diff is not None:
        reason, diff = first_diff.split("\n", 1)
        return Mismatch(rule_name, reason, stats, diff)
    if first_side is not None:
        return Mismatch(rule_name, first_side, stats)
    return Mismatch(rule_name, f"no subterm matches the left-hand side of {rule_name}", stats)


def replay(j: Justification, src: Term) -> Term:
    """Re-apply a justification's instantiation at its path."""
    rule = get_rule(j.rule)
    return normalize(replace_at(src, j.path, rule.build(j.instantiation)))


# -- obligations ------------------------------------------------------------

@dataclass(frozen=True)
class TestedPass:
    trials: int
    evaluations: int

    ok = True
    __test__ = False  # not a pytest class despite the name

    def __str__(self):
        return f"tested ({self.evaluations} evaluations over {self.trials} trials)"


@dataclass(frozen=True)
class Counterexample:
    inputs: tuple
    detail: str
    trial: Optional[int] = None
    seed: Optional[int] = None

    ok = False

    def __str__(self):
        args = ", ".join(render_value(a) for a in self.inputs)
        where = f" (seed {self.seed}, trial {self.trial})" if self.trial is not None else ""
        return f"counterexample ({args}){where}: {self.detail}"


@dataclass(frozen=True)
class GeneratorFailure:
    reason: str

    ok = False

    def __str__(self):
        return f"generator failure: {self.reason}"


def _arrow_params(ty: T.Type) -> tuple:
    out = []
    while isinstance(ty, T.Arrow):
        out.append(ty.arg)
        ty = ty.result
    return tuple(out), ty


def _lambda_names(t: Term) -> list:
    names = []
    while isinstance(t, Lam):
        names.append(t.name or f"arg{len(names)}")
        t = t.body
    return names


def check_obligation(ob, cfg: GenConfig = GenConfig(), *, host: Optional[Term] = None,
                     path: Optional[tuple] = None, constraints: Constraints = Constraints(),
                     budget: int = DEFAULT_BUDGET):
    """Discharge an obligation by testing.

    * a closed Bool term is evaluated once;
    * a closed function returning Bool is applied to generated arguments;
    * an :class:`Obligation` with ``host`` and ``path`` is checked in place:
      the host program runs on generated inputs and the check is evaluated
      wherever control reaches ``path``. A check never reached in any trial
      is not a pass.
    """
    if isinstance(ob, Obligation):
        if host is None or path is None:
            raise ValueError("contextual obligations need the host term and path")
        return _check_in_context(ob, host, path, cfg, constraints, budget)
    try:
        ty = typecheck_term(ob)
    except FflTypeError as exc:
        return GeneratorFailure(f"obligation is ill-typed: {exc}")
    params, result = _arrow_params(ty)
    if result != T.BOOL:
        return GeneratorFailure(f"obligation has type {ty}, not a Bool predicate")
    if not params:
        out = evaluate(ob, budget)
        if isinstance(out, Val) and out.value is True:
            return TestedPass(1, 1)
        return Counterexample((), f"evaluated to {out}")
    named = list(zip(_lambda_names(ob), params))
    for trial in range(cfg.trials):
        try:
            args = gen_one(named, constraints, cfg.seed, trial, cfg)
        except GeneratorError as exc:
            return GeneratorFailure(str(exc))
        out = run_function(ob, args, budget)
        if not (isinstance(out, Val) and out.value is True):
            return Counterexample(args, f"evaluated to {out}", trial, cfg.seed)
    return TestedPass(cfg.trials, cfg.trials)


def _check_in_context(ob: Obligation, host: Term, path, cfg, constraints, budget):
    tag = ob.name
    probed = replace_at(host, path, Probe(tag, ob.check, subterm_at(host, path)))
    try:
        params, _ = _arrow_params(typecheck_term(probed))
    except FflTypeError as exc:
        return GeneratorFailure(f"obligation is ill-typed in context: {exc}")
    named = list(zip(_lambda_names(host), params))
    evaluations = 0
    for trial in range(cfg.trials):
        try:
            args = gen_one(named, constraints, cfg.seed, trial, cfg)
        except GeneratorError as exc:
            return GeneratorFailure(str(exc))
        log: list = []
        run_function(probed, args, budget, probes=log)
        for _tag, result in log:
            evaluations += 1
            if result is not True:
                return Counterexample(args, f"{ob.description}: check gave {result}", trial, cfg.seed)
    if evaluations == 0:
        return Counterexample((), f"{ob.description}: never reached in {cfg.trials} trials")
    return TestedPass(cfg.trials, evaluations)
