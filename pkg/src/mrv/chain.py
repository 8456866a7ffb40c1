"""Chain manifests, step dispatch, endpoint differential testing, reports."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .coupling import (
    CouplingPredicate, PredicateError, StructureError, check_coupling,
)
from .ffl.evaluate import run_function
from .ffl.ops import expand_synonyms
from .gen import Constraints, GenConfig, GeneratorError, gen_one
from .il.parser import ParseError
from .il.typecheck import TypedProgram, TypeErrors, load_program
from .rewrite import Justification, check_obligation, justify_step, rule_names
from .rewrite.engine import term_diff
from .translate import translate
from .values import DEFAULT_BUDGET, Diverged, RuntimeErr, render_value, same_outcome

STEP_KINDS = ("rewrite", "coupling", "definitional")
JUSTIFIED = "Justified"
VALIDATED = "EmpiricallyValidated"
FAILED = "Failed"

_CONFIG_KEYS = {"trials": "trials", "seed": "seed", "budget": "budget",
                "maxGraph": "max_graph", "maxIter": "max_iter", "maxLen": "max_len", "inputs": "inputs"}


class ManifestError(Exception):
    def __init__(self, where: str, cause: str):
        super().__init__(f"{where}: {cause}")
        self.where = where
        self.cause = cause


@dataclass(frozen=True)
class ChainConfig:
    trials: int = 200
    seed: int = 42
    budget: int = DEFAULT_BUDGET
    max_graph: int = 6
    max_iter: int = 3
    max_len: int = 6
    constraints: Constraints = Constraints()

    @property
    def gen(self) -> GenConfig:
        return GenConfig(trials=self.trials, seed=self.seed, max_len=self.max_len,
                         max_graph=self.max_graph, max_iter=self.max_iter)


@dataclass
class ProgramEntry:
    path: Path
    source: str
    typed: TypedProgram

    @property
    def label(self) -> str:
        return self.path.name


@dataclass
class Step:
    kind: str
    rule: Optional[str] = None
    invariant: Optional[CouplingPredicate] = None
    at: object = None


@dataclass
class ChainManifest:
    path: Optional[Path]
    programs: list
    steps: list
    config: ChainConfig


# -- loading --------------------------------------------------------------------

def _int_field(value, where, minimum=0):
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ManifestError(where, f"expected an integer >= {minimum}, got {value!r}")
    return value


def parse_config(data) -> ChainConfig:
    if data is None:
        return ChainConfig()
    if not isinstance(data, dict):
        raise ManifestError("config", "expected an object")
    kwargs = {}
    for key, value in data.items():
        if key not in _CONFIG_KEYS:
            raise ManifestError(f"config.{key}", "unknown configuration key")
        if key == "inputs":
            try:
                kwargs["constraints"] = Constraints.from_json(value)
            except GeneratorError as exc:
                raise ManifestError("config.inputs", str(exc)) from exc
        else:
            minimum = 1 if key in ("trials", "budget") else 0
            kwargs[_CONFIG_KEYS[key]] = _int_field(value, f"config.{key}", minimum)
    return ChainConfig(**kwargs)


def _load_program(path: Path, where: str) -> ProgramEntry:
    try:
        source = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(where, f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return ProgramEntry(path, source, load_program(source, str(path)))
    except ParseError as exc:
        raise ManifestError(where, exc.render()) from exc
    except TypeErrors as exc:
        raise ManifestError(where, str(exc)) from exc


def manifest_from_json(data, base: Path, path: Optional[Path] = None) -> ChainManifest:
    if not isinstance(data, dict):
        raise ManifestError("$", "manifest must be a JSON object")
    unknown = set(data) - {"programs", "steps", "config", "description"}
    if unknown:
        raise ManifestError(sorted(unknown)[0], "unknown manifest field")
    programs = data.get("programs")
    if not isinstance(programs, list) or len(programs) < 2 or not all(isinstance(p, str) for p in programs):
        raise ManifestError("programs", "expected a list of at least two file paths")
    steps = data.get("steps")
    if not isinstance(steps, list):
        raise ManifestError("steps", "expected a list")
    if len(steps) != len(programs) - 1:
        raise ManifestError("steps", f"{len(programs)} programs need {len(programs) - 1} steps, got {len(steps)}")
    config = parse_config(data.get("config"))
    entries = [_load_program(base / p, f"programs[{i}]") for i, p in enumerate(programs)]
    parsed = [_parse_step(s, f"steps[{i}]", entries[i], entries[i + 1]) for i, s in enumerate(steps)]
    if entries[0].typed.signature != entries[-1].typed.signature:
        raise ManifestError("programs", "first and last program have different signatures")
    return ChainManifest(path, entries, parsed, config)


def _parse_step(s, where, src: ProgramEntry, tgt: ProgramEntry) -> Step:
    if not isinstance(s, dict):
        raise ManifestError(where, "expected an object")
    kind = s.get("kind")
    if kind not in STEP_KINDS:
        raise ManifestError(f"{where}.kind", f"expected one of {', '.join(STEP_KINDS)}, got {kind!r}")
    unknown = set(s) - {"kind", "rule", "invariant", "at", "note"}
    if unknown:
        raise ManifestError(f"{where}.{sorted(unknown)[0]}", "unknown step field")
    rule = s.get("rule")
    if kind == "rewrite" and rule is None:
        raise ManifestError(f"{where}.rule", "rewrite steps name a rule")
    if rule is not None and rule not in rule_names():
        raise ManifestError(f"{where}.rule", f"unknown rule {rule!r}")
    if kind != "coupling":
        return Step(kind, rule=rule)
    text = s.get("invariant")
    if not isinstance(text, str):
        raise ManifestError(f"{where}.invariant", "coupling steps need an invariant string")
    try:
        inv = CouplingPredicate.parse(text).typecheck(src.typed, tgt.typed)
    except PredicateError as exc:
        raise ManifestError(f"{where}.invariant", str(exc)) from exc
    at = s.get("at", "end")
    if not (at in ("end", "head") or (isinstance(at, list) and len(at) == 2
                                       and all(isinstance(k, int) and k >= 0 for k in at))):
        raise ManifestError(f"{where}.at", f"expected \"end\", \"head\" or [k1, k2], got {at!r}")
    return Step(kind, invariant=inv, at=at)


def load_manifest(path) -> ChainManifest:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(str(path), f"cannot read manifest: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(str(path), f"invalid JSON: {exc}") from exc
    return manifest_from_json(data, path.parent, path)


# -- reports --------------------------------------------------------------------

@dataclass
class StepResult:
    index: int
    source: str
    target: str
    kind: str
    method: str
    verdict: str
    detail: str
    obligations: list = field(default_factory=list)  # (name, result text, ok)
    seconds: float = 0.0
    failure: object = None

    @property
    def ok(self) -> bool:
        return self.verdict != FAILED


@dataclass
class DifferentialSummary:
    trials: int
    mismatches: int
    diverged: int
    agreed_errors: int
    witnesses: list  # (trial, inputs, outcome1, outcome2)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.mismatches == 0


@dataclass
class VerificationReport:
    manifest: Optional[str]
    steps: list
    endpoint: DifferentialSummary
    config: ChainConfig
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.steps) and self.endpoint.ok

    @property
    def overall(self) -> str:
        return "Pass" if self.ok else "Fail"

    def to_json(self) -> dict:
        return {
            "manifest": self.manifest,
            "overall": self.overall,
            "config": {"trials": self.config.trials, "seed": self.config.seed,
                       "budget": self.config.budget, "maxGraph": self.config.max_graph,
                       "maxIter": self.config.max_iter},
            "steps": [{
                "index": s.index, "from": s.source, "to": s.target, "kind": s.kind,
                "method": s.method, "verdict": s.verdict, "detail": s.detail,
                "obligations": [{"name": n, "result": r, "ok": ok} for n, r, ok in s.obligations],
                "seconds": round(s.seconds, 3),
            } for s in self.steps],
            "endpoint": {
                "trials": self.endpoint.trials, "mismatches": self.endpoint.mismatches,
                "diverged": self.endpoint.diverged, "agreedErrors": self.endpoint.agreed_errors,
                "witnesses": [{"trial": t, "inputs": [render_value(a) for a in args],
                               "source": str(o1), "target": str(o2)}
                              for t, args, o1, o2 in self.endpoint.witnesses],
                "seconds": round(self.endpoint.seconds, 3),
            },
            "seconds": round(self.seconds, 3),
        }

    def to_text(self, verbose: bool = False) -> str:
        lines = [f"chain {self.manifest or '<inline>'}: {len(self.steps)} steps"]
        for s in self.steps:
            lines.append(f"  step {s.index}: {s.source} -> {s.target}  [{s.method}]  {s.verdict}")
            if verbose or not s.ok:
                lines.extend("      " + ln for ln in s.detail.splitlines())
            for name, result, ok in s.obligations:
                if verbose or not ok:
                    lines.append(f"      obligation {name}: {result}")
        e = self.endpoint
        lines.append(f"  endpoint differential: {e.trials} trials, {e.mismatches} mismatches"
                     + (f", {e.diverged} diverged on both sides" if e.diverged else "")
                     + (f", {e.agreed_errors} identical runtime errors" if e.agreed_errors else ""))
        for t, args, o1, o2 in e.witnesses:
            lines.append(f"      trial {t} ({', '.join(render_value(a) for a in args)}): {o1} vs {o2}")
        lines.append(f"overall: {self.overall} ({self.seconds:.2f}s)")
        return "\n".join(lines)


# -- verification -----------------------------------------------------------------

def differential_test(p1: TypedProgram, p2: TypedProgram, cfg: ChainConfig = ChainConfig(),
                      terms=None, max_witnesses: int = 3) -> DifferentialSummary:
    """Run both translations on identical generated inputs; exact equality."""
    start = time.perf_counter()
    t1, t2 = terms if terms is not None else (translate(p1), translate(p2))
    mismatches = diverged = agreed = 0
    witnesses = []
    gcfg = cfg.gen
    for trial in range(cfg.trials):
        args = gen_one(p1.params, cfg.constraints, cfg.seed, trial, gcfg)
        o1 = run_function(t1, args, cfg.budget)
        o2 = run_function(t2, args, cfg.budget)
        if same_outcome(o1, o2):
            if isinstance(o1, Diverged):
                diverged += 1
            elif isinstance(o1, RuntimeErr):
                agreed += 1
            continue
        mismatches += 1
        if len(witnesses) < max_witnesses:
            witnesses.append((trial, args, o1, o2))
    return DifferentialSummary(cfg.trials, mismatches, diverged, agreed, witnesses,
                               time.perf_counter() - start)


def _rewrite_step(step: Step, t1, t2, cfg: ChainConfig):
    j = justify_step(step.rule, t1, t2)
    if not isinstance(j, Justification):
        st = j.stats
        detail = (f"{j}\nsearched {st.positions} positions, {st.skeleton_matches} matched the rule "
                  f"shape, {st.side_condition_failures} failed a side condition")
        return FAILED, detail, [], j
    results = []
    for ob in j.obligations:
        r = check_obligation(ob, cfg.gen, host=t1, path=j.path,
                             constraints=cfg.constraints, budget=cfg.budget)
        results.append((ob.name, str(r), r.ok))
    inst = "\n".join(f"  {k} = {v}" for k, v in j.describe_instantiation().items()
                     if k in ("f", "xs", "ys", "xss", "acc0", "init", "n"))
    detail = f"{step.rule} at position {list(j.path)}"
    if j.alternates:
        detail += f" (also matches at {len(j.alternates)} other positions)"
    detail += "\n" + inst
    verdict = JUSTIFIED if all(ok for _, _, ok in results) else FAILED
    if verdict == FAILED:
        detail = "an obligation failed\n" + detail
    return verdict, detail, results, j


def _definitional_step(step: Step, t1, t2):
    e1, e2 = expand_synonyms(t1), expand_synonyms(t2)
    if e1 == e2:
        return JUSTIFIED, "alpha-equal after synonym expansion", [], None
    return FAILED, "programs differ after synonym expansion\n" + term_diff(e1, e2), [], None


def _coupling_step(step: Step, p1: TypedProgram, p2: TypedProgram, cfg: ChainConfig):
    try:
        r = check_coupling(p1, p2, step.invariant, cfg.gen, at=step.at,
                           constraints=cfg.constraints, budget=cfg.budget)
    except StructureError as exc:
        return FAILED, f"no product program: {exc}", [], exc
    if r.ok:
        return VALIDATED, f"{r.summary()}\ninvariant: {step.invariant.text}", [], r
    detail = r.summary()
    if r.states:
        detail += f"\nsource state: {r.states[0]}\ntarget state: {r.states[1]}"
    return FAILED, detail, [], r


def verify_chain(m: ChainManifest, order=None) -> VerificationReport:
    """Check every step independently, then the endpoints differentially.

    ``order`` optionally permutes the order in which steps are evaluated;
    the report always lists them in manifest order.
    """
    start = time.perf_counter()
    cfg = m.config
    terms = [translate(p.typed) for p in m.programs]
    results: dict = {}
    for i in (order if order is not None else range(len(m.steps))):
        step = m.steps[i]
        src, tgt = m.programs[i], m.programs[i + 1]
        t0 = time.perf_counter()
        try:
            if step.kind == "rewrite":
                verdict, detail, obs, raw = _rewrite_step(step, terms[i], terms[i + 1], cfg)
                method = f"rewrite {step.rule}"
            elif step.kind == "definitional":
                verdict, detail, obs, raw = _definitional_step(step, terms[i], terms[i + 1])
                method = "definitional" + (f" {step.rule}" if step.rule else "")
            else:
                verdict, detail, obs, raw = _coupling_step(step, src.typed, tgt.typed, cfg)
                method = "coupling"
        except Exception as exc:  # a step never takes the whole chain down
            verdict, detail, obs, raw = FAILED, f"internal error: {type(exc).__name__}: {exc}", [], exc
            method = step.kind
        results[i] = StepResult(i + 1, src.label, tgt.label, step.kind, method, verdict, detail,
                                obs, time.perf_counter() - t0, raw)
    endpoint = differential_test(m.programs[0].typed, m.programs[-1].typed, cfg,
                                 terms=(terms[0], terms[-1]))
    steps = [results[i] for i in sorted(results)]
    return VerificationReport(str(m.path) if m.path else None, steps, endpoint, cfg,
                              time.perf_counter() - start)


def with_overrides(m: ChainManifest, **overrides) -> ChainManifest:
    given = {k: v for k, v in overrides.items() if v is not None}
    if not given:
        return m
    return ChainManifest(m.path, m.programs, m.steps, replace(m.config, **given))
