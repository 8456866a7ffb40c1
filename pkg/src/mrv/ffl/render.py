"""Deterministic textual rendering of FFL terms for diagnostics."""
from __future__ import annotations

from fractions import Fraction

from .terms import (
    App, ArrLit, Case, Fst, If, Inl, Inr, Lam, Lit, Pair, Prim, Probe, Snd,
    Term, UnitLit, Var,
)

_INFIX = {"add": "+", "sub": "-", "mul": "*", "div": "/", "lt": "<", "le": "<=",
          "gt": ">", "ge": ">=", "eq": "=", "ne": "!=", "and": "&&", "or": "||"}


def _lit(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return f"{v.numerator}." if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return str(v)


def _fresh(name, names) -> str:
    base = name or "x"
    cand, n = base, 1
    while cand in names:
        n += 1
        cand = f"{base}{n}"
    return cand


def render(t: Term, names: tuple = ()) -> str:
    """Render ``t``; ``names[0]`` names the innermost free variable."""
    if isinstance(t, Var):
        if t.index < len(names):
            return names[t.index]
        return f"#{t.index}"
    if isinstance(t, Lit):
        return _lit(t.value)
    if isinstance(t, UnitLit):
        return "()"
    if isinstance(t, Lam):
        x = _fresh(t.name, names)
        return f"(λ{x}:{t.ty}. {render(t.body, (x,) + names)})"
    if isinstance(t, App):
        if isinstance(t.fn, Lam):
            x = _fresh(t.fn.name, names)
            return (f"let {x}:{t.fn.ty} = {render(t.arg, names)} in\n"
                    f"{render(t.fn.body, (x,) + names)}")
        return f"({render(t.fn, names)} {render(t.arg, names)})"
    if isinstance(t, Pair):
        return f"({render(t.left, names)}, {render(t.right, names)})"
    if isinstance(t, Fst):
        return f"fst {render(t.pair, names)}"
    if isinstance(t, Snd):
        return f"snd {render(t.pair, names)}"
    if isinstance(t, Inl):
        return f"inl({render(t.value, names)})"
    if isinstance(t, Inr):
        return f"inr({render(t.value, names)})"
    if isinstance(t, Case):
        a = _fresh(t.left_name, names)
        b = _fresh(t.right_name, names)
        return (f"case {render(t.scrut, names)} of inl {a} => {render(t.left, (a,) + names)}"
                f" | inr {b} => {render(t.right, (b,) + names)}")
    if isinstance(t, If):
        return (f"if {render(t.cond, names)} then {render(t.then, names)}"
                f" else {render(t.orelse, names)}")
    if isinstance(t, ArrLit):
        return "[" + ", ".join(render(x, names) for x in t.items) + "]"
    if isinstance(t, Prim):
        if t.op in _INFIX:
            a, b = t.args
            return f"({render(a, names)} {_INFIX[t.op]} {render(b, names)})"
        if t.op == "index":
            return f"{_postfix_base(t.args[0], names)}[{render(t.args[1], names)}]"
        if t.op == "update":
            i, v = (render(x, names) for x in t.args[1:])
            return f"{_postfix_base(t.args[0], names)}[{i} := {v}]"
        return f"{t.op}(" + ", ".join(render(x, names) for x in t.args) + ")"
    if isinstance(t, Probe):
        return f"probe[{t.tag}]({render(t.check, names)}; {render(t.body, names)})"
    return f"<{type(t).__name__}>"


def _postfix_base(t: Term, names: tuple) -> str:
    # subscripts bind tighter than prefix forms
    text = render(t, names)
    if isinstance(t, (Fst, Snd, Inl, Inr, Case, If, Probe)) or (isinstance(t, App) and isinstance(t.fn, Lam)):
        return f"({text})"
    return text
