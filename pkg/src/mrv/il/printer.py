"""Deterministic IL pretty-printer; output re-parses to an equal AST."""
from __future__ import annotations

from fractions import Fraction

from .syntax import (
    ArrayLit, Assign, BinOp, BoolLit, Call, Forall, For, Index, IndexAssign,
    IntLit, Lambda, Name, PairExpr, Program, RatLit, Return, UnOp, VarDecl, While,
)

_LEVEL = {"||": 1, "&&": 2, "=": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3,
          "+": 4, "-": 4, "*": 5, "/": 5}
_UNARY, _POSTFIX, _ATOM = 6, 7, 8


def _rat_text(v: Fraction) -> str:
    if v.denominator == 1:
        return f"{v.numerator}."
    for k in range(1, 40):
        if (10**k) % v.denominator == 0:
            scaled = v.numerator * (10**k // v.denominator)
            digits = str(abs(scaled)).rjust(k + 1, "0")
            return ("-" if scaled < 0 else "") + digits[:-k] + "." + digits[-k:]
    return f"({v.numerator}. / {v.denominator}.)"


def _level(e) -> int:
    if isinstance(e, BinOp):
        return _LEVEL[e.op]
    if isinstance(e, (Lambda, Forall)):
        return 0
    if isinstance(e, UnOp) or (isinstance(e, Call) and e.func in ("fst", "snd") and len(e.args) == 1):
        return _UNARY
    if isinstance(e, Index):
        return _POSTFIX
    return _ATOM


def _wrap(e, min_level: int) -> str:
    text = expr_str(e)
    return f"({text})" if _level(e) < min_level else text


def expr_str(e) -> str:
    if isinstance(e, Name):
        return e.name
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, RatLit):
        return _rat_text(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, BinOp):
        lvl = _LEVEL[e.op]
        if lvl == 3:
            return f"{_wrap(e.left, lvl + 1)} {e.op} {_wrap(e.right, lvl + 1)}"
        return f"{_wrap(e.left, lvl)} {e.op} {_wrap(e.right, lvl + 1)}"
    if isinstance(e, UnOp):
        return f"{e.op}{_wrap(e.operand, _UNARY)}"
    if isinstance(e, Call):
        if e.func in ("fst", "snd") and len(e.args) == 1:
            return f"{e.func} {_wrap(e.args[0], _UNARY)}"
        return f"{e.func}({', '.join(expr_str(a) for a in e.args)})"
    if isinstance(e, Index):
        return f"{_wrap(e.array, _POSTFIX)}[{expr_str(e.index)}]"
    if isinstance(e, PairExpr):
        return f"({expr_str(e.left)}, {expr_str(e.right)})"
    if isinstance(e, ArrayLit):
        return "[" + ", ".join(expr_str(x) for x in e.items) + "]"
    if isinstance(e, Lambda):
        params = " ".join(f"({p.name} : {p.type})" for p in e.params)
        return f"{params} => {expr_str(e.body)}"
    if isinstance(e, Forall):
        bounds = ", ".join(f"{n} in {_wrap(a, 1)}" for n, a in e.bounds)
        return f"forall {bounds}: {expr_str(e.body)}"
    raise TypeError(f"not an IL expression: {e!r}")


def _stmt_lines(s, indent: str) -> list:
    if isinstance(s, VarDecl):
        ann = f" : {s.type}" if s.type is not None else ""
        return [f"{indent}var {s.name}{ann} := {expr_str(s.init)};"]
    if isinstance(s, Assign):
        return [f"{indent}{s.name} := {expr_str(s.value)};"]
    if isinstance(s, IndexAssign):
        return [f"{indent}{s.name}[{expr_str(s.index)}] := {expr_str(s.value)};"]
    if isinstance(s, Return):
        return [f"{indent}return {expr_str(s.value)};"]
    if isinstance(s, For):
        head = f"{indent}for ({s.var} : {expr_str(s.iterable)}) {{"
    elif isinstance(s, While):
        head = f"{indent}while ({expr_str(s.cond)}) {{"
    else:
        raise TypeError(f"not an IL statement: {s!r}")
    lines = [head]
    for inner in s.body:
        lines.extend(_stmt_lines(inner, indent + "  "))
    lines.append(f"{indent}}}")
    return lines


def program_str(p: Program) -> str:
    params = ", ".join(f"{q.name} : {q.type}" for q in p.params)
    ret = f" -> {p.ret}" if p.ret is not None else ""
    lines = [f"fn {p.name}({params}){ret} {{"]
    for s in p.body:
        lines.extend(_stmt_lines(s, "  "))
    lines.append("}")
    return "\n".join(lines) + "\n"
