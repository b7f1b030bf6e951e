"""Closed-form resistance constants, loaded from ``data/closed_forms.json``.

Each entry stores a symbolic expression; the float is recomputed from the
expression on load and must agree with the stored value to 1e-14.
"""
from __future__ import annotations

import ast
import json
import math
import operator
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .lattice import Family

_FUNCS = {"sqrt": math.sqrt, "atan": math.atan, "arctan": math.atan}
_NAMES = {"pi": math.pi}
_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}

TOLERANCE = 1e-14


def evaluate(expr: str) -> float:
    """Evaluate an arithmetic expression over numbers, ``pi``, ``sqrt``, ``atan``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
            return _FUNCS[node.func.id](*[ev(a) for a in node.args])
        raise ValueError(f"unsupported expression element: {ast.dump(node)}")

    return float(ev(ast.parse(expr, mode="eval")))


@dataclass(frozen=True)
class ClosedForm:
    family: Family
    pair: str
    subdivided: bool
    expression: str
    value: float
    note: str

    @property
    def tag(self) -> str:
        return self.expression

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "pair": self.pair,
            "subdivided": self.subdivided,
            "expression": self.expression,
            "value": self.value,
            "note": self.note,
        }


@lru_cache(maxsize=None)
def closed_form_table() -> tuple[ClosedForm, ...]:
    raw = json.loads(resources.files("fosterlab").joinpath("data/closed_forms.json").read_text())
    out = []
    for e in raw["entries"]:
        recomputed = evaluate(e["expression"])
        if abs(recomputed - e["value"]) > TOLERANCE:
            raise ValueError(
                f"closed form {e['family']}/{e['pair']}: stored {e['value']!r} "
                f"but expression gives {recomputed!r}"
            )
        out.append(
            ClosedForm(
                Family.parse(e["family"]),
                e["pair"],
                bool(e.get("subdivided", False)),
                e["expression"],
                recomputed,
                e["note"],
            )
        )
    return tuple(out)


def lookup(family, pair: str, subdivided: bool = False) -> ClosedForm | None:
    family = Family.parse(family)
    pair = pair.strip().lower()
    for cf in closed_form_table():
        if cf.family is family and cf.pair == pair and cf.subdivided == subdivided:
            return cf
    return None
