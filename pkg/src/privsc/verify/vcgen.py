"""Verification conditions via weakest preconditions, and exhaustive
bounded discharge.

Loops use the invariant rule (initialization, preservation, exit), with
the loop's modified variables left free in the side conditions; array
reads become fresh free variables, which over-approximates and stays
sound for refutation.  Discharge enumerates every free variable over a
symmetric integer box; the box shrinks automatically when the free-
variable count would make the full grid exceed the evaluation budget,
and each transcript records the domain actually checked.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .lang import (
    Assign,
    Bin,
    ClassDecl,
    Decl,
    Expr,
    For,
    If,
    Index,
    Lit,
    Old,
    Result,
    Return,
    Un,
    Var,
)

DEFAULT_BOUND = 64
DEFAULT_BUDGET = 1 << 21


class VcError(Exception):
    pass


@dataclass(frozen=True)
class VC:
    tag: str
    expr: Expr

    def free_vars(self) -> tuple[str, ...]:
        seen: list[str] = []

        def walk(e: Expr) -> None:
            if isinstance(e, Var) and e.name not in seen:
                seen.append(e.name)
            elif isinstance(e, Bin):
                walk(e.left)
                walk(e.right)
            elif isinstance(e, Un):
                walk(e.operand)
            elif isinstance(e, (Old, Result, Index)):
                raise VcError(f"unresolved {e!r} inside a closed VC")

        walk(self.expr)
        return tuple(seen)

    def digest(self) -> str:
        return hashlib.sha256(
            (self.tag + "\x00" + _render(self.expr)).encode()).hexdigest()


def _render(e: Expr) -> str:
    if isinstance(e, Lit):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Un):
        return f"({e.op}{_render(e.operand)})"
    if isinstance(e, Bin):
        return f"({_render(e.left)} {e.op} {_render(e.right)})"
    raise VcError(f"cannot render {e!r}")


def _subst(e: Expr, mapping: dict) -> Expr:
    """Substitute Var/Old/Result nodes by name; keys: ('var', name),
    ('old', name), ('result',)."""
    if isinstance(e, Lit):
        return e
    if isinstance(e, Var):
        return mapping.get(("var", e.name), e)
    if isinstance(e, Old):
        return mapping.get(("old", e.name), e)
    if isinstance(e, Result):
        return mapping.get(("result",), e)
    if isinstance(e, Index):
        idx = _subst(e.index, mapping)
        key = ("index", e.name)
        if key in mapping:
            return mapping[key](idx)
        return Index(e.name, idx)
    if isinstance(e, Un):
        return Un(e.op, _subst(e.operand, mapping))
    assert isinstance(e, Bin)
    return Bin(e.op, _subst(e.left, mapping), _subst(e.right, mapping))


def _implies(p: Expr, q: Expr) -> Expr:
    return Bin("||", Un("!", p), q)


def _and_all(exprs) -> Expr:
    exprs = list(exprs)
    if not exprs:
        return Lit(1)
    acc = exprs[0]
    for e in exprs[1:]:
        acc = Bin("&&", acc, e)
    return acc


class _WpState:
    """Fresh-name supply and side-VC collector for one method."""

    def __init__(self, method_name: str) -> None:
        self.method = method_name
        self.side: list[VC] = []
        self.counter = 0

    def fresh(self, base: str) -> str:
        self.counter += 1
        return f"{base}#{self.counter}"

    def havoc_reads(self, e: Expr) -> Expr:
        """Replace array reads by fresh variables (sound over-approximation)."""
        if isinstance(e, Index):
            return Var(self.fresh(f"{e.name}@"))
        if isinstance(e, Un):
            return Un(e.op, self.havoc_reads(e.operand))
        if isinstance(e, Bin):
            return Bin(e.op, self.havoc_reads(e.left), self.havoc_reads(e.right))
        return e


def _modified_vars(stmts) -> set[str]:
    out: set[str] = set()
    for s in stmts:
        if isinstance(s, Assign) and s.index is None:
            out.add(s.target)
        elif isinstance(s, Decl):
            out.add(s.name)
        elif isinstance(s, If):
            out |= _modified_vars(s.then) | _modified_vars(s.orelse)
        elif isinstance(s, For):
            out |= {s.var} | _modified_vars(s.body)
    return out


def _wp(stmts: tuple, post: Expr, state: _WpState) -> Expr:
    acc = post
    for s in reversed(stmts):
        if isinstance(s, Return):
            acc = _subst(acc, {("result",): state.havoc_reads(s.expr)})
        elif isinstance(s, (Assign, Decl)):
            if isinstance(s, Assign) and s.index is not None:
                continue  # array writes only affect havocked reads
            name = s.target if isinstance(s, Assign) else s.name
            acc = _subst(acc, {("var", name): state.havoc_reads(s.expr)})
        elif isinstance(s, If):
            cond = state.havoc_reads(s.cond)
            wp_then = _wp(s.then, acc, state)
            wp_else = _wp(s.orelse, acc, state)
            acc = Bin("&&", _implies(cond, wp_then),
                      _implies(Un("!", cond), wp_else))
        elif isinstance(s, For):
            acc = _wp_for(s, acc, state)
        else:
            raise VcError(f"unsupported statement {s!r}")
    return acc


def _wp_for(loop: For, post: Expr, state: _WpState) -> Expr:
    inv = _and_all(a.expr for a in loop.invariants)
    if not loop.invariants:
        raise VcError(
            f"loop over {loop.var!r} needs an invariant annotation for "
            "verification-condition generation")
    cond = loop.cond
    targets = sorted(_modified_vars((loop,)))
    # preservation: (inv && cond) => wp(body; var++, inv); the loop's
    # modified variables are free and range over the discharge domain
    body_wp = _wp(loop.body + (Assign(loop.var, None,
                                      Bin("+", Var(loop.var), Lit(1))),),
                  inv, state)
    state.side.append(VC(
        tag=f"{state.method}:invariant-preserve:{loop.var}",
        expr=_implies(Bin("&&", inv, state.havoc_reads(cond)), body_wp)))
    # exit: (inv && !cond) => post
    state.side.append(VC(
        tag=f"{state.method}:invariant-exit:{loop.var}",
        expr=_implies(Bin("&&", inv, Un("!", state.havoc_reads(cond))),
                      state.havoc_reads(post))))
    # flowing obligation: the invariant holds at entry
    return _subst(inv, {("var", loop.var): state.havoc_reads(loop.start)})


def gen_vcs(cls, method_name: str | None = None) -> list[VC]:
    """Closed verification conditions for every (or one) method.

    Accepts a parsed ClassDecl or anything carrying one via .parsed()
    (a contract package).
    """
    if hasattr(cls, "parsed"):
        cls = cls.parsed()[0]
    vcs: list[VC] = []
    consts = cls.constant_fields()
    const_map = {("var", k): Lit(v) for k, v in consts.items()}
    for method in cls.methods:
        if method_name is not None and method.name != method_name:
            continue
        state = _WpState(method.name)
        pre = _and_all([a.expr for a in method.requires]
                       + [a.expr for a in cls.invariants])
        posts = [("ensures", a) for a in method.ensures]
        posts += [("class-invariant", a) for a in cls.invariants]
        names = [name for name, _ in cls.fields] + [p.name for p in method.params]
        # In the flowing VC, evaluated at entry, \old(v) is just v; in the
        # quantified loop side conditions the entry state is unreachable,
        # so \old(v) becomes its own universally quantified variable.
        entry_olds = {("old", n): Var(n) for n in names}
        side_olds = {("old", n): Var(f"{n}@old") for n in names}
        for i, (kind, annot) in enumerate(posts):
            state.side = []
            body_wp = _wp(method.body, annot.expr, state)
            closed = _implies(pre, _subst(body_wp, entry_olds))
            closed = _subst(closed, const_map)
            closed = state.havoc_reads(closed)
            vcs.append(VC(tag=f"{method.name}:{kind}:{i}", expr=closed))
            for side_vc in state.side:
                expr = _subst(_subst(side_vc.expr, side_olds), const_map)
                vcs.append(VC(tag=f"{side_vc.tag}:{i}", expr=expr))
    return vcs


# --- bounded discharge ------------------------------------------------------


@dataclass(frozen=True)
class DischargeTranscript:
    tag: str
    vc_digest: str
    variables: tuple[str, ...]
    bound: int
    discharged: bool
    counterexample: dict[str, int] | None

    def to_json(self) -> str:
        return json.dumps({
            "tag": self.tag, "vc": self.vc_digest,
            "variables": list(self.variables), "bound": self.bound,
            "discharged": self.discharged,
            "counterexample": self.counterexample,
        }, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "DischargeTranscript":
        d = json.loads(text)
        return cls(d["tag"], d["vc"], tuple(d["variables"]), d["bound"],
                   d["discharged"],
                   dict(d["counterexample"]) if d["counterexample"] else None)


def _eval_grid(e: Expr, env: dict[str, np.ndarray]):
    if isinstance(e, Lit):
        return np.int64(e.value)
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Un):
        v = _eval_grid(e.operand, env)
        return -v if e.op == "-" else (v == 0).astype(np.int64)
    assert isinstance(e, Bin)
    l = _eval_grid(e.left, env)
    r = _eval_grid(e.right, env)
    if e.op == "+":
        return l + r
    if e.op == "-":
        return l - r
    if e.op == "*":
        return l * r
    if e.op == "&&":
        return ((l != 0) & (r != 0)).astype(np.int64)
    if e.op == "||":
        return ((l != 0) | (r != 0)).astype(np.int64)
    return {
        "<": lambda: l < r, "<=": lambda: l <= r, ">": lambda: l > r,
        ">=": lambda: l >= r, "==": lambda: l == r, "!=": lambda: l != r,
    }[e.op]().astype(np.int64)


def effective_bound(n_vars: int, bound: int, budget: int = DEFAULT_BUDGET) -> int:
    if n_vars == 0:
        return bound
    b = bound
    while b > 1 and (2 * b + 1) ** n_vars > budget:
        b -= 1
    return b


def discharge_bounded(vcs: list[VC], bound: int = DEFAULT_BOUND,
                      budget: int = DEFAULT_BUDGET) -> list[DischargeTranscript]:
    """Exhaustively check each VC over its free variables in [-b, b]^k,
    where b is the largest bound whose grid fits the evaluation budget."""
    out = []
    for vc in vcs:
        names = vc.free_vars()
        b = effective_bound(len(names), bound, budget)
        axis = np.arange(-b, b + 1, dtype=np.int64)
        if names:
            grids = np.meshgrid(*([axis] * len(names)), indexing="ij")
            env = {n: g.ravel() for n, g in zip(names, grids)}
            vals = _eval_grid(vc.expr, env)
            holds = bool(np.all(vals != 0))
            ce = None
            if not holds:
                idx = int(np.argmin(vals != 0))
                ce = {n: int(env[n][idx]) for n in names}
        else:
            holds = bool(_eval_grid(vc.expr, {}) != 0)
            ce = None if holds else {}
        out.append(DischargeTranscript(
            tag=vc.tag, vc_digest=vc.digest(), variables=names, bound=b,
            discharged=holds, counterexample=ce))
    return out


def recheck_transcript(vc: VC, transcript: DischargeTranscript) -> bool:
    """Independent re-enumeration of a transcript's claim."""
    if transcript.vc_digest != vc.digest():
        return False
    fresh = discharge_bounded([vc], bound=transcript.bound,
                              budget=DEFAULT_BUDGET)[0]
    return fresh.discharged == transcript.discharged
