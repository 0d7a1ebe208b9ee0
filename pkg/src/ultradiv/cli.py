"""Expression-language front end.

Set grammar (a progression atom ``a+mN`` extends the core grammar so that
every canonical form round-trips through the parser):

    e ::= N | kN | a+mN | {a,b,...} | P | [k,inf) | !e | e & e | e "|" e
        | e / k | k * e | up(e) | (e) | name

Filters are ``filter(e1, ..., lcmchain, tailchain)``, a bound name, or a
bare integer (a principal point).  Commands execute against a session of
immutable named bindings and emit one JSON record per line; exit status is
0 when every query decided, 2 when some stayed Unknown, 1 on errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import divisibility as dv
from . import oracle as orc
from . import product as pr
from . import relext as rx
from . import setalg as sa
from .filters import (FilterBase, FipError, FipUndecidableError, LcmChain,
                      TailChain, Verdict, entails, fip_check, principal)
from .setalg import NotRepresentableError, PeriodicSet, SetExpr

COMMANDS = ("def", "divides", "widemid", "leftdiv", "prodmember", "relext",
            "fip", "pattern", "primecheck", "irred", "oracle", "normalize")


# ---------------------------------------------------------------------------
# tokens
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # NUM, NAME, SYM, END
    text: str
    pos: int


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, expected: Sequence[str] = ()):
        self.pos = pos
        self.expected = tuple(expected)
        detail = f" (expected {' or '.join(expected)})" if expected else ""
        super().__init__(f"col {pos + 1}: {message}{detail}")


_SYMBOLS = set("(){}[],!&|/*=+:.-")


def tokenize(text: str) -> list[Token]:
    out = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "#":
            break
        if c.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            out.append(Token("NUM", text[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(Token("NAME", text[i:j], i))
            i = j
            continue
        if c == "-" and text[i:i + 2] == "--":
            j = i + 2
            while j < len(text) and (text[j].isalnum() or text[j] == "-"):
                j += 1
            out.append(Token("FLAG", text[i + 2:j], i))
            i = j
            continue
        if c in _SYMBOLS:
            out.append(Token("SYM", c, i))
            i += 1
            continue
        raise ParseError(f"stray character {c!r}", i)
    out.append(Token("END", "", len(text)))
    return out


# ---------------------------------------------------------------------------
# session
# ---------------------------------------------------------------------------


@dataclass
class Session:
    """Named bindings plus evaluation configuration; bindings are immutable
    once defined."""

    oracle_bound: int = orc.DEFAULT_BOUND
    depth_limit: int = 64
    bindings: dict = field(default_factory=dict)

    def define(self, name: str, value) -> None:
        if name in self.bindings:
            raise ValueError(f"{name!r} is already defined")
        self.bindings[name] = value

    def lookup_set(self, name: str, pos: int) -> SetExpr:
        v = self.bindings.get(name)
        if v is None:
            raise ParseError(f"unbound identifier {name!r}", pos)
        if isinstance(v, FilterBase):
            raise ParseError(f"{name!r} names a filter, not a set", pos)
        return v

    def lookup_filter(self, name: str, pos: int) -> FilterBase:
        v = self.bindings.get(name)
        if v is None:
            raise ParseError(f"unbound identifier {name!r}", pos)
        if not isinstance(v, FilterBase):
            raise ParseError(f"{name!r} names a set, not a filter", pos)
        return v


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


class Parser:
    def __init__(self, text: str, session: Session):
        self.text = text
        self.session = session
        self.tokens = tokenize(text)
        self.i = 0

    # -- token helpers ------------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect_sym(self, sym: str) -> Token:
        t = self.peek()
        if t.kind != "SYM" or t.text != sym:
            raise ParseError(f"found {t.text or 'end of input'!r}", t.pos, [repr(sym)])
        return self.next()

    def expect_num(self) -> int:
        t = self.peek()
        if t.kind != "NUM":
            raise ParseError(f"found {t.text or 'end of input'!r}", t.pos, ["a number"])
        self.next()
        return int(t.text)

    def at_sym(self, sym: str) -> bool:
        t = self.peek()
        return t.kind == "SYM" and t.text == sym

    def at_name(self, name: str) -> bool:
        t = self.peek()
        return t.kind == "NAME" and t.text == name

    def expect_end(self) -> None:
        t = self.peek()
        if t.kind != "END":
            raise ParseError(f"unexpected trailing {t.text!r}", t.pos,
                             ["end of command"])

    def parse_path(self) -> str:
        """A file path: adjacent tokens joined until the next whitespace gap."""
        parts = [self.next()]
        if parts[0].kind == "END":
            raise ParseError("expected a file path", parts[0].pos, ["a file path"])
        while True:
            nxt = self.peek()
            last = parts[-1]
            if nxt.kind == "END" or nxt.pos != last.pos + len(last.text):
                break
            parts.append(self.next())
        return "".join(x.text for x in parts)

    # -- set expressions ----------------------------------------------------

    def parse_set(self) -> SetExpr:
        return self._union()

    def _union(self) -> SetExpr:
        e = self._inter()
        while self.at_sym("|"):
            self.next()
            e = sa.Union(e, self._inter())
        return e

    def _inter(self) -> SetExpr:
        e = self._unary()
        while self.at_sym("&"):
            self.next()
            e = sa.Intersect(e, self._unary())
        return e

    def _unary(self) -> SetExpr:
        if self.at_sym("!"):
            self.next()
            return sa.Complement(self._unary())
        return self._postfix()

    def _postfix(self) -> SetExpr:
        e = self._atom()
        while self.at_sym("/"):
            self.next()
            k = self.expect_num()
            if k < 1:
                raise ParseError("quotient divisor must be >= 1", self.peek().pos)
            e = sa.Quotient(e, k)
        return e

    def _atom(self) -> SetExpr:
        t = self.peek()
        if t.kind == "NUM":
            self.next()
            n = int(t.text)
            nxt = self.peek()
            if nxt.kind == "NAME" and nxt.text == "N":
                self.next()
                return sa.Multiples(n)
            if nxt.kind == "SYM" and nxt.text == "+":
                self.next()
                m = self.expect_num()
                tN = self.peek()
                if tN.kind != "NAME" or tN.text != "N":
                    raise ParseError(f"found {tN.text!r}", tN.pos, ["'N'"])
                self.next()
                if n < 1:
                    raise ParseError("progression start must be >= 1", t.pos)
                return sa.Progression(n, m)
            if nxt.kind == "SYM" and nxt.text == "*":
                self.next()
                return sa.Scale(n, self._unary())
            raise ParseError(f"found {nxt.text or 'end of input'!r}", nxt.pos,
                             ["'N'", "'+'", "'*'"])
        if t.kind == "NAME":
            if t.text == "N":
                self.next()
                return sa.AllN()
            if t.text == "P":
                self.next()
                return sa.Primes()
            if t.text == "up":
                self.next()
                self.expect_sym("(")
                e = self.parse_set()
                self.expect_sym(")")
                return sa.UpClosure(e)
            if t.text in ("filter", "lcmchain", "tailchain", "inf"):
                raise ParseError(f"{t.text!r} is not a set", t.pos)
            self.next()
            return self.session.lookup_set(t.text, t.pos)
        if t.kind == "SYM" and t.text == "{":
            self.next()
            elems = []
            if not self.at_sym("}"):
                elems.append(self.expect_num())
                while self.at_sym(","):
                    self.next()
                    elems.append(self.expect_num())
            self.expect_sym("}")
            if any(x < 1 for x in elems):
                raise ParseError("set elements must be >= 1", t.pos)
            return sa.FiniteSet(elems)
        if t.kind == "SYM" and t.text == "[":
            self.next()
            k = self.expect_num()
            self.expect_sym(",")
            inf = self.peek()
            if inf.kind != "NAME" or inf.text != "inf":
                raise ParseError(f"found {inf.text!r}", inf.pos, ["'inf'"])
            self.next()
            self.expect_sym(")")
            return sa.Tail(k)
        if t.kind == "SYM" and t.text == "(":
            self.next()
            e = self.parse_set()
            self.expect_sym(")")
            return e
        raise ParseError(f"found {t.text or 'end of input'!r}", t.pos,
                         ["a set expression"])

    # -- filter terms -------------------------------------------------------

    def parse_filter(self) -> "FilterBase | _FilterSpec":
        t = self.peek()
        if t.kind == "NUM":
            self.next()
            return principal(int(t.text))
        if t.kind == "NAME" and t.text == "filter":
            self.next()
            self.expect_sym("(")
            gens: list[SetExpr] = []
            chains: list = []
            if not self.at_sym(")"):
                self._filter_arg(gens, chains)
                while self.at_sym(","):
                    self.next()
                    self._filter_arg(gens, chains)
            self.expect_sym(")")
            return _FilterSpec(tuple(gens), tuple(chains))
        if t.kind == "NAME":
            self.next()
            return self.session.lookup_filter(t.text, t.pos)
        raise ParseError(f"found {t.text or 'end of input'!r}", t.pos,
                         ["a filter", "a principal point"])

    def _filter_arg(self, gens: list, chains: list) -> None:
        if self.at_name("lcmchain"):
            self.next()
            chains.append(LcmChain())
        elif self.at_name("tailchain"):
            self.next()
            chains.append(TailChain())
        else:
            gens.append(self.parse_set())


@dataclass(frozen=True)
class _FilterSpec:
    """Unconstructed filter: FIP runs when the command executes."""

    generators: tuple[SetExpr, ...]
    chains: tuple


def _realize(f: "FilterBase | _FilterSpec") -> FilterBase:
    if isinstance(f, FilterBase):
        return f
    return FilterBase(f.generators, f.chains)


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------


def _verdict_record(v: Verdict, target: Optional[SetExpr] = None) -> dict:
    rec: dict = {"verdict": v.outcome.value}
    if isinstance(v.witness, int):
        rec["witness"] = v.witness
    elif isinstance(v.witness, PeriodicSet):
        rec["proof"] = {"core": v.witness.render()}
        if target is not None:
            ps = sa.try_normalize(target)
            rec["proof"]["target"] = ps.render() if ps is not None else target.render()
    if v.evidence_bound is not None:
        rec["evidence_bound"] = v.evidence_bound
    return rec


def _load_table(path: str) -> rx.TableRelation:
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            m, n = line.split()
            pairs.append((int(m), int(n)))
    universe = max((max(m, n) for m, n in pairs), default=1)
    return rx.TableRelation(pairs, universe, name=f"table:{path}")


def _parse_relation(p: Parser) -> rx.Relation:
    t = p.peek()
    if t.kind != "NAME":
        raise ParseError(f"found {t.text or 'end of input'!r}", t.pos,
                         ["div", "leq", "ker:<modulus>", "table:<file>"])
    p.next()
    if t.text == "div":
        return rx.DIV
    if t.text == "leq":
        return rx.LEQ
    if t.text == "ker":
        p.expect_sym(":")
        return rx.kernel_of_mod(p.expect_num())
    if t.text == "table":
        p.expect_sym(":")
        return _load_table(p.parse_path())
    raise ParseError(f"unknown relation {t.text!r}", t.pos,
                     ["div", "leq", "ker:<modulus>", "table:<file>"])


def run_command(line: str, session: Session) -> Optional[dict]:
    """Parse and execute one command line; None for blank/comment lines."""
    if not line.strip() or line.lstrip().startswith("#"):
        return None
    parser = Parser(line, session)
    t = parser.peek()
    if t.kind != "NAME" or t.text not in COMMANDS:
        raise ParseError(f"found {t.text or 'end of input'!r}", t.pos,
                         [f"one of {', '.join(COMMANDS)}"])
    cmd = parser.next().text
    handler = _HANDLERS[cmd]
    return handler(parser, session)


def _cmd_def(p: Parser, session: Session) -> dict:
    t = p.peek()
    if t.kind != "NAME":
        raise ParseError("expected a binding name", t.pos, ["an identifier"])
    name = p.next().text
    if name in COMMANDS or name in ("N", "P", "up", "inf", "filter",
                                    "lcmchain", "tailchain"):
        raise ParseError(f"{name!r} is reserved", t.pos)
    p.expect_sym("=")
    # a bare integer or filter(...) binds a filter; anything else a set
    nxt = p.peek()
    after = p.tokens[p.i + 1] if p.i + 1 < len(p.tokens) else None
    if (nxt.kind == "NUM" and after is not None and after.kind == "END") or \
            (nxt.kind == "NAME" and nxt.text == "filter"):
        value = _realize(p.parse_filter())
        kind = "filter"
    else:
        value = p.parse_set()
        kind = "set"
    p.expect_end()
    session.define(name, value)
    return {"cmd": "def", "name": name, "kind": kind,
            "value": value.render()}


def _cmd_normalize(p: Parser, session: Session) -> dict:
    e = p.parse_set()
    p.expect_end()
    ps = sa.normalize(e)
    return {"cmd": "normalize", "canonical": ps.render()}


def _cmd_divides(p: Parser, session: Session) -> dict:
    n = p.expect_num()
    base = _realize(p.parse_filter())
    p.expect_end()
    v = dv.divides_nat(n, base, depth_limit=session.depth_limit)
    return {"cmd": "divides", "n": n, **_verdict_record(v, sa.Multiples(n))}


def _cmd_widemid(p: Parser, session: Session) -> dict:
    a = _realize(p.parse_filter())
    b = _realize(p.parse_filter())
    p.expect_end()
    v = dv.widemid(a, b, depth_limit=session.depth_limit)
    return {"cmd": "widemid", **_verdict_record(v)}


def _cmd_leftdiv(p: Parser, session: Session) -> dict:
    a = _realize(p.parse_filter())
    b = _realize(p.parse_filter())
    p.expect_end()
    v = dv.leftdiv(a, b, depth_limit=session.depth_limit)
    return {"cmd": "leftdiv", **_verdict_record(v)}


def _cmd_prodmember(p: Parser, session: Session) -> dict:
    target = p.parse_set()
    a = _realize(p.parse_filter())
    b = _realize(p.parse_filter())
    p.expect_end()
    v = pr.product_member(target, a, b, depth_limit=session.depth_limit,
                          scan_bound=session.oracle_bound)
    return {"cmd": "prodmember", **_verdict_record(v, target)}


def _cmd_relext(p: Parser, session: Session) -> dict:
    rel = _parse_relation(p)
    a = _realize(p.parse_filter())
    b = _realize(p.parse_filter())
    p.expect_end()
    v = rx.ext_related(rel, a, b, depth_limit=session.depth_limit)
    return {"cmd": "relext", "relation": rel.name, **_verdict_record(v)}


def _cmd_fip(p: Parser, session: Session) -> dict:
    spec = p.parse_filter()  # FilterBase and _FilterSpec both expose the parts
    p.expect_end()
    res = fip_check(spec.generators, spec.chains, scan_bound=session.oracle_bound)
    rec: dict = {"cmd": "fip", "ok": res.ok}
    if res.witness is not None:
        rec["witness"] = res.witness
    if res.empty_subfamily is not None:
        rec["empty_subfamily"] = [g.render() for g in res.empty_subfamily]
    return rec


def _cmd_pattern(p: Parser, session: Session) -> dict:
    path = p.parse_path()
    bound = p.expect_num()
    p.expect_end()
    with open(path, "r", encoding="utf-8") as fh:
        members = [int(x) for x in fh.read().split()]
    result = dv.build_divisor_pattern(
        dv.DivisorPattern.of(sorted(set(members)), bound))
    sample = result.witness(result.members[: min(3, len(result.members))],
                            result.nonmembers[: min(3, len(result.nonmembers))])
    return {"cmd": "pattern", "members": list(result.members),
            "excluded": len(result.nonmembers), "sample_witness": sample}


def _cmd_primecheck(p: Parser, session: Session) -> dict:
    n = p.expect_num()
    a = _realize(p.parse_filter())
    b = _realize(p.parse_filter())
    p.expect_end()
    v, branch = dv.prime_divides_product(n, a, b, depth_limit=session.depth_limit)
    rec = {"cmd": "primecheck", "n": n, **_verdict_record(v)}
    if branch is not None:
        rec["branch"] = branch
    return rec


def _cmd_irred(p: Parser, session: Session) -> dict:
    base = _realize(p.parse_filter())
    p.expect_end()
    cert = dv.irreducible_over_P(base, depth_limit=session.depth_limit)
    if cert is None:
        return {"cmd": "irred", "verdict": "undecided"}
    return {"cmd": "irred", "verdict": "irreducible",
            "records": [[n, case] for n, case in cert.records[:8]],
            "conclusion": cert.conclusion}


def _cmd_oracle(p: Parser, session: Session) -> dict:
    e = p.parse_set()
    bound = session.oracle_bound
    if p.peek().kind == "FLAG" and p.peek().text == "bound":
        p.next()
        bound = p.expect_num()
    p.expect_end()
    members = orc.members_up_to(e, bound)
    display_cap = 40
    return {"cmd": "oracle", "bound": bound, "count": len(members),
            "members": members[:display_cap],
            "truncated": len(members) > display_cap}


_HANDLERS = {
    "def": _cmd_def,
    "normalize": _cmd_normalize,
    "divides": _cmd_divides,
    "widemid": _cmd_widemid,
    "leftdiv": _cmd_leftdiv,
    "prodmember": _cmd_prodmember,
    "relext": _cmd_relext,
    "fip": _cmd_fip,
    "pattern": _cmd_pattern,
    "primecheck": _cmd_primecheck,
    "irred": _cmd_irred,
    "oracle": _cmd_oracle,
}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def run_lines(lines, session: Session, out=None) -> int:
    """Execute commands line by line; returns the aggregate exit status."""
    if out is None:
        out = sys.stdout
    saw_unknown = False
    saw_error = False
    for lineno, line in enumerate(lines, start=1):
        try:
            rec = run_command(line.rstrip("\n"), session)
        except ParseError as err:
            rec = {"error": "syntax", "line": lineno, "col": err.pos + 1,
                   "message": str(err)}
            if err.expected:
                rec["expected"] = list(err.expected)
            saw_error = True
        except (FipError, FipUndecidableError) as err:
            rec = {"error": "fip", "line": lineno, "message": str(err)}
            saw_error = True
        except NotRepresentableError as err:
            rec = {"error": "not-representable", "line": lineno,
                   "message": str(err), "offending": err.offending.render()}
            saw_error = True
        except (ValueError, OSError) as err:
            rec = {"error": "invalid", "line": lineno, "message": str(err)}
            saw_error = True
        if rec is None:
            continue
        print(json.dumps(rec, separators=(", ", ": ")), file=out)
        if rec.get("verdict") == "unknown":
            saw_unknown = True
    if saw_error:
        return 1
    return 2 if saw_unknown else 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = argparse.ArgumentParser(
        prog="ultradiv",
        description="symbolic filters, ultrafilter products and divisibility on N")
    ap.add_argument("--bound", type=int, default=orc.DEFAULT_BOUND,
                    help="oracle universe bound")
    ap.add_argument("--depth", type=int, default=64,
                    help="chain exploration depth limit")
    ap.add_argument("--script", type=str, default=None,
                    help="batch file: one command per line, # comments")
    ap.add_argument("command", nargs="*", help="a single command to run")
    args = ap.parse_args(argv)
    session = Session(oracle_bound=args.bound, depth_limit=args.depth)
    if args.script:
        with open(args.script, "r", encoding="utf-8") as fh:
            return run_lines(fh.readlines(), session)
    if args.command:
        return run_lines([" ".join(args.command)], session)
    return run_lines(sys.stdin, session)


if __name__ == "__main__":
    sys.exit(main())
