"""Self-contained SMT-LIB 2 solver for the quantifier-free fragment this
package emits: Boolean constants plus uninterpreted sorts whose terms are all
constants (QF_UF without non-constant function terms of sort kind).

Runs as a separate process (``statebound-solve`` or ``python -m
statebound.minisolver``), reads a script from a file argument or stdin, and
prints ``sat``/``unsat``/``unknown`` followed by a model when the script asks
for one. It exists so the solver-driving pipeline works out of the box; any
real SMT-LIB 2 solver (Yices, Z3, cvc5, ...) can be configured instead.

Uninterpreted sorts are decided by finite-domain grounding: a quantifier-free
formula whose sort-valued terms are all constants is satisfiable iff it is
satisfiable over a universe no larger than the number of those constants, so
each constant gets a one-hot value encoding. A top-level
``(assert (distinct c1 ... cn))`` over constants pins those constants to fixed
distinct values (sound up to renaming the universe), which keeps groundings of
state-space scripts small. The Boolean core is a CDCL SAT solver with watched
literals, first-UIP learning, VSIDS scoring and Luby restarts.
"""

from __future__ import annotations

import sys
from heapq import heappop, heappush
from itertools import product


class SmtUnsupportedError(Exception):
    """Script uses syntax outside the supported fragment."""


class SmtFormatError(Exception):
    """Script is malformed."""


# ---------------------------------------------------------------------------
# S-expression reader


def tokenize(text: str):
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch
            i += 1
        elif ch == "|":
            j = text.find("|", i + 1)
            if j < 0:
                raise SmtFormatError("unterminated quoted symbol")
            yield text[i + 1 : j]
            i = j + 1
        elif ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            if j >= n:
                raise SmtFormatError("unterminated string")
            yield text[i : j + 1]
            i = j + 1
        else:
            j = i
            while j < n and text[j] not in " \t\r\n();|\"":
                j += 1
            yield text[i:j]
            i = j


def parse_sexprs(text: str) -> list:
    stack: list[list] = [[]]
    for tok in tokenize(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise SmtFormatError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise SmtFormatError("unbalanced '('")
    return stack[0]


# ---------------------------------------------------------------------------
# CDCL SAT core

_UNSET = -1


class CdclSolver:
    """CDCL over integer literals (var << 1 | negated): two watched literals,
    first-UIP learning with recursive minimization, VSIDS, Luby restarts and
    length-based learned-clause deletion at restarts."""

    def __init__(self) -> None:
        self.num_vars = 0
        self.clauses: list[list[int] | None] = []
        self.learned: list[int] = []
        self.watches: list[list[int]] = [[], []]  # index 0/1 unused (var 0)
        self.value: list[int] = [0]  # per var: -1 unset else 0/1; index 0 unused
        self.level: list[int] = [0]
        self.reason: list[int] = [-1]
        self.activity: list[float] = [0.0]
        self.phase: list[int] = [0]
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.var_inc = 1.0
        self.heap: list[tuple[float, int]] = []
        self.ok = True

    def new_var(self) -> int:
        self.num_vars += 1
        self.value.append(_UNSET)
        self.level.append(0)
        self.reason.append(-1)
        self.activity.append(0.0)
        self.phase.append(0)
        self.watches.append([])
        self.watches.append([])
        heappush(self.heap, (0.0, self.num_vars))
        return self.num_vars

    def lit_value(self, lit: int) -> int:
        v = self.value[lit >> 1]
        if v == _UNSET:
            return _UNSET
        return v ^ (lit & 1)

    def add_clause(self, lits: list[int]) -> None:
        """Add a problem clause; only valid before solve() is called."""
        if not self.ok:
            return
        out = []
        seen = set()
        for lit in lits:
            if lit in seen:
                continue
            if lit ^ 1 in seen:
                return  # tautology
            val = self.value[lit >> 1]
            if val != _UNSET:
                if val == 1 - (lit & 1):
                    return  # satisfied at level 0
                continue  # permanently false literal
            seen.add(lit)
            out.append(lit)
        if not out:
            self.ok = False
            return
        if len(out) == 1:
            if not self.enqueue(out[0], -1):
                self.ok = False
            elif self.propagate() is not None:
                self.ok = False
            return
        idx = len(self.clauses)
        self.clauses.append(out)
        self.watches[out[0]].append(idx)
        self.watches[out[1]].append(idx)

    def enqueue(self, lit: int, reason: int) -> bool:
        val = self.lit_value(lit)
        if val != _UNSET:
            return val == 1
        var = lit >> 1
        self.value[var] = 1 - (lit & 1)
        self.level[var] = len(self.trail_lim)
        self.reason[var] = reason
        self.trail.append(lit)
        return True

    def propagate(self) -> int | None:
        clauses = self.clauses
        watches = self.watches
        value = self.value
        level = self.level
        reason = self.reason
        trail = self.trail
        while self.qhead < len(trail):
            lit = trail[self.qhead]
            self.qhead += 1
            falsified = lit ^ 1
            watchers = watches[falsified]
            i = 0
            while i < len(watchers):
                ci = watchers[i]
                clause = clauses[ci]
                if clause is None:
                    watchers[i] = watchers[-1]
                    watchers.pop()
                    continue
                if clause[0] == falsified:
                    clause[0] = clause[1]
                    clause[1] = falsified
                first = clause[0]
                fv = value[first >> 1]
                if fv == 1 - (first & 1):
                    i += 1
                    continue
                moved = False
                for k in range(2, len(clause)):
                    lk = clause[k]
                    if value[lk >> 1] != lk & 1:  # unset or true
                        clause[1] = lk
                        clause[k] = falsified
                        watches[lk].append(ci)
                        watchers[i] = watchers[-1]
                        watchers.pop()
                        moved = True
                        break
                if moved:
                    continue
                if fv != _UNSET:
                    return ci  # all literals false
                var = first >> 1
                value[var] = 1 - (first & 1)
                level[var] = len(self.trail_lim)
                reason[var] = ci
                trail.append(first)
                i += 1
        return None

    def bump(self, var: int) -> None:
        act = self.activity[var] + self.var_inc
        self.activity[var] = act
        if act > 1e100:
            for v in range(1, self.num_vars + 1):
                self.activity[v] *= 1e-100
            self.var_inc *= 1e-100
            act = self.activity[var]
        heappush(self.heap, (-act, var))

    def analyze(self, confl: int) -> tuple[list[int], int]:
        learnt: list[int] = []
        seen = self._seen
        path_count = 0
        p = None
        index = len(self.trail)
        current = len(self.trail_lim)
        while True:
            clause = self.clauses[confl]
            for q in clause if p is None else clause[1:]:
                var = q >> 1
                if not seen[var] and self.level[var] > 0:
                    seen[var] = 1
                    self.bump(var)
                    if self.level[var] >= current:
                        path_count += 1
                    else:
                        learnt.append(q)
            while True:
                index -= 1
                if seen[self.trail[index] >> 1]:
                    break
            p = self.trail[index]
            confl = self.reason[p >> 1]
            seen[p >> 1] = 0
            path_count -= 1
            if path_count <= 0:
                break
        extra_marks: list[int] = []
        minimized = [q for q in learnt if not self._redundant(q, extra_marks)]
        for q in learnt:
            seen[q >> 1] = 0
        for var in extra_marks:
            seen[var] = 0
        learnt = [p ^ 1] + minimized
        if len(learnt) == 1:
            return learnt, 0
        best = 1
        for k in range(2, len(learnt)):
            if self.level[learnt[k] >> 1] > self.level[learnt[best] >> 1]:
                best = k
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[learnt[1] >> 1]

    def _redundant(self, lit: int, extra_marks: list[int]) -> bool:
        """True when the reason graph shows ``lit`` is implied by the other
        learnt literals (standard recursive clause minimization). Marks made
        on success stay in ``_seen`` and are handed back for cleanup."""
        if self.reason[lit >> 1] < 0:
            return False
        seen = self._seen
        stack = [lit]
        added: list[int] = []
        while stack:
            top = stack.pop()
            clause = self.clauses[self.reason[top >> 1]]
            for q in clause[1:]:
                var = q >> 1
                if seen[var] or self.level[var] == 0:
                    continue
                if self.reason[var] < 0:
                    for v in added:
                        seen[v] = 0
                    return False
                seen[var] = 1
                added.append(var)
                stack.append(q)
        extra_marks.extend(added)
        return True

    def cancel_until(self, target: int) -> None:
        if len(self.trail_lim) <= target:
            return
        limit = self.trail_lim[target]
        for lit in reversed(self.trail[limit:]):
            var = lit >> 1
            self.phase[var] = self.value[var]
            self.value[var] = _UNSET
            self.reason[var] = -1
            heappush(self.heap, (-self.activity[var], var))
        del self.trail[limit:]
        del self.trail_lim[target:]
        self.qhead = len(self.trail)

    def pick_branch(self) -> int:
        while self.heap:
            _, var = heappop(self.heap)
            if self.value[var] == _UNSET:
                return var << 1 | (1 - self.phase[var])
        for var in range(1, self.num_vars + 1):
            if self.value[var] == _UNSET:
                return var << 1 | (1 - self.phase[var])
        return 0

    def _reduce_learned(self) -> None:
        """Drop the longer half of non-binary, non-reason learned clauses."""

        def locked(ci: int) -> bool:
            head = self.clauses[ci][0] >> 1
            return self.value[head] != _UNSET and self.reason[head] == ci

        candidates = [
            ci
            for ci in self.learned
            if self.clauses[ci] is not None
            and len(self.clauses[ci]) > 2
            and not locked(ci)
        ]
        candidates.sort(key=lambda ci: len(self.clauses[ci]))
        for ci in candidates[len(candidates) // 2 :]:
            self.clauses[ci] = None
        self.learned = [ci for ci in self.learned if self.clauses[ci] is not None]

    def solve(self) -> bool:
        if not self.ok:
            return False
        if self.propagate() is not None:
            self.ok = False
            return False
        self._seen = bytearray(self.num_vars + 1)
        restarts = 0
        conflicts_until_restart = self._luby(restarts) * 128
        conflicts = 0
        max_learned = max(4000, len(self.clauses) // 2)
        while True:
            confl = self.propagate()
            if confl is not None:
                if not self.trail_lim:
                    self.ok = False
                    return False
                conflicts += 1
                learnt, back_level = self.analyze(confl)
                self.cancel_until(back_level)
                if len(learnt) == 1:
                    self.enqueue(learnt[0], -1)
                else:
                    idx = len(self.clauses)
                    self.clauses.append(learnt)
                    self.learned.append(idx)
                    self.watches[learnt[0]].append(idx)
                    self.watches[learnt[1]].append(idx)
                    self.enqueue(learnt[0], idx)
                self.var_inc *= 1.052
                if conflicts >= conflicts_until_restart:
                    conflicts = 0
                    restarts += 1
                    conflicts_until_restart = self._luby(restarts) * 128
                    self.cancel_until(0)
                    if len(self.learned) > max_learned:
                        self._reduce_learned()
                        max_learned = int(max_learned * 1.3)
            else:
                lit = self.pick_branch()
                if lit == 0:
                    return True
                self.trail_lim.append(len(self.trail))
                self.enqueue(lit, -1)

    @staticmethod
    def _luby(i: int) -> int:
        size, seq = 1, 0
        while size < i + 1:
            seq += 1
            size = 2 * size + 1
        while size - 1 != i:
            size = (size - 1) >> 1
            seq -= 1
            i %= size
        return 1 << seq


# ---------------------------------------------------------------------------
# Script interpretation and grounding

_TRUE = ("true",)
_FALSE = ("false",)


class Script:
    """Declarations and assertions of one SMT-LIB script."""

    def __init__(self) -> None:
        self.bool_consts: list[str] = []
        self.sorts: dict[str, list[str]] = {}
        self.const_sort: dict[str, str] = {}
        self.predicates: dict[str, list[str]] = {}  # name -> argument sorts
        self.assertions: list[tuple] = []
        self.wants_model = False
        self.has_check = False

    # -- declaration handling ------------------------------------------------

    def declare_sort(self, name: str, arity: str) -> None:
        if arity != "0":
            raise SmtUnsupportedError("only 0-ary sorts are supported")
        self.sorts.setdefault(name, [])

    def declare_fun(self, name: str, args: list, ret: str) -> None:
        if name in self.const_sort or name in self.predicates or name in self.bool_consts:
            raise SmtFormatError(f"redeclaration of {name}")
        if not args:
            if ret == "Bool":
                self.bool_consts.append(name)
            elif ret in self.sorts:
                self.sorts[ret].append(name)
                self.const_sort[name] = ret
            else:
                raise SmtUnsupportedError(f"unsupported constant sort {ret}")
            return
        if ret != "Bool":
            raise SmtUnsupportedError("non-Bool function symbols are not supported")
        arg_sorts = []
        for a in args:
            if not isinstance(a, str) or a not in self.sorts:
                raise SmtUnsupportedError("predicates may only take declared sorts")
            arg_sorts.append(a)
        self.predicates[name] = arg_sorts

    # -- term parsing ---------------------------------------------------------

    def parse_term(self, sx) -> tuple:
        """Parse into ('true'|'false'), ('bvar',n), ('not',t), ('and'|'or',ts),
        ('eeq',a,b), ('papp',p,args); => / xor / = / distinct / ite desugared."""
        if isinstance(sx, str):
            if sx == "true":
                return _TRUE
            if sx == "false":
                return _FALSE
            if sx in self.const_sort:
                raise SmtUnsupportedError(f"sort-valued term {sx} in Boolean position")
            if sx in self.bool_consts:
                return ("bvar", sx)
            raise SmtFormatError(f"unknown symbol {sx}")
        if not sx:
            raise SmtFormatError("empty term")
        head = sx[0]
        args = sx[1:]
        if head == "not":
            if len(args) != 1:
                raise SmtFormatError("'not' takes one argument")
            return ("not", self.parse_term(args[0]))
        if head == "and":
            return ("and", tuple(self.parse_term(a) for a in args)) if args else _TRUE
        if head == "or":
            return ("or", tuple(self.parse_term(a) for a in args)) if args else _FALSE
        if head == "=>":
            if len(args) < 2:
                raise SmtFormatError("'=>' takes at least two arguments")
            out = self.parse_term(args[-1])
            for a in reversed(args[:-1]):
                out = ("or", (("not", self.parse_term(a)), out))
            return out
        if head == "xor":
            if len(args) < 2:
                raise SmtFormatError("'xor' takes at least two arguments")
            out = self.parse_term(args[0])
            for a in args[1:]:
                rhs = self.parse_term(a)
                out = (
                    "and",
                    (("or", (out, rhs)), ("or", (("not", out), ("not", rhs)))),
                )
            return out
        if head == "=":
            if len(args) < 2:
                raise SmtFormatError("'=' takes at least two arguments")
            if all(isinstance(a, str) and a in self.const_sort for a in args):
                pairs = [self._elem_eq(a, b) for a, b in zip(args, args[1:])]
                return pairs[0] if len(pairs) == 1 else ("and", tuple(pairs))
            parts = [self.parse_term(a) for a in args]
            pairs = []
            for a, b in zip(parts, parts[1:]):
                pairs.append(
                    ("and", (("or", (("not", a), b)), ("or", (a, ("not", b)))))
                )
            return pairs[0] if len(pairs) == 1 else ("and", tuple(pairs))
        if head == "distinct":
            if all(isinstance(a, str) and a in self.const_sort for a in args):
                pairs = []
                for i in range(len(args)):
                    for j in range(i + 1, len(args)):
                        pairs.append(("not", self._elem_eq(args[i], args[j])))
                if not pairs:
                    return _TRUE
                return pairs[0] if len(pairs) == 1 else ("and", tuple(pairs))
            raise SmtUnsupportedError("'distinct' is only supported on sort constants")
        if head in self.predicates:
            sig = self.predicates[head]
            if len(args) != len(sig):
                raise SmtFormatError(f"wrong arity for {head}")
            names = []
            for a, want in zip(args, sig):
                if not isinstance(a, str) or self.const_sort.get(a) != want:
                    raise SmtUnsupportedError(
                        f"predicate {head} applied to a non-constant argument"
                    )
                names.append(a)
            return ("papp", head, tuple(names))
        raise SmtUnsupportedError(f"unsupported operator {head!r}")

    def _elem_eq(self, a: str, b: str) -> tuple:
        if self.const_sort[a] != self.const_sort[b]:
            raise SmtFormatError(f"'=' on constants of different sorts: {a}, {b}")
        if a == b:
            return _TRUE
        return ("eeq", min(a, b), max(a, b))


class Grounder:
    """Compile a Script to CNF and decide it."""

    def __init__(self, script: Script) -> None:
        self.script = script
        self.sat = CdclSolver()
        self.bool_var: dict[str, int] = {}
        self.fixed: dict[str, int] = {}  # constant -> pinned universe value
        self.value_var: dict[tuple[str, int], int] = {}
        self.table: dict[tuple, object] = {}  # (pred, values) -> var index or bool
        self.sort_size: dict[str, int] = {}
        # memo: node -> [var, pos_done, neg_done]
        self.memo: dict[tuple, list] = {}

    # -- setup ----------------------------------------------------------------

    def _flatten_conjuncts(self, node: tuple, out: list[tuple]) -> None:
        if node[0] == "and":
            for child in node[1]:
                self._flatten_conjuncts(child, out)
        else:
            out.append(node)

    def prepare(self) -> list[tuple]:
        """Pin distinct base constants, absorb ground predicate facts, and
        return the remaining top-level conjuncts."""
        conjuncts: list[tuple] = []
        for node in self.script.assertions:
            self._flatten_conjuncts(node, conjuncts)

        for sort, consts in self.script.sorts.items():
            self.sort_size[sort] = max(1, len(consts))

        # Constants asserted pairwise distinct at the top level may be pinned
        # to fixed universe values, which is sound up to renaming the
        # universe. Build the family greedily in declaration order.
        diseq: dict[str, set[tuple[str, str]]] = {}
        for node in conjuncts:
            if node[0] == "not" and node[1][0] == "eeq":
                _, a, b = node[1]
                diseq.setdefault(self.script.const_sort[a], set()).add((a, b))
        for sort, consts in self.script.sorts.items():
            pairs = diseq.get(sort, set())
            family: list[str] = []
            for const in consts:
                if all(
                    (min(const, other), max(const, other)) in pairs
                    for other in family
                ):
                    family.append(const)
            if len(family) >= 2:
                for value, const in enumerate(family):
                    self.fixed[const] = value

        remaining: list[tuple] = []
        for node in conjuncts:
            if node[0] == "not" and node[1][0] == "eeq":
                _, a, b = node[1]
                if a in self.fixed and b in self.fixed:
                    continue  # pinned values are distinct by construction
            fact = self._ground_fact(node)
            if fact is not None:
                key, truth = fact
                prior = self.table.get(key)
                if isinstance(prior, bool) and prior != truth:
                    self.sat.ok = False
                elif prior is None or isinstance(prior, bool):
                    self.table[key] = truth
                continue
            remaining.append(node)
        return remaining

    def _ground_fact(self, node: tuple) -> tuple[tuple, bool] | None:
        truth = True
        if node[0] == "not":
            node = node[1]
            truth = False
        if node[0] != "papp":
            return None
        _, pred, args = node
        if all(a in self.fixed for a in args):
            values = tuple(self.fixed[a] for a in args)
            return (pred, values), truth
        return None

    # -- variable helpers -------------------------------------------------------

    def _bool_var(self, name: str) -> int:
        var = self.bool_var.get(name)
        if var is None:
            var = self.sat.new_var()
            self.bool_var[name] = var
        return var

    def _value_literal(self, const: str, value: int) -> int:
        """Literal for "const takes universe value ``value``"; pinned
        constants are handled by the callers and never reach here."""
        assert const not in self.fixed
        var = self.value_var.get((const, value))
        if var is None:
            var = self.sat.new_var()
            self.value_var[(const, value)] = var
        return var << 1

    def _encode_free_constants(self) -> None:
        """Exactly-one value per unpinned constant (sequential at-most-one)."""
        for sort, consts in self.script.sorts.items():
            size = self.sort_size[sort]
            for const in consts:
                if const in self.fixed:
                    continue
                lits = [self._value_literal(const, v) for v in range(size)]
                self.sat.add_clause(list(lits))
                if size <= 1:
                    continue
                chain = [self.sat.new_var() for _ in range(size - 1)]
                self.sat.add_clause([lits[0] ^ 1, chain[0] << 1])
                for i in range(1, size - 1):
                    self.sat.add_clause([(chain[i - 1] << 1) ^ 1, chain[i] << 1])
                    self.sat.add_clause([lits[i] ^ 1, (chain[i - 1] << 1) ^ 1])
                    self.sat.add_clause([lits[i] ^ 1, chain[i] << 1])
                self.sat.add_clause([lits[size - 1] ^ 1, (chain[size - 2] << 1) ^ 1])

    def _table_entry(self, pred: str, values: tuple[int, ...]):
        entry = self.table.get((pred, values))
        if entry is None:
            entry = self.sat.new_var()
            self.table[(pred, values)] = entry
        return entry

    # -- atom grounding ----------------------------------------------------------

    def _ground_eeq(self, node: tuple, var: int, positive: bool) -> None:
        _, a, b = node
        sort = self.script.const_sort[a]
        size = self.sort_size[sort]
        fa, fb = self.fixed.get(a), self.fixed.get(b)
        lit = var << 1
        if fa is not None and fb is not None:
            self.sat.add_clause([lit if fa == fb else lit ^ 1])
            return
        if fa is not None or fb is not None:
            free, value = (b, fa) if fa is not None else (a, fb)
            x = self._value_literal(free, value)
            if positive:
                self.sat.add_clause([lit ^ 1, x])
            else:
                self.sat.add_clause([lit, x ^ 1])
            return
        for v in range(size):
            xa = self._value_literal(a, v)
            xb = self._value_literal(b, v)
            if positive:
                # eq and a=v forces b=v
                self.sat.add_clause([lit ^ 1, xa ^ 1, xb])
            else:
                # not-eq forbids a shared value
                self.sat.add_clause([lit, xa ^ 1, xb ^ 1])

    def _ground_papp(self, node: tuple, var: int, positive: bool) -> None:
        _, pred, args = node
        lit = var << 1
        free_positions = [i for i, a in enumerate(args) if a not in self.fixed]
        sizes = [self.sort_size[self.script.const_sort[a]] for a in args]
        if not free_positions:
            entry = self._table_entry(pred, tuple(self.fixed[a] for a in args))
            if isinstance(entry, bool):
                self.sat.add_clause([lit if entry else lit ^ 1])
            else:
                e = entry << 1
                if positive:
                    self.sat.add_clause([lit ^ 1, e])
                else:
                    self.sat.add_clause([lit, e ^ 1])
            return
        if len(free_positions) == 2 and len(args) == 2:
            self._ground_papp_rows(node, var, positive)
            return
        # Generic grounding over all value combinations of the free arguments.
        domains = [range(sizes[i]) for i in free_positions]
        for combo in product(*domains):
            values = list(self.fixed.get(a, -1) for a in args)
            guard: list[int] = []
            for pos, v in zip(free_positions, combo):
                values[pos] = v
                guard.append(self._value_literal(args[pos], v) ^ 1)
            entry = self._table_entry(pred, tuple(values))
            if isinstance(entry, bool):
                if positive and not entry:
                    self.sat.add_clause([lit ^ 1, *guard])
                elif not positive and entry:
                    self.sat.add_clause([lit, *guard])
            else:
                e = entry << 1
                if positive:
                    self.sat.add_clause([lit ^ 1, *guard, e])
                else:
                    self.sat.add_clause([lit, *guard, e ^ 1])

    def _ground_papp_rows(self, node: tuple, var: int, positive: bool) -> None:
        """Binary predicate over two free constants: one clause per first-arg
        value when the whole table row is already constant."""
        _, pred, (a, b) = node
        lit = var << 1
        size_a = self.sort_size[self.script.const_sort[a]]
        size_b = self.sort_size[self.script.const_sort[b]]
        for va in range(size_a):
            row = [self.table.get((pred, (va, vb))) for vb in range(size_b)]
            xa = self._value_literal(a, va)
            if all(isinstance(e, bool) for e in row):
                if positive:
                    wanted = [vb for vb, e in enumerate(row) if e]
                else:
                    wanted = [vb for vb, e in enumerate(row) if not e]
                head = lit ^ 1 if positive else lit
                self.sat.add_clause(
                    [head, xa ^ 1, *(self._value_literal(b, vb) for vb in wanted)]
                )
            else:
                for vb in range(size_b):
                    entry = self._table_entry(pred, (va, vb))
                    xb = self._value_literal(b, vb)
                    if isinstance(entry, bool):
                        if positive and not entry:
                            self.sat.add_clause([lit ^ 1, xa ^ 1, xb ^ 1])
                        elif not positive and entry:
                            self.sat.add_clause([lit, xa ^ 1, xb ^ 1])
                    else:
                        e = entry << 1
                        if positive:
                            self.sat.add_clause([lit ^ 1, xa ^ 1, xb ^ 1, e])
                        else:
                            self.sat.add_clause([lit, xa ^ 1, xb ^ 1, e ^ 1])

    # -- Tseitin with polarity tracking -------------------------------------------

    def compile(self, node: tuple, need_pos: bool, need_neg: bool) -> int:
        """Return a literal equisatisfiable with ``node``; clauses are emitted
        only for the polarities in which the node can be relevant."""
        kind = node[0]
        if kind == "true":
            return self._const_literal(True)
        if kind == "false":
            return self._const_literal(False)
        if kind == "bvar":
            return self._bool_var(node[1]) << 1
        if kind == "not":
            return self.compile(node[1], need_neg, need_pos) ^ 1

        state = self.memo.get(node)
        if state is None:
            state = [self.sat.new_var(), False, False]
            self.memo[node] = state
        var, pos_done, neg_done = state
        emit_pos = need_pos and not pos_done
        emit_neg = need_neg and not neg_done
        if not emit_pos and not emit_neg:
            return var << 1
        state[1] = pos_done or need_pos
        state[2] = neg_done or need_neg

        if kind == "eeq":
            if emit_pos:
                self._ground_eeq(node, var, positive=True)
            if emit_neg:
                self._ground_eeq(node, var, positive=False)
            return var << 1
        if kind == "papp":
            if emit_pos:
                self._ground_papp(node, var, positive=True)
            if emit_neg:
                self._ground_papp(node, var, positive=False)
            return var << 1
        if kind in ("and", "or"):
            children = [
                self.compile(child, need_pos, need_neg) for child in node[1]
            ]
            lit = var << 1
            if kind == "and":
                if emit_pos:
                    for child in children:
                        self.sat.add_clause([lit ^ 1, child])
                if emit_neg:
                    self.sat.add_clause([lit] + [c ^ 1 for c in children])
            else:
                if emit_pos:
                    self.sat.add_clause([lit ^ 1] + children)
                if emit_neg:
                    for child in children:
                        self.sat.add_clause([lit, child ^ 1])
            return var << 1
        raise SmtUnsupportedError(f"cannot compile node {kind!r}")

    def _const_literal(self, truth: bool) -> int:
        var = self.bool_var.get("@const_true")
        if var is None:
            var = self.sat.new_var()
            self.bool_var["@const_true"] = var
            self.sat.add_clause([var << 1])
        return var << 1 if truth else (var << 1) ^ 1

    def assert_top(self, node: tuple) -> None:
        if node[0] == "and":
            for child in node[1]:
                self.assert_top(child)
            return
        if node[0] == "or":
            children = [self.compile(child, True, False) for child in node[1]]
            self.sat.add_clause(children)
            return
        self.sat.add_clause([self.compile(node, True, False)])

    # -- main entry -----------------------------------------------------------

    def check(self) -> str:
        remaining = self.prepare()
        self._encode_free_constants()
        for node in remaining:
            if not self.sat.ok:
                break
            self.assert_top(node)
        if not self.sat.ok:
            return "unsat"
        return "sat" if self.sat.solve() else "unsat"

    def model_lines(self) -> list[str]:
        lines = []
        for name in self.script.bool_consts:
            var = self.bool_var.get(name)
            value = self.sat.value[var] == 1 if var is not None else False
            lines.append(f"  (define-fun {name} () Bool {'true' if value else 'false'})")
        for sort, consts in self.script.sorts.items():
            by_value = {v: c for c, v in self.fixed.items() if self.script.const_sort[c] == sort}
            for const in consts:
                value = self.fixed.get(const)
                if value is None:
                    value = 0
                    for v in range(self.sort_size[sort]):
                        var = self.value_var.get((const, v))
                        if var is not None and self.sat.value[var] == 1:
                            value = v
                            break
                rep = by_value.get(value, f"@{sort}!val!{value}")
                lines.append(f"  (define-fun {const} () {sort} {rep})")
        return lines


def interpret(text: str) -> tuple[str, list[str]]:
    """Run a script; returns (status token, model lines)."""
    script = Script()
    for command in parse_sexprs(text):
        if not isinstance(command, list) or not command:
            raise SmtFormatError("top-level items must be command lists")
        head = command[0]
        if head in ("set-logic", "set-option", "set-info", "push", "pop"):
            continue
        if head == "exit":
            break
        if head == "declare-sort":
            script.declare_sort(command[1], command[2] if len(command) > 2 else "0")
        elif head == "declare-fun":
            script.declare_fun(command[1], command[2], command[3])
        elif head == "declare-const":
            script.declare_fun(command[1], [], command[2])
        elif head == "assert":
            if len(command) != 2:
                raise SmtFormatError("'assert' takes one term")
            script.assertions.append(script.parse_term(command[1]))
        elif head == "check-sat":
            script.has_check = True
        elif head == "get-model":
            script.wants_model = True
        else:
            raise SmtUnsupportedError(f"unsupported command {head!r}")
    if not script.has_check:
        raise SmtFormatError("script has no (check-sat)")
    grounder = Grounder(script)
    status = grounder.check()
    model = grounder.model_lines() if status == "sat" and script.wants_model else []
    return status, model


def solve_text(text: str) -> tuple[str, dict[str, bool]]:
    """Convenience wrapper: status plus Boolean-constant model values."""
    status, lines = interpret(text)
    model: dict[str, bool] = {}
    for line in lines:
        parts = line.split()
        if len(parts) >= 5 and parts[3] == "Bool":
            model[parts[1]] = parts[4].rstrip(")") == "true"
    return status, model


def main(argv: list[str] | None = None) -> int:
    args = argv if argv is not None else sys.argv[1:]
    try:
        if args:
            with open(args[0], "r", encoding="utf-8") as handle:
                text = handle.read()
        else:
            text = sys.stdin.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        status, model = interpret(text)
    except (SmtUnsupportedError, SmtFormatError) as exc:
        print("unknown")
        print(f"; {exc}", file=sys.stderr)
        return 0
    print(status)
    if model:
        print("(")
        for line in model:
            print(line)
        print(")")
    return 0


if __name__ == "__main__":
    sys.exit(main())
