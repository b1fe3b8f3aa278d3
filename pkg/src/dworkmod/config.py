"""Run configurations: a small sectioned key = value format.

    [ring]            p, a, N, buffer
    [caps]            D_X, D_T, D_f, U, L
    [sigma]           f1 = [((1,), 1)] ...  (optional q = ...)
    [module NAME]     rank + entries, or derive = sym_power(M, 2)
    [task NAME]       kind, module, then task parameters

Polynomials are lists of (exponent tuple, integer) pairs.  Integers are written
in decimal and never truncated to a machine word.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field

from .errors import ParseError, ValidationError
from .padic import is_prime

TASK_KINDS = ("euler", "trace", "verify", "unit-root", "limiting", "polygon", "gm-scan")
DERIVE_OPS = {"sym_power": 2, "ext_power": 2, "tensor": 2, "direct_sum": 2, "trivial": 0}
RING_KEYS = ("p", "a", "N", "buffer")
CAP_KEYS = ("D_X", "D_T", "D_f", "U", "L")
TASK_LIST_KEYS = ("k", "i")


@dataclass
class ModuleDef:
    name: str
    rank: int | None = None
    entries: list | None = None
    derive: str | None = None


@dataclass
class TaskDef:
    name: str
    kind: str
    module: str | None = None
    params: dict = field(default_factory=dict)


@dataclass
class RunConfig:
    p: int
    a: int = 1
    N: int = 6
    buffer: int | None = None
    caps: dict = field(default_factory=dict)
    sigma: list = field(default_factory=list)
    q: int | None = None
    modules: dict = field(default_factory=dict)
    tasks: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.sigma)

    @property
    def W(self) -> int:
        return self.N + (self.n + 4 if self.buffer is None else self.buffer)

    def cap(self, key, default=None):
        v = self.caps.get(key)
        return default if v is None else v


# ---------------------------------------------------------------------------
# parsing


def _strip_comment(line: str) -> str:
    for mark in ("#", ";"):
        i = line.find(mark)
        if i >= 0:
            line = line[:i]
    return line.rstrip()


def _literal(text: str, lineno: int, col: int):
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError) as exc:
        off = getattr(exc, "offset", None) or 1
        raise ParseError(f"cannot read value {text!r}", lineno, col + off - 1) from None


def _int(text: str, lineno: int, col: int) -> int:
    t = text.strip()
    try:
        return int(t, 10)
    except ValueError:
        raise ParseError(f"expected a decimal integer, got {t!r}", lineno, col) from None


def _int_list(text: str, lineno: int, col: int):
    out = []
    for part in text.split(","):
        if part.strip():
            out.append(_int(part, lineno, col))
    return out


def _check_derive(expr: str, lineno: int, col: int):
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot read derivation {expr!r}", lineno, col + (exc.offset or 1) - 1) from None

    def walk(node):
        if isinstance(node, ast.Name):
            return
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in DERIVE_OPS:
            if len(node.args) != DERIVE_OPS[node.func.id] or node.keywords:
                raise ParseError(f"{node.func.id} takes {DERIVE_OPS[node.func.id]} arguments", lineno, col)
            for a in node.args:
                walk(a)
            return
        raise ParseError(f"unsupported derivation {expr!r}", lineno, col)

    walk(tree.body)


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration.

    Raises:
        ParseError: malformed text, with 1-based line and column.
        ValidationError: well-formed but inconsistent, naming the field.
    """
    ring, caps, sigma = {}, {}, {}
    modules, tasks = {}, []
    section = None
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        stripped = line.strip()
        col0 = len(line) - len(line.lstrip()) + 1
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ParseError("unterminated section header", lineno, col0 + len(stripped))
            parts = stripped[1:-1].split()
            if not parts:
                raise ParseError("empty section header", lineno, col0)
            head = parts[0]
            if head in ("ring", "caps", "sigma") and len(parts) == 1:
                section, current = head, None
            elif head in ("module", "task") and len(parts) == 2:
                name = parts[1]
                if head == "module":
                    if name in modules:
                        raise ParseError(f"module {name!r} defined twice", lineno, col0)
                    current = modules[name] = {"_line": lineno}
                else:
                    current = {"_line": lineno, "_name": name}
                    tasks.append(current)
                section = head
            else:
                raise ParseError(f"unknown section {stripped}", lineno, col0)
            continue
        if "=" not in line:
            raise ParseError("expected key = value", lineno, col0)
        eq = line.index("=")
        key = line[:eq].strip()
        vcol = eq + 2 + (len(line[eq + 1:]) - len(line[eq + 1:].lstrip()))
        value = line[eq + 1:].strip()
        if not key:
            raise ParseError("missing key", lineno, col0)
        if section is None:
            raise ParseError("key outside any section", lineno, col0)
        target = {"ring": ring, "caps": caps, "sigma": sigma}.get(section, current)
        if key in target:
            raise ParseError(f"duplicate key {key!r}", lineno, col0)
        target[key] = (value, lineno, vcol)
    return _build(ring, caps, sigma, modules, tasks)


def _build(ring, caps, sigma, modules, tasks) -> RunConfig:
    for k in ring:
        if k not in RING_KEYS:
            raise ValidationError(f"ring.{k}", "unknown ring key")
    if "p" not in ring:
        raise ValidationError("ring.p", "the prime p is required")
    vals = {k: _int(*ring[k]) for k in ring}
    cfg = RunConfig(p=vals["p"], a=vals.get("a", 1), N=vals.get("N", 6), buffer=vals.get("buffer"))
    for k in caps:
        if k not in CAP_KEYS:
            raise ValidationError(f"caps.{k}", "unknown cap")
        cfg.caps[k] = _int(*caps[k])
    fkeys = sorted((k for k in sigma if k != "q"), key=lambda s: (len(s), s))
    for i, k in enumerate(fkeys, start=1):
        if k != f"f{i}":
            raise ValidationError(f"sigma.{k}", "perturbations must be named f1, f2, ...")
        cfg.sigma.append(_terms(_literal(*sigma[k]), f"sigma.{k}"))
    if "q" in sigma:
        cfg.q = _int(*sigma["q"])
    for name, d in modules.items():
        md = ModuleDef(name)
        for k, (v, ln, c) in ((k, v) for k, v in d.items() if not k.startswith("_")):
            if k == "rank":
                md.rank = _int(v, ln, c)
            elif k == "entries":
                md.entries = _literal(v, ln, c)
            elif k == "derive":
                _check_derive(v, ln, c)
                md.derive = v
            else:
                raise ValidationError(f"module.{name}.{k}", "unknown module key")
        cfg.modules[name] = md
    for d in tasks:
        name = d["_name"]
        kind = d.get("kind", (None,))[0]
        td = TaskDef(name, kind, d.get("module", (None,))[0])
        for k, (v, ln, c) in ((k, v) for k, v in d.items() if not k.startswith("_")):
            if k in ("kind", "module"):
                continue
            if k in TASK_LIST_KEYS:
                td.params[k] = _int_list(v, ln, c)
            elif v.isidentifier():
                td.params[k] = v
            else:
                td.params[k] = _literal(v, ln, c)
        cfg.tasks.append(td)
    validate(cfg)
    return cfg


def _terms(obj, fieldname):
    if not isinstance(obj, (list, tuple)):
        raise ValidationError(fieldname, "a polynomial is a list of (exponents, coefficient) pairs")
    out = []
    for t in obj:
        if not (isinstance(t, (list, tuple)) and len(t) == 2 and isinstance(t[0], (list, tuple))
                and isinstance(t[1], int) and all(isinstance(e, int) and e >= 0 for e in t[0])):
            raise ValidationError(fieldname, f"bad term {t!r}")
        out.append((tuple(t[0]), int(t[1])))
    return out


def _derive_refs(expr):
    tree = ast.parse(expr, mode="eval")
    return [n.id for n in ast.walk(tree) if isinstance(n, ast.Name) and n.id not in DERIVE_OPS]


def validate(cfg: RunConfig) -> None:
    if cfg.p < 2 or not is_prime(cfg.p):
        raise ValidationError("ring.p", f"{cfg.p} is not prime")
    if cfg.a < 1:
        raise ValidationError("ring.a", "a must be positive")
    if cfg.N < 1:
        raise ValidationError("ring.N", "N must be positive")
    if cfg.buffer is not None and cfg.buffer < 0:
        raise ValidationError("ring.buffer", "buffer must be non-negative")
    for k, v in cfg.caps.items():
        if v <= 0:
            raise ValidationError(f"caps.{k}", "caps must be positive")
    if not cfg.sigma:
        raise ValidationError("sigma", "at least one variable (f1) is required")
    n = cfg.n
    for i, f in enumerate(cfg.sigma, start=1):
        for e, _ in f:
            if len(e) != n:
                raise ValidationError(f"sigma.f{i}", f"exponent {e} should have {n} entries")
    if cfg.q is not None and cfg.q != cfg.p**cfg.a:
        raise ValidationError("sigma.q", f"q = {cfg.q} does not match p^a = {cfg.p**cfg.a}")
    seen = []
    for name, md in cfg.modules.items():
        where = f"module.{name}"
        if md.derive is not None:
            if md.entries is not None:
                raise ValidationError(where, "give entries or derive, not both")
            for ref in _derive_refs(md.derive):
                if ref not in seen:
                    raise ValidationError(where, f"derivation refers to undefined module {ref!r}")
        else:
            if md.rank is None or md.entries is None:
                raise ValidationError(where, "rank and entries are required")
            if len(md.entries) != md.rank or any(len(row) != md.rank for row in md.entries):
                raise ValidationError(f"{where}.entries", f"expected a {md.rank} x {md.rank} array")
            md.entries = [[_terms(e, f"{where}.entries") for e in row] for row in md.entries]
            for row in md.entries:
                for e in row:
                    for ex, _ in e:
                        if len(ex) != n:
                            raise ValidationError(f"{where}.entries", f"exponent {ex} should have {n} entries")
        seen.append(name)
    names = set()
    for td in cfg.tasks:
        where = f"task.{td.name}"
        if td.name in names:
            raise ValidationError(where, "task defined twice")
        names.add(td.name)
        if td.kind not in TASK_KINDS:
            raise ValidationError(f"{where}.kind", f"kind must be one of {', '.join(TASK_KINDS)}")
        if td.module is None:
            raise ValidationError(f"{where}.module", "a module is required")
        if td.module not in cfg.modules:
            raise ValidationError(f"{where}.module", f"module {td.module!r} is not defined")
        aux = td.params.get("aux")
        if aux is not None and aux not in cfg.modules:
            raise ValidationError(f"{where}.aux", f"module {aux!r} is not defined")


# ---------------------------------------------------------------------------
# canonical text


def _fmt_terms(terms):
    return "[" + ", ".join(f"({tuple(e)!r}, {c})" for e, c in terms) + "]"


def serialize(cfg: RunConfig) -> str:
    """Canonical text for a config; parse_config(serialize(c)) == c."""
    out = ["[ring]", f"p = {cfg.p}", f"a = {cfg.a}", f"N = {cfg.N}"]
    if cfg.buffer is not None:
        out.append(f"buffer = {cfg.buffer}")
    if cfg.caps:
        out += ["", "[caps]"] + [f"{k} = {cfg.caps[k]}" for k in CAP_KEYS if k in cfg.caps]
    out += ["", "[sigma]"]
    if cfg.q is not None:
        out.append(f"q = {cfg.q}")
    out += [f"f{i} = {_fmt_terms(f)}" for i, f in enumerate(cfg.sigma, start=1)]
    for name, md in cfg.modules.items():
        out += ["", f"[module {name}]"]
        if md.derive is not None:
            out.append(f"derive = {md.derive}")
        else:
            rows = ", ".join("[" + ", ".join(_fmt_terms(e) for e in row) + "]" for row in md.entries)
            out += [f"rank = {md.rank}", f"entries = [{rows}]"]
    for td in cfg.tasks:
        out += ["", f"[task {td.name}]", f"kind = {td.kind}", f"module = {td.module}"]
        for k in sorted(td.params):
            v = td.params[k]
            if k in TASK_LIST_KEYS:
                out.append(f"{k} = {', '.join(str(x) for x in v)}")
            elif isinstance(v, str) and v.isidentifier():
                out.append(f"{k} = {v}")
            else:
                out.append(f"{k} = {v!r}")
    return "\n".join(out) + "\n"
