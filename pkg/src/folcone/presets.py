"""Preset files: a small sectioned text format for foliation presentations.

Format (``#`` starts a comment; blank lines separate nothing):

    name <identifier>
    tag <free text>                      (optional metadata)
    vars <v1> <v2> ...

    generators
      <gname> = <vector field expression>

    structure                            (optional)
      [<gi>, <gj>] = <combination of generators with polynomial coefficients>

    operators                            (optional)
      <opname> = <operator expression>

Structure lines fix c_ij; unspecified pairs default to the zero bracket, and
the whole array is validated exactly against the generator brackets.
Builtin presets: debord_line, so3_r3, vanishing_origin_2, vanishing_origin_3,
order2_r2, r4_counterexample.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .expr import OperatorWord, ParseError, Polynomial, parse_operator, parse_vector_field
from .foliation import FoliationPresentation


class PresetError(ValueError):
    """Preset file problem, carrying line (1-based) and column (1-based)."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


@dataclass
class Preset:
    presentation: FoliationPresentation
    operators: dict[str, list[OperatorWord]] = field(default_factory=dict)
    generator_names: tuple[str, ...] = ()
    tag: str = ""
    source: str = "<builtin>"


_STRUCT_RE = re.compile(r"^\[\s*(\w+)\s*,\s*(\w+)\s*\]\s*=\s*(.*)$")


def parse_preset_text(text: str, source: str = "<string>") -> Preset:
    name = ""
    tag = ""
    vars_: tuple[str, ...] | None = None
    generators: list[tuple[str, str, int]] = []  # (name, expr, line)
    structure_lines: list[tuple[str, str, str, int]] = []  # (gi, gj, expr, line)
    operator_lines: list[tuple[str, str, int]] = []
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split(None, 1)
        keyword = head[0]
        if keyword == "name":
            if len(head) != 2:
                raise PresetError("'name' needs a value", lineno)
            name = head[1].strip()
            continue
        if keyword == "tag":
            tag = head[1].strip() if len(head) == 2 else ""
            continue
        if keyword == "vars":
            if len(head) != 2:
                raise PresetError("'vars' needs at least one variable", lineno)
            vars_ = tuple(head[1].replace(",", " ").split())
            continue
        if line in ("generators", "structure", "operators"):
            section = line
            continue
        if section == "generators":
            if "=" not in line:
                raise PresetError("generator line must be '<name> = <field>'", lineno)
            gname, expr = (part.strip() for part in line.split("=", 1))
            generators.append((gname, expr, lineno))
            continue
        if section == "structure":
            m = _STRUCT_RE.match(line)
            if m is None:
                raise PresetError("structure line must be '[gi, gj] = <combination>'", lineno)
            structure_lines.append((m.group(1), m.group(2), m.group(3).strip(), lineno))
            continue
        if section == "operators":
            if "=" not in line:
                raise PresetError("operator line must be '<name> = <expression>'", lineno)
            oname, expr = (part.strip() for part in line.split("=", 1))
            operator_lines.append((oname, expr, lineno))
            continue
        raise PresetError(f"unexpected line {line!r} outside any section", lineno)

    if vars_ is None:
        raise PresetError("missing 'vars' declaration", 1)
    if not generators:
        raise PresetError("missing 'generators' section", 1)

    gen_names = tuple(g for g, _, _ in generators)
    if len(set(gen_names)) != len(gen_names):
        raise PresetError("duplicate generator name", generators[0][2])
    fields = []
    for gname, expr, lineno in generators:
        try:
            fields.append(parse_vector_field(expr, vars_))
        except ParseError as exc:
            raise PresetError(f"in generator {gname}: {exc.message}", lineno, exc.pos + 1) from exc

    structure = None
    if structure_lines:
        n = len(gen_names)
        zero = Polynomial.zero(vars_)
        zero_vec = tuple(zero for _ in range(n))
        c = [[zero_vec for _ in range(n)] for _ in range(n)]
        index = {g: i for i, g in enumerate(gen_names)}
        for gi, gj, expr, lineno in structure_lines:
            if gi not in index or gj not in index:
                raise PresetError(f"unknown generator in bracket [{gi},{gj}]", lineno)
            try:
                words = parse_operator(expr, gen_names, vars_)
            except ParseError as exc:
                raise PresetError(f"in bracket [{gi},{gj}]: {exc.message}", lineno, exc.pos + 1) from exc
            vec = list(zero_vec)
            for w in words:
                if len(w.letters) != 1:
                    raise PresetError(
                        f"bracket [{gi},{gj}] must be a combination of single generators", lineno
                    )
                vec[w.letters[0]] = vec[w.letters[0]] + w.coefficient
            i, j = index[gi], index[gj]
            c[i][j] = tuple(vec)
            c[j][i] = tuple(-q for q in vec)
        structure = tuple(tuple(row) for row in c)

    try:
        presentation = FoliationPresentation(vars_, tuple(fields), structure, name=name)
    except ValueError as exc:
        raise PresetError(f"invalid presentation: {exc}", 1) from exc

    operators: dict[str, list[OperatorWord]] = {}
    for oname, expr, lineno in operator_lines:
        try:
            operators[oname] = parse_operator(expr, gen_names, vars_)
        except ParseError as exc:
            raise PresetError(f"in operator {oname}: {exc.message}", lineno, exc.pos + 1) from exc

    return Preset(presentation, operators, gen_names, tag, source)


BUILTIN_NAMES = (
    "debord_line",
    "so3_r3",
    "vanishing_origin_2",
    "vanishing_origin_3",
    "order2_r2",
    "r4_counterexample",
)

_CACHE: dict[str, Preset] = {}


def load_preset(name_or_path: str) -> Preset:
    """Load a builtin preset by name, or a preset file by path."""
    if name_or_path in BUILTIN_NAMES:
        if name_or_path not in _CACHE:
            text = (
                resources.files("folcone").joinpath(f"data/{name_or_path}.preset").read_text()
            )
            _CACHE[name_or_path] = parse_preset_text(text, source=f"<builtin:{name_or_path}>")
        return _CACHE[name_or_path]
    path = Path(name_or_path)
    if path.exists():
        return parse_preset_text(path.read_text(), source=str(path))
    raise PresetError(
        f"unknown preset {name_or_path!r}; builtins: {', '.join(BUILTIN_NAMES)}", 1
    )
