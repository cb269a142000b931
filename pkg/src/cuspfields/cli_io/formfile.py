"""Hand-writable text files holding a modular form's q-expansion at infinity.

Layout::

    # free-form comment lines (kept verbatim, e.g. provenance)
    label: 11a
    level: 11
    weight: 2
    group: Gamma0
    newform: yes
    coefficient-modulus: 1
    character: 9: 2->1/6          (optional, generator -> exponent pairs)
    atkin-lehner: 11=-1           (optional, Q=value[*sqrt(r)] separated by ';')
    precision: 400
    a0: 0
    1 1
    2 -2
    ...

Values are rationals ``p/q`` or cyclotomic numbers ``M:[c_0,...,c_{phi(M)-1}]``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from ..characters import DirichletCharacter
from ..cyclotomic import CycNumber
from ..expansion_engine import ModularFormInput
from ..field_bounds import PseudoEigenvalue
from ..qseries import QExpansion

__all__ = ["FormFile", "FormFileError", "parse_value", "format_value", "load_form", "bundled_forms", "bundled_path"]

DATA_DIR = Path(__file__).resolve().parent.parent / "data" / "forms"

_HEADER_ORDER = (
    "label",
    "level",
    "weight",
    "group",
    "newform",
    "coefficient-modulus",
    "character",
    "atkin-lehner",
    "precision",
    "a0",
)


class FormFileError(ValueError):
    pass


def parse_value(text: str) -> CycNumber:
    text = text.strip()
    if ":" in text:
        return CycNumber.from_text(text)
    try:
        return CycNumber.rational(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise FormFileError(f"malformed value {text!r}") from None


def format_value(x: CycNumber, modulus: int = 1) -> str:
    if x.is_rational():
        q = x.to_rational()
        return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    M = modulus if modulus % x.modulus == 0 and modulus > 1 else x.modulus
    return x.embed(M).to_text() if x.modulus != M else x.to_text()


def _parse_pseudo(text: str) -> PseudoEigenvalue:
    m = re.fullmatch(r"(.*?)(?:\*sqrt\((\d+)\))?", text.strip())
    return PseudoEigenvalue(parse_value(m.group(1)), int(m.group(2) or 1))


def _format_pseudo(v: PseudoEigenvalue, modulus: int) -> str:
    s = format_value(v.value, modulus)
    return s + (f"*sqrt({v.radical})" if v.radical > 1 else "")


@dataclass
class FormFile:
    label: str
    level: int
    weight: int
    group: str
    newform: bool
    coeff_modulus: int
    coefficients: list[CycNumber]  # a_0 .. a_{P-1}
    character: DirichletCharacter | None = None
    atkin_lehner: dict[int, PseudoEigenvalue] = field(default_factory=dict)
    comments: list[str] = field(default_factory=list)

    @property
    def precision(self) -> int:
        return len(self.coefficients)

    # -- text

    @classmethod
    def parse(cls, text: str) -> FormFile:
        comments, header, coeffs = [], {}, {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                comments.append(line[1:].strip())
                continue
            m = re.fullmatch(r"([a-z0-9-]+)\s*:\s*(.*)", line)
            if m and not line[0].isdigit():
                key = m.group(1)
                if key not in _HEADER_ORDER:
                    raise FormFileError(f"line {lineno}: unknown header key {key!r}")
                header[key] = m.group(2).strip()
                continue
            parts = line.split(None, 1)
            if len(parts) != 2 or not parts[0].isdigit():
                raise FormFileError(f"line {lineno}: expected 'n value', got {line!r}")
            n = int(parts[0])
            if n == 0 or n in coeffs:
                raise FormFileError(f"line {lineno}: coefficient index {n} repeated or zero (use 'a0:')")
            coeffs[n] = parse_value(parts[1])
        for key in ("level", "weight", "precision"):
            if key not in header:
                raise FormFileError(f"missing header key {key!r}")
        P = int(header["precision"])
        missing = [n for n in range(1, P) if n not in coeffs]
        if missing or max(coeffs, default=0) >= P:
            raise FormFileError(f"coefficients must be listed for n = 1..{P - 1}")
        a = [parse_value(header.get("a0", "0"))] + [coeffs[n] for n in range(1, P)]
        char = header.get("character")
        chi = DirichletCharacter.from_text(char) if char else None
        al = {}
        for item in filter(None, (t.strip() for t in header.get("atkin-lehner", "").split(";"))):
            q, _, v = item.partition("=")
            al[int(q)] = _parse_pseudo(v)
        newform = header.get("newform", "no").lower()
        if newform not in ("yes", "no"):
            raise FormFileError("newform must be 'yes' or 'no'")
        return cls(
            label=header.get("label", ""),
            level=int(header["level"]),
            weight=int(header["weight"]),
            group=header.get("group", "Gamma0"),
            newform=newform == "yes",
            coeff_modulus=int(header.get("coefficient-modulus", "1")),
            coefficients=a,
            character=chi,
            atkin_lehner=al,
            comments=comments,
        )

    def to_text(self) -> str:
        n = self.coeff_modulus
        lines = [f"# {c}" if c else "#" for c in self.comments]
        lines.append(f"label: {self.label}")
        lines.append(f"level: {self.level}")
        lines.append(f"weight: {self.weight}")
        lines.append(f"group: {self.group}")
        lines.append(f"newform: {'yes' if self.newform else 'no'}")
        lines.append(f"coefficient-modulus: {n}")
        if self.character is not None:
            lines.append(f"character: {self.character.to_text()}")
        if self.atkin_lehner:
            al = "; ".join(f"{q}={_format_pseudo(v, n)}" for q, v in sorted(self.atkin_lehner.items()))
            lines.append(f"atkin-lehner: {al}")
        lines.append(f"precision: {self.precision}")
        lines.append(f"a0: {format_value(self.coefficients[0], n)}")
        for i, c in enumerate(self.coefficients[1:], 1):
            lines.append(f"{i} {format_value(c, n)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, path) -> FormFile:
        return cls.parse(Path(path).read_text())

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    # -- conversion

    def to_input(self) -> ModularFormInput:
        width = self.level if self.group == "Gamma" else 1
        exp = QExpansion.from_coeffs(width, self.coefficients, modulus=self.coeff_modulus)
        return ModularFormInput(
            self.level,
            self.weight,
            exp,
            group=self.group,
            character=self.character,
            coeff_modulus=self.coeff_modulus,
            is_newform=self.newform,
            al_eigenvalues=dict(self.atkin_lehner),
            label=self.label,
        )

    @classmethod
    def from_input(cls, f: ModularFormInput, comments=()) -> FormFile:
        cs = [f.expansion.coeff(n) for n in range(f.expansion.prec)]
        return cls(
            f.label, f.N, f.k, f.group, f.is_newform, f.coeff_modulus, cs, f.character,
            dict(f.al_eigenvalues), list(comments),
        )


def bundled_path(label: str) -> Path:
    return DATA_DIR / f"{label}.form"


def bundled_forms() -> list[str]:
    return sorted(p.stem for p in DATA_DIR.glob("*.form"))


def load_form(path_or_label) -> ModularFormInput:
    """Load a form file by path, or a bundled form by label (e.g. '11a')."""
    p = Path(path_or_label)
    if not p.exists():
        cand = bundled_path(str(path_or_label))
        if not cand.exists():
            raise FileNotFoundError(f"no form file {path_or_label!r} (bundled: {', '.join(bundled_forms())})")
        p = cand
    return FormFile.load(p).to_input()
