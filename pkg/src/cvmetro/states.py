"""Symbolic state descriptions and the ``family:key=value`` mini-language.

A :class:`StateSpec` names one of the single-mode state families used across
the package together with its parameters.  It carries no numerical
representation of its own: :func:`cvmetro.fock.build_state` turns it into a
truncated Fock-space state and :func:`cvmetro.gaussian.descriptor_of` into
first and second moments.

Conventions: ``x = (a + a^dag)/sqrt(2)``, ``p = (a - a^dag)/(i sqrt(2))``,
``hbar = 1`` and ``alpha = (x + i p)/sqrt(2)``.
"""

from __future__ import annotations

import ast
import math
import operator
import re
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import DomainError

FAMILIES = ("vacuum", "coherent", "gaussian", "fock", "fock_superposition", "cat", "compass")

_ALIASES = {
    "vac": "vacuum",
    "vacuum": "vacuum",
    "coherent": "coherent",
    "coh": "coherent",
    "gaussian": "gaussian",
    "gauss": "gaussian",
    "fock": "fock",
    "sup": "fock_superposition",
    "superposition": "fock_superposition",
    "fock_superposition": "fock_superposition",
    "cat": "cat",
    "compass": "compass",
}


@dataclass(frozen=True)
class StateSpec:
    """Immutable description of a state family member.

    Only the fields relevant to ``family`` are meaningful; the others keep
    their defaults.  ``gamma`` is the squeezing angle for Gaussian states and
    the relative phase for Fock superpositions and cat states.
    """

    family: str
    alpha: complex = 0j
    r: float = 0.0
    gamma: float = 0.0
    n_t: float = 0.0
    m: int = 0
    n: int = 0
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise DomainError(f"unknown state family {self.family!r}")
        object.__setattr__(self, "alpha", complex(self.alpha))
        for name in ("r", "gamma", "n_t"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if not (math.isfinite(self.alpha.real) and math.isfinite(self.alpha.imag)):
            raise DomainError("alpha must be finite")
        if self.r < 0:
            raise DomainError(f"squeezing r must be >= 0, got {self.r}")
        if self.n_t < 0:
            raise DomainError(f"thermal occupation n_t must be >= 0, got {self.n_t}")
        if self.family == "fock" and self.n < 0:
            raise DomainError(f"Fock index must be >= 0, got {self.n}")
        if self.family == "fock_superposition" and not (0 <= self.m < self.n):
            raise DomainError(f"superposition needs n > m >= 0, got m={self.m}, n={self.n}")
        if self.family in ("cat", "compass") and self.alpha == 0:
            raise DomainError(f"{self.family} state needs alpha != 0")
        if self.family == "cat" and self.cat_norm_inv_sq <= 0.0:
            raise DomainError("cat state with these parameters has zero norm")
        if not self.label:
            object.__setattr__(self, "label", self.describe())

    # -- constructors ---------------------------------------------------
    @classmethod
    def vacuum(cls) -> "StateSpec":
        return cls("vacuum")

    @classmethod
    def coherent(cls, alpha: complex) -> "StateSpec":
        return cls("coherent", alpha=alpha)

    @classmethod
    def gaussian(cls, alpha: complex = 0j, r: float = 0.0, gamma: float = 0.0,
                 n_t: float = 0.0) -> "StateSpec":
        return cls("gaussian", alpha=alpha, r=r, gamma=gamma, n_t=n_t)

    @classmethod
    def gaussian_from_nbar(cls, nbar: float, n_t: float = 0.0, gamma: float = 0.0,
                           alpha: complex = 0j) -> "StateSpec":
        """Gaussian state whose squeezing is chosen to give total ``nbar``.

        Solves ``nbar = n_t cosh 2r + |alpha|^2 + sinh^2 r`` for ``r``.
        """
        return cls.gaussian(alpha=alpha, r=squeezing_for_nbar(nbar, n_t, alpha), gamma=gamma,
                            n_t=n_t)

    @classmethod
    def fock(cls, n: int) -> "StateSpec":
        return cls("fock", n=int(n))

    @classmethod
    def fock_superposition(cls, m: int, n: int, gamma: float = 0.0) -> "StateSpec":
        return cls("fock_superposition", m=int(m), n=int(n), gamma=gamma)

    @classmethod
    def cat(cls, alpha: complex, gamma: float = 0.0) -> "StateSpec":
        return cls("cat", alpha=alpha, gamma=gamma)

    @classmethod
    def compass(cls, alpha: complex) -> "StateSpec":
        return cls("compass", alpha=alpha)

    # -- derived quantities ---------------------------------------------
    @property
    def is_gaussian(self) -> bool:
        return self.family in ("vacuum", "coherent", "gaussian")

    @property
    def cat_norm_inv_sq(self) -> float:
        """``1/N1^2 = 2 + 2 cos(gamma) exp(-2|alpha|^2)``."""
        return 2.0 + 2.0 * math.cos(self.gamma) * math.exp(-2.0 * abs(self.alpha) ** 2)

    @property
    def cat_norm(self) -> float:
        return 1.0 / math.sqrt(self.cat_norm_inv_sq)

    @property
    def compass_norm(self) -> float:
        """``N2`` with ``1/N2 = 2 sqrt(1 + e^{-2|a|^2} + 2 e^{-|a|^2} cos|a|^2)``."""
        a2 = abs(self.alpha) ** 2
        inner = 1.0 + math.exp(-2.0 * a2) + 2.0 * math.exp(-a2) * math.cos(a2)
        return 1.0 / (2.0 * math.sqrt(inner))

    def describe(self) -> str:
        """Render this state back into the mini-language."""
        f = self.family
        if f == "vacuum":
            return "vacuum"
        if f == "coherent":
            return f"coherent:a={_fmt_complex(self.alpha)}"
        if f == "gaussian":
            return (f"gaussian:r={self.r:.12g},gamma={self.gamma:.12g},nt={self.n_t:.12g},"
                    f"a={_fmt_complex(self.alpha)}")
        if f == "fock":
            return f"fock:n={self.n}"
        if f == "fock_superposition":
            return f"sup:m={self.m},n={self.n},gamma={self.gamma:.12g}"
        if f == "cat":
            return f"cat:a={_fmt_complex(self.alpha)},gamma={self.gamma:.12g}"
        return f"compass:a={_fmt_complex(self.alpha)}"


def squeezing_for_nbar(nbar: float, n_t: float = 0.0, alpha: complex = 0j) -> float:
    """Invert ``nbar = n_t cosh 2r + |alpha|^2 + sinh^2 r`` for ``r >= 0``.

    Since ``sinh^2 r = (cosh 2r - 1)/2`` this is
    ``cosh 2r = (1 + 2 (nbar - |alpha|^2)) / (1 + 2 n_t)``.
    """
    target = (1.0 + 2.0 * (nbar - abs(alpha) ** 2)) / (1.0 + 2.0 * n_t)
    if target < 1.0 - 1e-12:
        raise DomainError(
            f"nbar={nbar} is below the thermal plus coherent contribution "
            f"(n_t={n_t}, |alpha|^2={abs(alpha) ** 2})")
    return 0.5 * math.acosh(max(target, 1.0))


def _fmt_complex(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.12g}"
    if z.real == 0:
        return f"{z.imag:.12g}i"
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real:.12g}{sign}{abs(z.imag):.12g}i"


# ---------------------------------------------------------------------------
# Mini-language parsing
# ---------------------------------------------------------------------------

_UNOPS = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_NAMES = {"pi": math.pi, "e": math.e}
_NUMBER_UNIT = re.compile(r"((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)[ij](?![A-Za-z0-9_])")
_BARE_UNIT = re.compile(r"(?<![A-Za-z0-9_.])[ij](?![A-Za-z0-9_])")
MAX_EXPONENT = 64


def _power(base, exponent):
    if abs(exponent) > MAX_EXPONENT:
        raise DomainError(f"exponent {exponent!r} is out of range")
    return operator.pow(base, exponent)


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: _power}


def _eval_node(node: ast.AST) -> Any:
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
        return node.value
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
        return _UNOPS[type(node.op)](_eval_node(node.operand))
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt":
        (arg,) = node.args
        return np.sqrt(_eval_node(arg))
    raise DomainError(f"unsupported expression element {ast.dump(node)}")


def parse_number(text: str) -> complex:
    """Parse a real or complex literal such as ``1+0.5i``, ``2i``, ``pi/4``."""
    src = text.strip().replace(" ", "")
    if not src:
        raise DomainError("empty numeric value")
    # 'i' and 'j' both denote the imaginary unit: '2i' -> '2j', a bare 'i' -> '1j';
    # letters inside names such as 'pi' are left alone.
    src = _NUMBER_UNIT.sub(r"\1j", src)
    src = _BARE_UNIT.sub("1j", src)
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise DomainError(f"cannot parse number {text!r}") from exc
    try:
        return complex(_eval_node(tree))
    except (ZeroDivisionError, OverflowError, TypeError, ValueError) as exc:
        raise DomainError(f"cannot evaluate number {text!r}: {exc}") from exc


def _real(text: str, key: str) -> float:
    z = parse_number(text)
    if z.imag != 0:
        raise DomainError(f"{key} must be real, got {text!r}")
    return z.real


def _integer(text: str, key: str) -> int:
    value = _real(text, key)
    if value != int(value):
        raise DomainError(f"{key} must be an integer, got {text!r}")
    return int(value)


def parse_state(text: str) -> StateSpec:
    """Parse ``family:key=value,...`` into a :class:`StateSpec`.

    >>> parse_state("cat:a=2i,gamma=0").alpha
    2j
    >>> parse_state("fock:n=3").n
    3
    """
    head, _, tail = text.strip().partition(":")
    family = _ALIASES.get(head.strip().lower())
    if family is None:
        raise DomainError(f"unknown state family {head!r}")
    params: dict[str, str] = {}
    if tail.strip():
        for item in tail.split(","):
            key, sep, value = item.partition("=")
            if not sep:
                raise DomainError(f"expected key=value, got {item!r}")
            params[key.strip().lower()] = value.strip()

    allowed = {
        "vacuum": set(),
        "coherent": {"a"},
        "gaussian": {"a", "r", "gamma", "nt", "nbar"},
        "fock": {"n"},
        "fock_superposition": {"m", "n", "gamma"},
        "cat": {"a", "gamma"},
        "compass": {"a"},
    }[family]
    unknown = set(params) - allowed
    if unknown:
        raise DomainError(f"unknown parameter(s) {sorted(unknown)} for {family}")

    alpha = parse_number(params["a"]) if "a" in params else 0j
    gamma = _real(params["gamma"], "gamma") if "gamma" in params else 0.0
    if family == "vacuum":
        return StateSpec.vacuum()
    if family == "coherent":
        return StateSpec.coherent(alpha)
    if family == "gaussian":
        n_t = _real(params["nt"], "nt") if "nt" in params else 0.0
        if "nbar" in params:
            if "r" in params:
                raise DomainError("give either r or nbar for a gaussian state, not both")
            return StateSpec.gaussian_from_nbar(_real(params["nbar"], "nbar"), n_t, gamma, alpha)
        r = _real(params["r"], "r") if "r" in params else 0.0
        return StateSpec.gaussian(alpha=alpha, r=r, gamma=gamma, n_t=n_t)
    if family == "fock":
        return StateSpec.fock(_integer(params.get("n", "0"), "n"))
    if family == "fock_superposition":
        return StateSpec.fock_superposition(_integer(params.get("m", "0"), "m"),
                                            _integer(params.get("n", "1"), "n"), gamma)
    if family == "cat":
        return StateSpec.cat(alpha, gamma)
    return StateSpec.compass(alpha)
