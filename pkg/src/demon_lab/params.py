"""Per-level scale-up parameters, exponent inequalities and rank bounds.

Level ``k`` has rank bound ``R_k = R0 tau^k`` and scale ``T = lam^R``; the
sizes are powers of ``T``. Values are computed in double precision with a
log2 shadow, so callers can tell which level leaves the representable range.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

from .exceptions import InvalidParameter, ParameterRangeError

__all__ = [
    "ExponentSet",
    "LevelParams",
    "Inequality",
    "InequalityReport",
    "MinColors",
    "RankBounds",
    "BoundFunctions",
    "level_params",
    "toy_level_params",
    "check_inequalities",
    "min_colors",
    "rank_bounds",
    "bound_functions",
    "jump_table",
    "parse_config",
    "load_config",
    "exponents_from_config",
]

DEFAULT_Q1 = 0.05


@dataclass(frozen=True)
class ExponentSet:
    delta: float = 0.15
    gamma: float = 0.2
    phi: float = 0.25
    tau: float = 1.75
    tau_prime: float = 2.5
    omega: float = 4.5
    chi: float = 0.015
    lam: float = math.sqrt(2.0)
    Lambda: float = 500.0
    H: float = 12.0
    c1: float = 1.0
    c2: float = 0.29
    c3: float = 1.0
    R0: float = 4.0
    faithful: bool = False

    def __post_init__(self):
        if self.lam <= 1:
            raise InvalidParameter("lam must exceed 1")
        if self.tau <= 1:
            raise InvalidParameter("tau must exceed 1")
        if self.faithful and not math.isclose(self.tau, 2 - self.phi, abs_tol=1e-12):
            raise InvalidParameter("faithful mode requires tau = 2 - phi")

    @property
    def tau_bar(self) -> float:
        return 2 * self.tau / (self.tau - 1)

    def replace(self, **changes) -> "ExponentSet":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class LevelParams:
    """Numeric parameters of one level.

    ``log2_T`` is always finite; the plain fields may be ``inf`` or ``0.0``
    when built with ``strict=False`` beyond the double range.
    """

    k: int
    R: float
    T: float
    Delta: float
    f: float
    g: float
    w: float
    sigma: float
    q: float
    tau: float = 1.75
    tau_prime: float = 2.5
    lam: float = math.sqrt(2.0)
    log2_T: float = float("nan")
    Delta_star: float = float("nan")
    toy: bool = False

    @property
    def g_prime(self) -> float:
        return 2.2 * self.g

    @property
    def lambda1(self) -> float:
        return 7 * self.Delta

    @property
    def lambda2(self) -> float:
        return self.g_prime

    @property
    def L1(self) -> float:
        return 4 * self.lambda1

    @property
    def L2(self) -> float:
        return 4 * self.lambda2

    @property
    def L3(self) -> float:
        return self.g

    @property
    def R_star(self) -> float:
        return self.tau * self.R

    @property
    def R_hat(self) -> float:
        return self.tau_prime * self.R

    @property
    def p_bar(self) -> float:
        return 1.0 / self.T

    @property
    def tau_bar(self) -> float:
        return 2 * self.tau / (self.tau - 1)

    def as_dict(self) -> dict[str, float]:
        keys = ("k", "R", "T", "Delta", "f", "g", "g_prime", "lambda1", "lambda2",
                "L1", "L2", "L3", "w", "sigma", "q", "R_star", "R_hat", "p_bar",
                "Delta_star")
        return {key: getattr(self, key) for key in keys}


def _pow2(log2_value: float, level: int, name: str, strict: bool) -> float:
    if log2_value > 1023.999:
        if strict:
            raise ParameterRangeError(f"{name} overflows at level {level}", level=level)
        return math.inf
    return 2.0 ** log2_value


def level_params(exps: ExponentSet, k: int, sigma1: float = 0.0, q1: float = DEFAULT_Q1,
                 strict: bool = True) -> LevelParams:
    """Parameters of level ``k``; the ``sigma`` and ``q`` recursions start at level 1."""
    if k < 1:
        raise InvalidParameter("level must be at least 1")
    if exps.R0 <= 1:
        raise InvalidParameter("R0 must exceed 1")
    log2_lam = math.log2(exps.lam)
    sigma, q = sigma1, q1
    for level in range(1, k + 1):
        R = exps.R0 * exps.tau ** level
        if not math.isfinite(R):
            raise ParameterRangeError(f"rank overflows at level {level}", level=level)
        log2_T = R * log2_lam
        if level == k:
            break
        # sigma* = sigma + Lambda g/f and q* = q + Delta* / T, both in log form
        sigma += exps.Lambda * 2.0 ** ((exps.gamma - exps.phi) * log2_T)
        q += 2.0 ** ((exps.tau * exps.delta - 1) * log2_T)
    vals = {}
    for name, expo in (("T", 1.0), ("Delta", exps.delta), ("f", exps.phi), ("g", exps.gamma),
                       ("Delta_star", exps.tau * exps.delta)):
        vals[name] = _pow2(expo * log2_T, k, name, strict)
    w = 2.0 ** (-exps.omega * log2_T)
    return LevelParams(k=k, R=R, w=w, sigma=sigma, q=q, tau=exps.tau,
                       tau_prime=exps.tau_prime, lam=exps.lam, log2_T=log2_T, **vals)


def toy_level_params(Delta: float, f: float, g: float, w: float, q: float, R: float,
                     sigma: float = 0.0, k: int = 1, Delta_star: float | None = None,
                     exps: ExponentSet | None = None) -> LevelParams:
    """Explicit small-scale parameters with the relaxed validity check.

    Requires ``Delta <= g <= f``, ``3 f <= Delta_star`` and ``sigma < 0.5``;
    ``Delta_star`` defaults to ``Delta ** tau``.
    """
    exps = exps or ExponentSet()
    if Delta_star is None:
        Delta_star = Delta ** exps.tau
    if not (0 < Delta <= g <= f):
        raise InvalidParameter("toy parameters need 0 < Delta <= g <= f")
    if 3 * f > Delta_star:
        raise InvalidParameter("toy parameters need 3 f <= Delta*")
    if not (0 <= sigma < 0.5):
        raise InvalidParameter("toy parameters need 0 <= sigma < 0.5")
    if not (0 < w < 1) or not (0 <= q < 1) or R <= 0:
        raise InvalidParameter("toy parameters need 0 < w < 1, 0 <= q < 1, R > 0")
    log2_T = R * math.log2(exps.lam)
    return LevelParams(k=k, R=R, T=2.0 ** log2_T if log2_T < 1024 else math.inf,
                       Delta=Delta, f=f, g=g, w=w, sigma=sigma, q=q, tau=exps.tau,
                       tau_prime=exps.tau_prime, lam=exps.lam, log2_T=log2_T,
                       Delta_star=Delta_star, toy=True)


@dataclass(frozen=True)
class Inequality:
    name: str
    expression: str
    lhs: float
    rhs: float
    relation: str
    passed: bool


@dataclass(frozen=True)
class InequalityReport:
    items: tuple[Inequality, ...]

    @property
    def all_passed(self) -> bool:
        return all(item.passed for item in self.items)

    def failed(self) -> list[str]:
        return [item.name for item in self.items if not item.passed]

    def lines(self) -> list[str]:
        return [f"{'PASS' if it.passed else 'FAIL'} {it.name}: {it.expression} "
                f"({it.lhs:.6g} {it.relation} {it.rhs:.6g})" for it in self.items]


_RELATIONS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
}


def check_inequalities(exps: ExponentSet) -> InequalityReport:
    """Evaluate every exponent inequality required by the scale-up."""
    d, gm, ph = exps.delta, exps.gamma, exps.phi
    t, tp, om, chi, tb = exps.tau, exps.tau_prime, exps.omega, exps.chi, exps.tau_bar
    specs = [
        ("rank-growth", "tau < tau' < tau^2", tp, t * t, "<",
         t < tp < t * t),
        ("exponent-order", "0 < delta < gamma < phi < 1", d, gm, "<", 0 < d < gm < ph < 1),
        ("tau-upper", "tau <= 2 - phi", t, 2 - ph, "<=", None),
        ("delta-lower", "phi < tau*delta", ph, t * d, "<", None),
        ("gamma-middle", "gamma >= (delta + phi)/2", gm, (d + ph) / 2, ">=", None),
        ("correlated-trap", "4(gamma + delta) < omega(4 - tau)", 4 * (gm + d), om * (4 - t), "<",
         None),
        ("emerging-tau", "tau < 2", t, 2.0, "<", None),
        ("emerging-omega", "4 gamma + 6 delta + tau' < omega", 4 * gm + 6 * d + tp, om, "<", None),
        ("emerging-rank", "tau(delta + 1) < tau'", t * (d + 1), tp, "<", None),
        ("hole-gap", "tau*chi < gamma - delta", t * chi, gm - d, "<", None),
        ("hole-unit", "tau_bar*chi < 1 - tau*delta", tb * chi, 1 - t * d, "<", None),
        ("hole-omega", "tau_bar*chi < omega - 2 tau*delta", tb * chi, om - 2 * t * d, "<", None),
    ]
    items = []
    for name, expr, lhs, rhs, rel, verdict in specs:
        # exact decimal ties such as gamma = (delta + phi)/2 count as equality
        if verdict is None:
            if math.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-15):
                verdict = rel in ("<=", ">=")
            else:
                verdict = _RELATIONS[rel](lhs, rhs)
        items.append(Inequality(name, expr, float(lhs), float(rhs), rel, bool(verdict)))
    return InequalityReport(tuple(items))


@dataclass(frozen=True)
class MinColors:
    bound: int
    bound_value: float
    exact: int
    w1: float


def min_colors(exps: ExponentSet | None = None, w1: float | None = None) -> MinColors:
    """Upper bound ``ceil(2 lam^(R0 omega tau))`` and the exact ``ceil(1/w1 + 1)``.

    When ``w1`` is given directly the bound is ``ceil(2/w1)``.
    """
    if w1 is None:
        exps = exps or ExponentSet()
        if exps.R0 <= 1:
            raise InvalidParameter("R0 must exceed 1")
        log2_inv = exps.R0 * exps.omega * exps.tau * math.log2(exps.lam)
        if log2_inv > 1022:
            raise ParameterRangeError("minimum color bound overflows", level=1)
        inv_w1 = 2.0 ** log2_inv
        w1 = 1.0 / inv_w1
    else:
        if not 0 < w1 < 1:
            raise InvalidParameter("w1 must lie in (0, 1)")
        inv_w1 = 1.0 / w1
    value = 2.0 * inv_w1
    return MinColors(bound=math.ceil(value), bound_value=value,
                     exact=math.ceil(inv_w1 + 1), w1=w1)


@dataclass(frozen=True)
class RankBounds:
    lower: float
    upper: float
    lifetime: int


def rank_bounds(exps: ExponentSet, k: int) -> RankBounds:
    """Rank window ``[R_k, tau_bar R_k]`` and the number of levels a rank can live."""
    if k < 1:
        raise InvalidParameter("level must be at least 1")
    R = exps.R0 * exps.tau ** k
    lifetime = math.ceil(math.log(exps.tau_bar) / math.log(exps.tau) - 1e-12)
    return RankBounds(R, exps.tau_bar * R, lifetime)


def jump_table(lam: float, length: int) -> tuple[int, ...]:
    """Distance classes ``d_0 = 0, d_1 = 1, d_i = ceil(lam^i)``."""
    if not 1 <= length <= 128:
        raise InvalidParameter("table length must be in 1..128")
    out = []
    for i in range(length):
        if i < 2:
            out.append(i)
            continue
        v = lam ** i
        near = round(v)
        # sqrt(2)**2 is 2.0000000000000004 in floating point
        out.append(int(near) if abs(v - near) <= 1e-9 * v else math.ceil(v))
    return tuple(out)


@dataclass(frozen=True)
class BoundFunctions:
    p: float
    h: float
    d: tuple[int, ...]


def bound_functions(exps: ExponentSet, r: float, length: int = 16) -> BoundFunctions:
    """``p(r) = c2 r^-c1 lam^-r``, ``h(r) = c3 lam^(-chi r)`` and the ``d_i`` table."""
    if r <= 0:
        raise InvalidParameter("rank must be positive")
    p = exps.c2 * r ** (-exps.c1) * exps.lam ** (-r)
    h = exps.c3 * exps.lam ** (-exps.chi * r)
    return BoundFunctions(p, h, jump_table(exps.lam, length))


_FIELD_ALIASES = {"tau'": "tau_prime", "tauprime": "tau_prime", "lambda": "lam",
                  "r0": "R0", "big_lambda": "Lambda"}


def parse_config(text: str) -> dict[str, str]:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are ignored."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameter(f"config line {lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise InvalidParameter(f"config line {lineno}: empty key")
        out[key] = value
    return out


def load_config(path) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidParameter(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def exponents_from_config(values: dict[str, str], base: ExponentSet | None = None) -> ExponentSet:
    """Apply the exponent keys of a config map; other keys are ignored."""
    base = base or ExponentSet()
    names = {f.name for f in dataclasses.fields(ExponentSet)}
    changes = {}
    for key, value in values.items():
        name = _FIELD_ALIASES.get(key, key)
        if name not in names:
            continue
        try:
            if name == "faithful":
                changes[name] = value.lower() in ("1", "true", "yes", "on")
            else:
                changes[name] = float(value)
        except ValueError:
            raise InvalidParameter(f"config value for {key} is not a number: {value}") from None
    return base.replace(**changes)
