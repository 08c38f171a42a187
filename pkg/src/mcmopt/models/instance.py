"""Problem instances and their derived sizing constants."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..numeric import adder_count_upper_bound, default_wordlength, msb_index, normalize_constant, odd_targets

METRICS = ("adders", "adders_ad", "bits", "truncated")
METRIC_ALIASES = {"adders-ad": "adders_ad", "tmcm": "truncated"}

DEFAULT_TIMEOUT = 1800.0


class InstanceError(ValueError):
    pass


@dataclass(frozen=True)
class Instance:
    """An MCM problem.

    ``budgets`` holds one integer error budget per entry of ``targets`` (in
    units of the output node LSB). Targets with the same odd part share the
    tightest of their budgets.
    """

    targets: tuple[int, ...]
    metric: str = "adders"
    adder_bound: int | None = None
    wordlength: int | None = None
    s_max: int | None = None
    s_min: int | None = None
    input_wordlength: int | None = None
    budgets: tuple[int, ...] | None = None
    ad_bound: int | None = None
    timeout: float = DEFAULT_TIMEOUT
    symmetry_breaking: bool = True
    adder_slack: int = 0
    notes: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "metric", METRIC_ALIASES.get(self.metric, self.metric))
        if self.budgets is not None:
            object.__setattr__(self, "budgets", tuple(int(b) for b in self.budgets))
        self.check()

    def check(self) -> None:
        if not self.targets:
            raise InstanceError("empty target set")
        if 0 in self.targets:
            raise InstanceError("zero target: it needs no adder and must be dropped")
        if self.metric not in METRICS:
            raise InstanceError(f"unknown metric {self.metric!r}; expected one of {', '.join(METRICS)}")
        if self.metric in ("bits", "truncated") and self.input_wordlength is None:
            raise InstanceError(f"metric {self.metric} requires input_wordlength")
        if self.input_wordlength is not None and self.input_wordlength < 1:
            raise InstanceError("input_wordlength must be positive")
        if self.metric == "truncated" and self.budgets is None:
            raise InstanceError("metric truncated requires budgets")
        if self.budgets is not None:
            if len(self.budgets) != len(self.targets):
                raise InstanceError(f"{len(self.budgets)} budgets for {len(self.targets)} targets")
            if any(b < 0 for b in self.budgets):
                raise InstanceError("error budgets must be non-negative")
        if self.timeout <= 0:
            raise InstanceError("timeout must be positive")
        top = max(self.odd_targets, default=1)
        if self.w < 1 or top > (1 << self.w):
            raise InstanceError(f"word length {self.w} too small to represent target {top}")
        if self.adder_bound is not None and self.adder_bound < 0:
            raise InstanceError("adder_bound must be non-negative")

    # -- derived sizing --

    @property
    def odd_targets(self) -> list[int]:
        return odd_targets(self.targets)

    @property
    def w(self) -> int:
        return self.wordlength if self.wordlength is not None else default_wordlength(self.odd_targets)

    @property
    def shift_max(self) -> int:
        return self.s_max if self.s_max is not None else self.w

    @property
    def neg_shift_max(self) -> int:
        return -(self.s_min if self.s_min is not None else -(self.w + 1))

    @property
    def n_adders(self) -> int:
        if self.adder_bound is not None:
            n = self.adder_bound
        else:
            n = adder_count_upper_bound(self.odd_targets)
        return max(n + self.adder_slack, 1)

    @property
    def x_max(self) -> int:
        return (1 << (self.input_wordlength or 1)) - 1

    def odd_budgets(self) -> dict[int, int]:
        """Budget per distinct odd target (the tightest among targets sharing it)."""
        if self.budgets is None:
            return {}
        out: dict[int, int] = {}
        for t, b in zip(self.targets, self.budgets):
            odd = normalize_constant(t).odd
            out[odd] = min(b, out.get(odd, b))
        return out

    def with_(self, **changes) -> "Instance":
        return replace(self, **changes)


def half_ulp_budgets(targets, input_wordlength: int, bits: int) -> tuple[int, ...]:
    """Per-output budget ``2**(msb(x_max * c) - k)`` for a faithful ``k``-bit output, floored at 0 bits."""
    x_max = (1 << input_wordlength) - 1
    out = []
    for t in targets:
        odd = normalize_constant(t).odd
        e = msb_index(x_max * odd) - bits
        out.append(1 << e if e >= 0 else 0)
    return tuple(out)


def parse_budget(text: str, targets, input_wordlength: int | None) -> tuple[int, ...]:
    """Either an absolute integer applied to every output or ``"0.5ulp@k"``."""
    text = text.strip()
    if text.startswith("0.5ulp@"):
        if input_wordlength is None:
            raise InstanceError("0.5ulp budgets need the input word length")
        try:
            k = int(text.split("@", 1)[1])
        except ValueError:
            raise InstanceError(f"malformed budget {text!r}") from None
        return half_ulp_budgets(targets, input_wordlength, k)
    try:
        value = int(text)
    except ValueError:
        raise InstanceError(f"malformed budget {text!r}: expected an integer or 0.5ulp@k") from None
    if value < 0:
        raise InstanceError("error budget must be non-negative")
    return tuple(value for _ in targets)
