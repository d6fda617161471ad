"""One-tape Turing machines and the number of distinct cells visited.

``s_n`` counts the cells the head has stood on after ``n`` steps, the start
cell included, so ``s_n <= n + 1``.  Continuing a run from its step-``k``
configuration with a fresh visited set gives the exact subadditivity
``s_{k+m} <= s_k + s_m(after k)``.

Conventions: two-way infinite tape, symbol ``0`` is the blank, input written
rightwards from cell 0, head on cell 0 in the start state.  A HALT entry
freezes the configuration, so ``s_n`` is defined for every ``n``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import CapExceeded, ConfigError
from .fekete import fekete_limit_additive
from .words import Word, format_word

MOVES = {"L": -1, "R": 1}
INPUT_BUDGET = 1 << 16
CONFIG_BUDGET = 1 << 21


@dataclass(frozen=True)
class Action:
    write: int
    move: int
    next_state: int


@dataclass(frozen=True)
class TuringMachine:
    """Transition table indexed ``state * n_symbols + symbol``; ``None`` is HALT."""

    n_states: int
    n_symbols: int
    table: tuple[Action | None, ...]
    start_state: int = 0

    def __post_init__(self):
        if self.n_states < 1 or self.n_symbols < 1:
            raise ConfigError("a machine needs at least one state and one tape symbol")
        if len(self.table) != self.n_states * self.n_symbols:
            raise ConfigError("transition table must cover every (state, symbol) pair")
        if not 0 <= self.start_state < self.n_states:
            raise ConfigError(f"start state {self.start_state} out of range")
        for a in self.table:
            if a is None:
                continue
            if not (0 <= a.write < self.n_symbols and 0 <= a.next_state < self.n_states):
                raise ConfigError(f"transition {a} leaves the machine's state/symbol range")
            if a.move not in (-1, 1):
                raise ConfigError(f"move must be L or R, got {a.move}")

    @classmethod
    def from_rows(
        cls,
        n_states: int,
        n_symbols: int,
        rows: Iterable[Sequence],
        halts: Iterable[Sequence[int]] = (),
        start_state: int = 0,
    ) -> "TuringMachine":
        """Build from ``(state, read, write, move, next)`` rows plus ``(state, read)`` HALTs.

        Every pair must appear exactly once among rows and halts.
        """
        table: dict[tuple[int, int], Action | None] = {}
        for state, read, write, move, nxt in rows:
            key = (int(state), int(read))
            if key in table:
                raise ConfigError(f"duplicate transition for {key}")
            if move not in MOVES:
                raise ConfigError(f"move must be 'L' or 'R', got {move!r}")
            table[key] = Action(int(write), MOVES[move], int(nxt))
        for state, read in halts:
            key = (int(state), int(read))
            if key in table:
                raise ConfigError(f"duplicate transition for {key}")
            table[key] = None
        missing = [
            (q, a) for q in range(n_states) for a in range(n_symbols) if (q, a) not in table
        ]
        if missing:
            raise ConfigError(f"transition table is not total, missing {missing}")
        extra = [k for k in table if not (0 <= k[0] < n_states and 0 <= k[1] < n_symbols)]
        if extra:
            raise ConfigError(f"transitions outside the machine: {extra}")
        return cls(
            n_states,
            n_symbols,
            tuple(table[(q, a)] for q in range(n_states) for a in range(n_symbols)),
            start_state,
        )

    def action(self, state: int, symbol: int) -> Action | None:
        return self.table[state * self.n_symbols + symbol]

    @property
    def input_symbols(self) -> range:
        return range(1, self.n_symbols)


@dataclass
class Configuration:
    tape: dict[int, int] = field(default_factory=dict)
    head: int = 0
    state: int | None = 0
    visited: set[int] = field(default_factory=lambda: {0})

    @property
    def halted(self) -> bool:
        return self.state is None

    def step(self, m: TuringMachine) -> None:
        if self.state is None:
            return
        a = m.action(self.state, self.tape.get(self.head, 0))
        if a is None:
            self.state = None
            return
        if a.write:
            self.tape[self.head] = a.write
        else:
            self.tape.pop(self.head, None)
        self.head += a.move
        self.state = a.next_state
        self.visited.add(self.head)

    def copy(self) -> "Configuration":
        return Configuration(dict(self.tape), self.head, self.state, set(self.visited))


def initial_configuration(m: TuringMachine, input_word: Sequence[int]) -> Configuration:
    tape = {}
    for i, s in enumerate(input_word):
        if s not in m.input_symbols:
            raise ConfigError(f"input symbol {s} is not a non-blank tape symbol")
        tape[i] = int(s)
    return Configuration(tape, 0, m.start_state, {0})


def simulate(m: TuringMachine, input_word: Sequence[int], n: int) -> tuple[Configuration, int]:
    """Run ``n`` steps (fewer if the machine halts) and return ``(config, s_n)``."""
    if n < 0:
        raise ConfigError(f"step count must be >= 0, got {n}")
    c = initial_configuration(m, input_word)
    for _ in range(n):
        if c.halted:
            break
        c.step(m)
    return c, len(c.visited)


def visit_counts(m: TuringMachine, input_word: Sequence[int], n: int) -> list[int]:
    """``[s_0, s_1, ..., s_n]`` from a single run."""
    c = initial_configuration(m, input_word)
    out = [1]
    for _ in range(n):
        c.step(m)
        out.append(len(c.visited))
    return out


@dataclass(frozen=True)
class SubadditivityCheck:
    holds: bool
    s_total: int
    s_first: int
    s_after: int


def check_subadditivity(
    m: TuringMachine, input_word: Sequence[int], k: int, m_steps: int
) -> SubadditivityCheck:
    """Compare ``s_{k+m}`` with ``s_k`` plus the count of the continuation
    from the step-``k`` configuration, whose visited set restarts at the
    current head cell."""
    if k < 0 or m_steps < 0:
        raise ConfigError("step counts must be >= 0")
    c, s_first = simulate(m, input_word, k)
    cont = c.copy()
    cont.visited = {c.head}
    for _ in range(m_steps):
        cont.step(m)
    s_after = len(cont.visited)
    s_total = len(c.visited | cont.visited)
    return SubadditivityCheck(s_total <= s_first + s_after, s_total, s_first, s_after)


@dataclass(frozen=True)
class SpeedRecord:
    n: int
    s_n: int
    speed: float
    best: str
    exact: bool


@dataclass
class SpeedReport:
    mode: str
    records: list[SpeedRecord]
    fekete_upper: float
    fekete_n: int
    certified: bool
    caveat: str

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "records": [
                {"n": r.n, "S_n": r.s_n, "speed": r.speed, "best": r.best, "exact": r.exact}
                for r in self.records
            ],
            "fekete_upper": self.fekete_upper,
            "fekete_n": self.fekete_n,
            "certified": self.certified,
            "caveat": self.caveat,
        }


def _input_search(
    m: TuringMachine, n_max: int, len_budget: int, beam_width: int | None, budget: int
) -> list[tuple[int, Word]]:
    length = min(len_budget, n_max)
    k = len(m.input_symbols)
    count = sum(k**ell for ell in range(length + 1))
    if count <= budget:
        inputs: Iterable[Word] = itertools.chain.from_iterable(
            itertools.product(m.input_symbols, repeat=ell) for ell in range(length + 1)
        )
        evaluated = {w: visit_counts(m, w, n_max) for w in inputs}
    elif beam_width is None or beam_width < 1:
        raise CapExceeded(
            f"{count} inputs of length <= {length} exceed the exhaustive budget of {budget}; "
            "set a beam width"
        )
    else:
        evaluated = {(): visit_counts(m, (), n_max)}
        beam: list[Word] = [()]
        for _ in range(length):
            children = [w + (s,) for w in beam for s in m.input_symbols]
            for w in children:
                evaluated[w] = visit_counts(m, w, n_max)
            children.sort(key=lambda w: (-evaluated[w][n_max], w))
            beam = children[:beam_width]
    best: list[tuple[int, Word]] = []
    ordered = sorted(evaluated)
    for n in range(1, n_max + 1):
        top = (-1, ())
        for w in ordered:
            if len(w) <= min(len_budget, n) and evaluated[w][n] > top[0]:
                top = (evaluated[w][n], w)
        best.append(top)
    return best


def _config_search(
    m: TuringMachine, n_max: int, window: int | None, budget: int
) -> list[tuple[int, str]]:
    """Supremum of ``s_n`` over start configurations, branching lazily on the
    first read of each cell whose initial content is free (``|cell| <= window``,
    or every cell when ``window`` is None)."""
    fresh = n_max if window is None else min(n_max, 2 * window + 1)
    count = m.n_states * m.n_symbols**fresh
    if count > budget:
        raise CapExceeded(
            f"{count} start configurations exceed the configuration budget of {budget}"
        )
    best_count = [0] * (n_max + 1)
    best_desc = [""] * (n_max + 1)

    def note(t: int, visited: set[int], state0: int, initial: dict[int, int]) -> None:
        if len(visited) > best_count[t]:
            best_count[t] = len(visited)
            cells = ",".join(f"{i}:{s}" for i, s in sorted(initial.items()) if s)
            best_desc[t] = f"state={state0} tape={cells}"

    # ``tape`` holds every cell already read or written; others are undecided.
    def run(state0, state, head, tape, initial, visited, t) -> None:
        while True:
            note(t, visited, state0, initial)
            if t == n_max:
                return
            if state is None:
                t += 1
                continue
            if head not in tape and (window is None or abs(head) <= window):
                for sym in range(m.n_symbols):
                    run(
                        state0, state, head, {**tape, head: sym}, {**initial, head: sym},
                        set(visited), t,
                    )
                return
            a = m.action(state, tape.get(head, 0))
            if a is None:
                state = None
                continue
            tape[head] = a.write
            head += a.move
            state = a.next_state
            visited.add(head)
            t += 1

    for q in range(m.n_states):
        run(q, q, 0, {}, {}, {0}, 0)
    return list(zip(best_count[1:], best_desc[1:]))


def max_speed_bounds(
    m: TuringMachine,
    n_max: int,
    mode: str = "config",
    *,
    window: int | None = None,
    len_budget: int | None = None,
    beam_width: int | None = None,
    budget: int | None = None,
) -> SpeedReport:
    """Best cells-visited counts ``S_n`` for ``n = 1..n_max`` and the Fekete bound.

    ``mode="input"`` maximises over input words from the standard start
    (exhaustive up to ``budget`` inputs, beam search past it); ``S_n`` is
    then only a lower estimate of the configuration supremum.
    ``mode="config"`` maximises over every start state and initial tape
    content within ``window`` of the head; when the window covers the reach
    ``n - 1`` (always, for ``window=None``) ``S_n`` is the exact supremum,
    which is subadditive, and ``min S_n / n`` bounds the limiting speed.
    """
    if n_max < 1:
        raise ConfigError(f"n_max must be >= 1, got {n_max}")
    if mode == "input":
        best = _input_search(
            m, n_max, n_max if len_budget is None else len_budget, beam_width,
            INPUT_BUDGET if budget is None else budget,
        )
        pairs = [(s, format_word(w)) for s, w in best]
        exact = [False] * n_max
        caveat = "INPUT mode: S_n is a lower estimate of the configuration supremum"
    elif mode == "config":
        if window is not None and window < 0:
            raise ConfigError(f"window must be >= 0, got {window}")
        pairs = _config_search(m, n_max, window, CONFIG_BUDGET if budget is None else budget)
        exact = [window is None or window >= n - 1 for n in range(1, n_max + 1)]
        caveat = (
            "CONFIG mode: S_n is the configuration supremum where exact is true; "
            "elsewhere cells beyond the window start blank"
        )
    else:
        raise ConfigError(f"mode must be 'input' or 'config', got {mode!r}")
    records = [
        SpeedRecord(n, s, s / n, desc, ok)
        for n, ((s, desc), ok) in enumerate(zip(pairs, exact), start=1)
    ]
    upper, at = fekete_limit_additive([float(r.s_n) for r in records])
    return SpeedReport(mode, records, upper, at, records[at - 1].exact, caveat)
