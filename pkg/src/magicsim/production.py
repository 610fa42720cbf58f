"""Magic-state production: three mechanism models stepped cycle by cycle.

Each mechanism (15-to-1 distillation, two-stage cultivation, per-angle
repeat-until-success Rz preparation) is driven by a bank that owns F units,
advances them on an event heap, and feeds produced states through a one-cycle
handoff into whatever buffer the mechanism uses. Banks are deterministic
functions of (config, F, trial seed): stepping one cycle at a time or jumping
ahead over idle stretches yields identical traces, which is what lets the
scheduler skip dead cycles.

Cycle convention: a unit whose round occupies cycles s..s+L-1 resolves at the
end of cycle s+L-1; with the default one-cycle handoff the state becomes
consumable at cycle s+L.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, fields as dataclass_fields
from .rng import Stream, mix64

__all__ = [
    "Buffer",
    "CultivationConfig",
    "DistillationConfig",
    "MechanismConfig",
    "ProductionBank",
    "RzSynthConfig",
    "abort_rate_15to1",
    "config_from_json",
    "config_to_json",
    "derive_config",
    "deterministic_state_latency",
    "expected_cycles_per_state",
    "expected_throughput",
    "make_bank",
    "mechanism_family",
]

_UNIT_TAG = 0x756E6974  # distinguishes per-unit rng streams from other uses


def abort_rate_15to1(p_phys: float) -> float:
    """Per-round abort probability of 15-to-1 distillation, 15p + 105p^2."""
    if not 0.0 <= p_phys <= 0.01:
        raise ValueError(f"p_phys={p_phys} outside the model's range [0, 0.01]")
    return 15.0 * p_phys + 105.0 * p_phys * p_phys


def _clamped_round_failure(p_phys: float, distance: int) -> float:
    """Default per-round discard probability, 10 * p * d^2, capped below 1.

    The linear coefficient is a calibration placeholder, so the cap only
    matters for aggressive (p, d) corners of sensitivity grids.
    """
    return min(10.0 * p_phys * distance * distance, 0.99)


@dataclass(frozen=True)
class DistillationConfig:
    """15-to-1 distillation units producing T states into a shared buffer."""

    p_phys: float = 1e-4
    t_prod: int = 18
    abort_rate: float | None = None
    stagger: bool = True
    cost_per_factory: int = 11

    def __post_init__(self) -> None:
        if self.t_prod < 1:
            raise ValueError("t_prod must be at least 1 cycle")
        if self.cost_per_factory <= 0:
            raise ValueError("cost_per_factory must be positive")
        if self.abort_rate is None:
            object.__setattr__(self, "abort_rate", abort_rate_15to1(self.p_phys))
        if not 0.0 <= self.abort_rate <= 1.0:
            raise ValueError(f"abort_rate={self.abort_rate} outside [0, 1]")


@dataclass(frozen=True)
class CultivationConfig:
    """Two-stage grow-and-check units feeding a bounded shared buffer.

    An attempt spends t_inject cycles injecting plus r1 check rounds at
    distance d1, then t_escape cycles expanding plus r2 check rounds at d2.
    By default failures are resolved at the two stage boundaries with the
    lumped survival probabilities (1-q1)^r1 and (1-q2)^r2; early_abort=True
    instead draws each check round separately and restarts as soon as one
    fails, which shortens failed attempts without changing acceptance odds.
    """

    d1: int = 3
    d2: int = 7
    r1: int = 3
    r2: int = 5
    p_phys: float = 1e-3
    q1: float | None = None
    q2: float | None = None
    t_inject: int = 1
    t_escape: int | None = None
    buffer_capacity: int | None = None  # None: match the unit count
    cost_per_unit: int = 1
    early_abort: bool = False
    stagger: bool = False

    def __post_init__(self) -> None:
        if self.d1 < 1 or self.d2 <= self.d1:
            raise ValueError("need d2 > d1 >= 1")
        if self.r1 < 1 or self.r2 < 1:
            raise ValueError("r1 and r2 must be at least 1")
        if self.t_inject < 1:
            raise ValueError("t_inject must be at least 1 cycle")
        if self.t_escape is None:
            object.__setattr__(self, "t_escape", self.d2)
        if self.t_escape < 1:
            raise ValueError("t_escape must be at least 1 cycle")
        if self.q1 is None:
            object.__setattr__(self, "q1", _clamped_round_failure(self.p_phys, self.d1))
        if self.q2 is None:
            object.__setattr__(self, "q2", _clamped_round_failure(self.p_phys, self.d2))
        if not 0.0 <= self.q1 < 1.0 or not 0.0 <= self.q2 < 1.0:
            raise ValueError("q1 and q2 must lie in [0, 1)")
        if self.buffer_capacity is not None and self.buffer_capacity < 1:
            raise ValueError("buffer_capacity must be positive when given")
        if self.cost_per_unit <= 0:
            raise ValueError("cost_per_unit must be positive")

    @property
    def attempt_cycles(self) -> int:
        """Deterministic full-attempt length (16 under defaults)."""
        return self.t_inject + self.r1 + self.t_escape + self.r2

    @property
    def stage1_survival(self) -> float:
        return (1.0 - self.q1) ** self.r1

    @property
    def stage2_survival(self) -> float:
        return (1.0 - self.q2) ** self.r2


@dataclass(frozen=True)
class RzSynthConfig:
    """Repeat-until-success preparation of angle-tagged rotation states.

    F units form a shared pool; demands are served in arrival order and a
    unit sticks with its assignment until the state it holds is consumed.
    """

    d: int = 3
    p_phys: float = 1e-3
    q_round: float | None = None
    t_attempt: int | None = None
    unit_budget_policy: str = "shared-fifo"
    cost_per_unit: int = 1

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("d must be at least 1")
        if self.q_round is None:
            object.__setattr__(self, "q_round", _clamped_round_failure(self.p_phys, self.d))
        if not 0.0 <= self.q_round < 1.0:
            raise ValueError("q_round must lie in [0, 1)")
        if self.t_attempt is None:
            object.__setattr__(self, "t_attempt", self.d)
        if self.t_attempt < 1:
            raise ValueError("t_attempt must be at least 1 cycle")
        if self.unit_budget_policy != "shared-fifo":
            raise ValueError(
                f"unknown unit_budget_policy {self.unit_budget_policy!r}; "
                "only 'shared-fifo' is implemented (dedicated per-angle pools "
                "are expressible by making F at least the distinct-angle count)"
            )
        if self.cost_per_unit <= 0:
            raise ValueError("cost_per_unit must be positive")


MechanismConfig = DistillationConfig | CultivationConfig | RzSynthConfig

_FAMILY_OF = {
    DistillationConfig: "distillation",
    CultivationConfig: "cultivation",
    RzSynthConfig: "rz",
}
_CONFIG_OF = {name: cls for cls, name in _FAMILY_OF.items()}


def mechanism_family(cfg: MechanismConfig) -> str:
    """'distillation', 'cultivation', or 'rz'."""
    try:
        return _FAMILY_OF[type(cfg)]
    except KeyError:
        raise TypeError(f"not a mechanism config: {cfg!r}") from None


def config_to_json(cfg: MechanismConfig) -> dict:
    """Serialize with a 'mechanism' discriminator plus the config fields."""
    data: dict = {"mechanism": _FAMILY_OF[type(cfg)]}
    for f in dataclass_fields(cfg):
        data[f.name] = getattr(cfg, f.name)
    return data


def config_from_json(data: dict) -> MechanismConfig:
    """Inverse of config_to_json; unknown families or fields are errors."""
    if "mechanism" not in data:
        raise ValueError("mechanism config needs a 'mechanism' key")
    family = data["mechanism"]
    if family not in _CONFIG_OF:
        raise ValueError(f"unknown mechanism {family!r}")
    cls = _CONFIG_OF[family]
    known = {f.name for f in dataclass_fields(cls)}
    kwargs = {}
    for key, value in data.items():
        if key == "mechanism":
            continue
        if key not in known:
            raise ValueError(f"unknown field {key!r} for {family} config")
        kwargs[key] = value
    return cls(**kwargs)


def derive_config(family: str, p_phys: float, distance: int) -> MechanismConfig:
    """Build a mechanism config for one sensitivity-grid cell.

    distillation: the abort rate follows p; the grid's distance axis does not
    enter the model (production time and tile cost are protocol constants).
    cultivation: distance sets the stage-2 patch d2 (d1 stays at its default).
    rz: distance sets both the failure rate and the attempt length.
    """
    if family == "distillation":
        return DistillationConfig(p_phys=p_phys)
    if family == "cultivation":
        return CultivationConfig(p_phys=p_phys, d2=distance)
    if family == "rz":
        return RzSynthConfig(p_phys=p_phys, d=distance)
    raise ValueError(f"unknown mechanism {family!r}")


def expected_throughput(cfg: MechanismConfig) -> float:
    """Long-run states per cycle per unit, from the analytic model.

    For cultivation this assumes boundary-resolved failures (the default);
    early_abort shortens failed attempts and does somewhat better.
    """
    if isinstance(cfg, DistillationConfig):
        return (1.0 - cfg.abort_rate) / cfg.t_prod
    if isinstance(cfg, CultivationConfig):
        s1 = cfg.stage1_survival
        s2 = cfg.stage2_survival
        expected_attempt = (cfg.t_inject + cfg.r1) + s1 * (cfg.t_escape + cfg.r2)
        return s1 * s2 / expected_attempt
    if isinstance(cfg, RzSynthConfig):
        return (1.0 - cfg.q_round) / cfg.t_attempt
    raise TypeError(f"not a mechanism config: {cfg!r}")


def expected_cycles_per_state(cfg: MechanismConfig) -> float:
    """1 / expected_throughput; infinite when success is impossible."""
    rate = expected_throughput(cfg)
    return math.inf if rate == 0.0 else 1.0 / rate


def deterministic_state_latency(cfg: MechanismConfig) -> int:
    """Cycles per state when every probabilistic step succeeds."""
    if isinstance(cfg, DistillationConfig):
        return cfg.t_prod
    if isinstance(cfg, CultivationConfig):
        return cfg.attempt_cycles
    if isinstance(cfg, RzSynthConfig):
        return cfg.t_attempt
    raise TypeError(f"not a mechanism config: {cfg!r}")


class Buffer:
    """Counted pool of interchangeable states with conservation checks."""

    __slots__ = ("capacity", "count", "produced_total", "consumed_total")

    def __init__(self, capacity: int | None = None) -> None:
        self.capacity = capacity
        self.count = 0
        self.produced_total = 0
        self.consumed_total = 0

    def deposit(self, n: int = 1) -> None:
        self.count += n
        self.produced_total += n
        if self.capacity is not None and self.count > self.capacity:
            raise RuntimeError("buffer overfilled past its capacity")

    def take(self, n: int) -> int:
        granted = min(n, self.count)
        self.count -= granted
        self.consumed_total += granted
        return granted

    def space(self) -> float:
        return math.inf if self.capacity is None else self.capacity - self.count

    def check(self) -> None:
        if self.count < 0:
            raise RuntimeError("buffer count went negative")
        if self.capacity is not None and self.count > self.capacity:
            raise RuntimeError("buffer count exceeds capacity")
        if self.count != self.produced_total - self.consumed_total:
            raise RuntimeError("buffer accounting drifted from its counters")


class ProductionBank:
    """Base for the three mechanism banks.

    Subclasses implement _advance_until (production events up to a cycle)
    and the availability/request surface. step() may be called with gaps in
    the cycle sequence; events in the gap are replayed in order, so jumping
    is observationally identical to stepping.
    """

    needs_angle = False

    def __init__(
        self,
        f_units: int,
        trial_seed: int,
        deterministic: bool,
        handoff_cycles: int,
        validate: bool,
    ) -> None:
        if f_units < 0:
            raise ValueError("unit count must be non-negative")
        if handoff_cycles < 0:
            raise ValueError("handoff_cycles must be non-negative")
        self.f_units = f_units
        self.deterministic = deterministic
        self.handoff_cycles = handoff_cycles
        self.validate = validate
        self.cycle = 0  # last cycle stepped
        self.attempts = 0
        self.abort_count = 0
        self.max_busy = 0
        self._streams = [
            Stream(mix64(trial_seed, _UNIT_TAG, i)) for i in range(f_units)
        ]
        self._events: list[tuple[int, int]] = []  # (cycle, unit)

    # -- lifecycle ----------------------------------------------------------

    def step(self, cycle: int) -> int:
        """Advance production to `cycle`; returns states resolved this call."""
        if cycle <= self.cycle:
            raise RuntimeError(f"step({cycle}) after cycle {self.cycle}")
        self.cycle = cycle
        return self._advance_until(cycle)

    def finish_cycle(self) -> None:
        """End-of-cycle bookkeeping: handoffs mature, held states drain."""
        self._mature(self.cycle + 1)
        if self.validate:
            self._check()

    def next_event(self, after: int) -> int | None:
        """Next cycle > after at which this bank's state can change."""
        best: int | None = self._events[0][0] if self._events else None
        pending = self._next_pending()
        if pending is not None and (best is None or pending < best):
            best = pending
        if best is not None and best <= after:
            raise RuntimeError("bank event left behind the stepped cycle")
        return best

    # -- mechanism hooks ------------------------------------------------------

    def _advance_until(self, cycle: int) -> int:
        raise NotImplementedError

    def _mature(self, upto: int) -> None:
        raise NotImplementedError

    def _next_pending(self) -> int | None:
        raise NotImplementedError

    def _check(self) -> None:
        pass

    def available(self, angle_key: float | None = None) -> int:
        raise NotImplementedError

    def request(self, n: int, angle_key: float | None, cycle: int) -> int:
        raise NotImplementedError

    def register_demand(self, angle_key: float, cycle: int) -> bool:
        raise RuntimeError("this mechanism has no per-angle demand to register")


class _BufferedBank(ProductionBank):
    """Shared machinery for the buffer-backed banks (distillation, cultivation)."""

    def __init__(self, capacity, f_units, trial_seed, deterministic, handoff, validate):
        super().__init__(f_units, trial_seed, deterministic, handoff, validate)
        self.buffer = Buffer(capacity)
        self._pending: list[int] = []  # heap of maturity cycles, one state each

    @property
    def produced_total(self) -> int:
        return self.buffer.produced_total

    @property
    def consumed_total(self) -> int:
        return self.buffer.consumed_total

    def _emit_state(self, event_cycle: int) -> int:
        """Route a freshly produced state through the handoff."""
        ready = event_cycle + self.handoff_cycles
        if ready <= self.cycle:
            self.buffer.deposit(1)
        else:
            heapq.heappush(self._pending, ready)
        return 1

    def _mature(self, upto: int) -> None:
        while self._pending and self._pending[0] <= upto:
            heapq.heappop(self._pending)
            self.buffer.deposit(1)

    def _next_pending(self) -> int | None:
        return self._pending[0] if self._pending else None

    def _check(self) -> None:
        self.buffer.check()

    def available(self, angle_key: float | None = None) -> int:
        return self.buffer.count

    def request(self, n: int, angle_key: float | None, cycle: int) -> int:
        if n < 1:
            raise ValueError("request at least one state")
        return self.buffer.take(n)


class DistillationBank(_BufferedBank):
    """F distillation units on fixed-length rounds, unbounded shared buffer."""

    def __init__(self, cfg, f_units, trial_seed, deterministic, handoff, validate):
        super().__init__(None, f_units, trial_seed, deterministic, handoff, validate)
        self.cfg = cfg
        for i in range(f_units):
            offset = (i * cfg.t_prod) // f_units if cfg.stagger else 0
            heapq.heappush(self._events, (offset + cfg.t_prod, i))

    def _advance_until(self, cycle: int) -> int:
        produced = 0
        abort_rate = self.cfg.abort_rate
        while self._events and self._events[0][0] <= cycle:
            event_cycle, unit = heapq.heappop(self._events)
            self.attempts += 1
            if self.deterministic or not self._streams[unit].chance(abort_rate):
                produced += self._emit_state(event_cycle)
            else:
                self.abort_count += 1
            heapq.heappush(self._events, (event_cycle + self.cfg.t_prod, unit))
        return produced


# Cultivation unit phases: resolving stage 1 or stage 2 as a lump, or
# sitting on one specific check round when early_abort draws per round.
_CULT_STAGE1 = 0
_CULT_STAGE2 = 1
_CULT_ROUND1 = 2
_CULT_ROUND2 = 3


class CultivationBank(_BufferedBank):
    """Cultivation units restarting on failure, buffer capped at F by default.

    A unit whose state finds the buffer full parks with it (nothing is
    discarded) and restarts only after the state drains into freed space at
    the end of some later cycle.
    """

    def __init__(self, cfg, f_units, trial_seed, deterministic, handoff, validate):
        capacity = cfg.buffer_capacity if cfg.buffer_capacity is not None else f_units
        super().__init__(capacity, f_units, trial_seed, deterministic, handoff, validate)
        self.cfg = cfg
        self._phase = [0] * f_units
        self._round = [0] * f_units
        self._holders: deque[int] = deque()
        length = cfg.attempt_cycles
        for i in range(f_units):
            offset = (i * length) // f_units if cfg.stagger else 0
            self._begin_attempt(i, 1 + offset)

    def _begin_attempt(self, unit: int, start_cycle: int) -> None:
        cfg = self.cfg
        if cfg.early_abort and not self.deterministic:
            self._phase[unit] = _CULT_ROUND1
            self._round[unit] = 0
            heapq.heappush(self._events, (start_cycle + cfg.t_inject, unit))
        else:
            self._phase[unit] = _CULT_STAGE1
            heapq.heappush(self._events, (start_cycle + cfg.t_inject + cfg.r1 - 1, unit))

    def _fail(self, unit: int, event_cycle: int) -> None:
        self.attempts += 1
        self.abort_count += 1
        self._begin_attempt(unit, event_cycle + 1)

    def _succeed(self, unit: int, event_cycle: int) -> int:
        self.attempts += 1
        if self.buffer.space() - len(self._pending) > 0:
            produced = self._emit_state(event_cycle)
            self._begin_attempt(unit, event_cycle + 1)
            return produced
        self._holders.append(unit)
        return 0

    def _advance_until(self, cycle: int) -> int:
        cfg = self.cfg
        produced = 0
        while self._events and self._events[0][0] <= cycle:
            event_cycle, unit = heapq.heappop(self._events)
            phase = self._phase[unit]
            if phase == _CULT_STAGE1:
                survived = self.deterministic or not self._streams[unit].chance(
                    1.0 - cfg.stage1_survival
                )
                if survived:
                    self._phase[unit] = _CULT_STAGE2
                    heapq.heappush(
                        self._events, (event_cycle + cfg.t_escape + cfg.r2, unit)
                    )
                else:
                    self._fail(unit, event_cycle)
            elif phase == _CULT_STAGE2:
                survived = self.deterministic or not self._streams[unit].chance(
                    1.0 - cfg.stage2_survival
                )
                if survived:
                    produced += self._succeed(unit, event_cycle)
                else:
                    self._fail(unit, event_cycle)
            elif phase == _CULT_ROUND1:
                if self._streams[unit].chance(cfg.q1):
                    self._fail(unit, event_cycle)
                else:
                    self._round[unit] += 1
                    if self._round[unit] < cfg.r1:
                        heapq.heappush(self._events, (event_cycle + 1, unit))
                    else:
                        self._phase[unit] = _CULT_ROUND2
                        self._round[unit] = 0
                        heapq.heappush(
                            self._events, (event_cycle + cfg.t_escape + 1, unit)
                        )
            else:  # _CULT_ROUND2
                if self._streams[unit].chance(cfg.q2):
                    self._fail(unit, event_cycle)
                else:
                    self._round[unit] += 1
                    if self._round[unit] < cfg.r2:
                        heapq.heappush(self._events, (event_cycle + 1, unit))
                    else:
                        produced += self._succeed(unit, event_cycle)
        return produced

    def finish_cycle(self) -> None:
        self._mature(self.cycle + 1)
        # Freed capacity drains parked units in completion order; their
        # states enter the buffer now and are consumable next cycle.
        while self._holders and self.buffer.space() - len(self._pending) > 0:
            unit = self._holders.popleft()
            heapq.heappush(self._pending, self.cycle + self.handoff_cycles)
            self._mature(self.cycle + 1)
            self._begin_attempt(unit, self.cycle + 1)
        if self.validate:
            self._check()


# Rz unit states.
_RZ_IDLE = 0
_RZ_PRODUCING = 1
_RZ_HOLDING = 2


class RzSynthBank(ProductionBank):
    """Demand-driven pool of Rz preparation units, one held state per unit.

    register_demand assigns a free unit (or queues the demand FIFO), request
    grants held states matching the angle, and a consumed unit is immediately
    rewound onto the oldest queued demand or parked idle. One register call
    per consumer keeps assignments and demands in one-to-one correspondence.
    """

    needs_angle = True

    def __init__(self, cfg, f_units, trial_seed, deterministic, handoff, validate):
        super().__init__(f_units, trial_seed, deterministic, handoff, validate)
        self.cfg = cfg
        self.produced_total = 0
        self.consumed_total = 0
        self._state = [_RZ_IDLE] * f_units
        self._angle = [0.0] * f_units
        self._free: list[int] = list(range(f_units))
        self._queue: deque[float] = deque()
        self._grantable: dict[float, deque[int]] = {}
        self._pending: list[tuple[int, int]] = []  # heap of (ready, unit)
        self.registered: dict[float, int] = {}
        self.granted: dict[float, int] = {}
        self.busy = 0

    def register_demand(self, angle_key: float, cycle: int) -> bool:
        self.registered[angle_key] = self.registered.get(angle_key, 0) + 1
        if not self._free:
            self._queue.append(angle_key)
            return False
        self._assign(heapq.heappop(self._free), angle_key, cycle)
        return True

    def _assign(self, unit: int, angle_key: float, cycle: int) -> None:
        """Point a unit at an angle; its attempt runs cycle+1 .. cycle+t_attempt."""
        self._state[unit] = _RZ_PRODUCING
        self._angle[unit] = angle_key
        heapq.heappush(self._events, (cycle + self.cfg.t_attempt, unit))
        self.busy += 1
        if self.busy > self.max_busy:
            self.max_busy = self.busy

    def _advance_until(self, cycle: int) -> int:
        produced = 0
        q = self.cfg.q_round
        while self._events and self._events[0][0] <= cycle:
            event_cycle, unit = heapq.heappop(self._events)
            self.attempts += 1
            if self.deterministic or not self._streams[unit].chance(q):
                self.produced_total += 1
                produced += 1
                self._state[unit] = _RZ_HOLDING
                ready = event_cycle + self.handoff_cycles
                if ready <= cycle:
                    self._grantable.setdefault(self._angle[unit], deque()).append(unit)
                else:
                    heapq.heappush(self._pending, (ready, unit))
            else:
                self.abort_count += 1
                heapq.heappush(self._events, (event_cycle + self.cfg.t_attempt, unit))
        return produced

    def _mature(self, upto: int) -> None:
        while self._pending and self._pending[0][0] <= upto:
            _, unit = heapq.heappop(self._pending)
            self._grantable.setdefault(self._angle[unit], deque()).append(unit)

    def _next_pending(self) -> int | None:
        return self._pending[0][0] if self._pending else None

    def available(self, angle_key: float | None = None) -> int:
        if angle_key is None:
            raise ValueError("Rz availability is per angle")
        holders = self._grantable.get(angle_key)
        return len(holders) if holders else 0

    def request(self, n: int, angle_key: float | None, cycle: int) -> int:
        if angle_key is None:
            raise ValueError("Rz requests must name an angle")
        holders = self._grantable.get(angle_key)
        granted = 0
        while granted < n and holders:
            unit = holders.popleft()
            granted += 1
            self.consumed_total += 1
            self.granted[angle_key] = self.granted.get(angle_key, 0) + 1
            if self._queue:
                self.busy -= 1  # rebalanced by _assign
                self._assign(unit, self._queue.popleft(), cycle)
            else:
                self._state[unit] = _RZ_IDLE
                heapq.heappush(self._free, unit)
                self.busy -= 1
        return granted

    def _check(self) -> None:
        if self._queue and self._free:
            raise RuntimeError("queued Rz demand while a unit sits free")
        held = sum(len(d) for d in self._grantable.values()) + len(self._pending)
        if self.produced_total - self.consumed_total != held:
            raise RuntimeError("Rz held-state accounting drifted")
        for key, count in self.registered.items():
            supply = len(self._grantable.get(key, ()))
            supply += sum(1 for _, u in self._pending if self._angle[u] == key)
            supply += sum(
                1
                for u in range(self.f_units)
                if self._state[u] == _RZ_PRODUCING and self._angle[u] == key
            )
            if supply > count - self.granted.get(key, 0):
                raise RuntimeError(f"oversupply of angle {key}")


def make_bank(
    cfg: MechanismConfig,
    f_units: int,
    trial_seed: int,
    deterministic: bool = False,
    handoff_cycles: int = 1,
    validate: bool = False,
) -> ProductionBank:
    """Cold-started bank of f_units for the given mechanism."""
    if isinstance(cfg, DistillationConfig):
        cls = DistillationBank
    elif isinstance(cfg, CultivationConfig):
        cls = CultivationBank
    elif isinstance(cfg, RzSynthConfig):
        cls = RzSynthBank
    else:
        raise TypeError(f"not a mechanism config: {cfg!r}")
    return cls(cfg, f_units, trial_seed, deterministic, handoff_cycles, validate)
