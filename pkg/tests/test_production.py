"""Production mechanisms: configs, derived rates and bank timing."""

from __future__ import annotations

import pytest

from magicsim import (
    Buffer,
    CultivationConfig,
    DistillationConfig,
    RzSynthConfig,
    abort_rate_15to1,
    config_from_json,
    config_to_json,
    derive_config,
    deterministic_state_latency,
    expected_cycles_per_state,
    expected_throughput,
    make_bank,
    mechanism_family,
)


# --- derived rates ---------------------------------------------------------


def test_abort_rate_formula() -> None:
    p = 1e-4
    assert abort_rate_15to1(p) == pytest.approx(15 * p + 105 * p * p)
    assert abort_rate_15to1(0.0) == 0.0


def test_abort_rate_domain() -> None:
    with pytest.raises(ValueError):
        abort_rate_15to1(-1e-5)
    with pytest.raises(ValueError):
        abort_rate_15to1(0.02)


def test_derive_config_families() -> None:
    dc = derive_config("distillation", 1e-4, 7)
    assert isinstance(dc, DistillationConfig)
    assert dc.t_prod == 18
    assert dc.abort_rate == pytest.approx(0.00150105)

    cc = derive_config("cultivation", 1e-3, 7)
    assert isinstance(cc, CultivationConfig)
    assert cc.q1 == pytest.approx(10 * 1e-3 * cc.d1**2)
    assert cc.q2 == pytest.approx(10 * 1e-3 * 7**2)
    assert cc.t_escape == 7

    rc = derive_config("rz", 1e-3, 3)
    assert isinstance(rc, RzSynthConfig)
    assert rc.q_round == pytest.approx(0.09)
    assert rc.t_attempt == 3


def test_derive_config_clamps_probabilities() -> None:
    cc = derive_config("cultivation", 0.5, 7)
    assert cc.q1 == 0.99
    assert cc.q2 == 0.99
    assert derive_config("rz", 0.9, 3).q_round == 0.99


def test_derive_config_unknown_family() -> None:
    with pytest.raises(ValueError):
        derive_config("teleportation", 1e-3, 7)


def test_mechanism_family_dispatch() -> None:
    assert mechanism_family(DistillationConfig()) == "distillation"
    assert mechanism_family(CultivationConfig()) == "cultivation"
    assert mechanism_family(RzSynthConfig()) == "rz"
    with pytest.raises(TypeError):
        mechanism_family({"mechanism": "distillation"})


def test_expected_throughput_and_latency() -> None:
    dc = DistillationConfig()
    assert expected_throughput(dc) == pytest.approx((1 - dc.abort_rate) / 18)
    assert deterministic_state_latency(dc) == 18

    rc = RzSynthConfig(q_round=0.09)
    assert expected_throughput(rc) == pytest.approx((1 - 0.09) / 3)
    assert deterministic_state_latency(rc) == 3

    cc = CultivationConfig(q1=0.0, q2=0.0)
    assert deterministic_state_latency(cc) == 16
    # with no failures a unit emits one state per full pass
    assert expected_throughput(cc) == pytest.approx(1 / 16)


def test_expected_cycles_per_state_is_inverse_throughput() -> None:
    for cfg in (DistillationConfig(), CultivationConfig(), RzSynthConfig(q_round=0.5)):
        assert expected_cycles_per_state(cfg) == pytest.approx(
            1.0 / expected_throughput(cfg)
        )


# --- config serialization --------------------------------------------------


def test_config_json_round_trip() -> None:
    for cfg in (
        DistillationConfig(p_phys=2e-4, t_prod=20),
        CultivationConfig(q1=0.1, q2=0.2, buffer_capacity=3),
        RzSynthConfig(q_round=0.25),
    ):
        blob = config_to_json(cfg)
        assert blob["mechanism"] == mechanism_family(cfg)
        assert config_from_json(blob) == cfg


def test_config_from_json_rejects_unknown_and_missing_fields() -> None:
    with pytest.raises(ValueError, match="unknown field 'bogus'"):
        config_from_json({"mechanism": "distillation", "bogus": 1})
    with pytest.raises(ValueError, match="'mechanism' key"):
        config_from_json({"t_prod": 18})
    with pytest.raises(ValueError):
        config_from_json({"mechanism": "warp-drive"})


def test_config_validation() -> None:
    with pytest.raises(ValueError):
        DistillationConfig(t_prod=0)
    with pytest.raises(ValueError):
        DistillationConfig(abort_rate=1.5)
    with pytest.raises(ValueError):
        CultivationConfig(q1=-0.1)
    with pytest.raises(ValueError):
        RzSynthConfig(q_round=1.0)
    with pytest.raises(ValueError):
        RzSynthConfig(t_attempt=0)


# --- buffer ----------------------------------------------------------------


def test_buffer_grants_at_most_what_it_holds() -> None:
    b = Buffer()
    assert b.take(3) == 0
    b.deposit(2)
    assert b.take(3) == 2
    assert b.count == 0
    assert b.produced_total == 2
    assert b.consumed_total == 2
    b.check()


def test_buffer_capacity_is_enforced() -> None:
    b = Buffer(capacity=2)
    b.deposit(2)
    assert b.space() == 0
    with pytest.raises(RuntimeError, match="capacity"):
        b.deposit(1)


# --- distillation bank -----------------------------------------------------


def _drive(bank, upto: int) -> dict[int, int]:
    """Step the bank through cycles 1..upto, recording availability."""
    seen = {}
    for c in range(1, upto + 1):
        bank.step(c)
        bank.finish_cycle()
        seen[c] = bank.available()
    return seen


def test_distillation_staggered_start_spreads_completions() -> None:
    bank = make_bank(DistillationConfig(), 4, trial_seed=1, deterministic=True)
    seen = _drive(bank, 36)
    firsts = {}
    for c, n in seen.items():
        firsts.setdefault(n, c)
    # offsets floor(i*18/4) give completions at 18, 22, 27, 31, then the
    # first factory turns around at 36
    assert firsts[1] == 18
    assert firsts[2] == 22
    assert firsts[3] == 27
    assert firsts[4] == 31
    assert firsts[5] == 36
    assert bank.abort_count == 0


def test_distillation_unstaggered_completes_in_lockstep() -> None:
    bank = make_bank(DistillationConfig(stagger=False), 3, trial_seed=1, deterministic=True)
    seen = _drive(bank, 18)
    assert seen[17] == 0
    assert seen[18] == 3


def test_distillation_deterministic_mode_ignores_seed() -> None:
    runs = []
    for seed in (1, 2, 99):
        bank = make_bank(DistillationConfig(), 3, trial_seed=seed, deterministic=True)
        runs.append(tuple(_drive(bank, 60).items()))
    assert runs[0] == runs[1] == runs[2]


def test_distillation_aborts_consume_attempts_without_output() -> None:
    cfg = DistillationConfig(abort_rate=0.99)
    bank = make_bank(cfg, 2, trial_seed=7)
    _drive(bank, 2000)
    assert bank.attempts > 100
    assert bank.abort_count > 0.8 * bank.attempts
    assert bank.produced_total == bank.attempts - bank.abort_count


def test_bank_request_clamps_to_availability() -> None:
    bank = make_bank(DistillationConfig(stagger=False), 3, trial_seed=1, deterministic=True)
    _drive(bank, 18)
    assert bank.request(5, None, 19) == 3
    assert bank.request(5, None, 19) == 0


def test_bank_next_event_is_strictly_later() -> None:
    bank = make_bank(DistillationConfig(), 2, trial_seed=1, deterministic=True)
    bank.step(1)
    bank.finish_cycle()
    nxt = bank.next_event(1)
    assert nxt is not None and nxt > 1
    assert nxt == 18


def test_bank_step_rejects_replays() -> None:
    bank = make_bank(DistillationConfig(), 1, trial_seed=1, deterministic=True)
    bank.step(5)
    bank.finish_cycle()
    with pytest.raises(RuntimeError):
        bank.step(5)


def test_bank_step_jumping_matches_stepping() -> None:
    a = make_bank(DistillationConfig(), 3, trial_seed=11, deterministic=False)
    b = make_bank(DistillationConfig(), 3, trial_seed=11, deterministic=False)
    for c in range(1, 101):
        a.step(c)
        a.finish_cycle()
    for c in (40, 77, 100):
        b.step(c)
        b.finish_cycle()
    assert a.available() == b.available()
    assert a.attempts == b.attempts
    assert a.abort_count == b.abort_count


# --- cultivation bank ------------------------------------------------------


def test_cultivation_deterministic_latency() -> None:
    bank = make_bank(CultivationConfig(q1=0.0, q2=0.0), 1, trial_seed=5, deterministic=True)
    seen = _drive(bank, deterministic_state_latency(CultivationConfig()))
    assert seen[15] == 0
    assert seen[16] == 1


def test_cultivation_failures_delay_output() -> None:
    fast = make_bank(CultivationConfig(q1=0.0, q2=0.0), 4, trial_seed=3)
    slow = make_bank(CultivationConfig(q1=0.5, q2=0.5), 4, trial_seed=3)
    fast_total = _drive(fast, 400)[400] + fast.consumed_total
    slow_total = _drive(slow, 400)[400] + slow.consumed_total
    assert slow_total < fast_total
    assert slow.abort_count > 0


def test_cultivation_buffer_capacity_blocks_completion() -> None:
    cfg = CultivationConfig(q1=0.0, q2=0.0, buffer_capacity=1)
    bank = make_bank(cfg, 4, trial_seed=1, deterministic=True)
    seen = _drive(bank, 200)
    assert max(seen.values()) <= 1
    # draining the buffer lets a parked unit hand over its state
    assert bank.request(1, None, 201) == 1
    bank.step(201)
    bank.finish_cycle()
    assert bank.available() == 1


def test_cultivation_early_abort_still_conserves() -> None:
    cfg = CultivationConfig(q1=0.3, q2=0.3, early_abort=True)
    bank = make_bank(cfg, 3, trial_seed=9, validate=True)
    seen = _drive(bank, 500)
    assert bank.produced_total == seen[500] + bank.consumed_total
    # every started attempt either aborted, produced, or is still in flight
    in_flight = bank.attempts - bank.abort_count - bank.produced_total
    assert 0 <= in_flight <= 3


# --- rz synthesis bank -----------------------------------------------------


def test_rz_bank_serves_registered_demand_per_angle() -> None:
    bank = make_bank(RzSynthConfig(q_round=0.0), 2, trial_seed=3)
    bank.register_demand(0.7, 1)
    for c in range(1, 5):
        bank.step(c)
        bank.finish_cycle()
    # registered during cycle 1, the attempt runs cycles 2..4, so the state
    # becomes grantable in cycle 5
    assert bank.available(0.7) == 1
    assert bank.available(1.1) == 0
    assert bank.request(1, 0.7, 5) == 1


def test_rz_bank_tracks_peak_concurrency() -> None:
    bank = make_bank(RzSynthConfig(q_round=0.0), 8, trial_seed=3)
    for i in range(5):
        bank.register_demand(0.1 * (i + 1), 1)
    for c in range(1, 6):
        bank.step(c)
        bank.finish_cycle()
    assert bank.max_busy == 5


def test_rz_bank_concurrency_is_capped_by_unit_count() -> None:
    # six angles contend for two units; units hold their state until it is
    # consumed, so draining as we go lets the queue advance
    bank = make_bank(RzSynthConfig(q_round=0.0), 2, trial_seed=3)
    keys = [0.1 * (i + 1) for i in range(6)]
    for k in keys:
        bank.register_demand(k, 1)
    served = 0
    for c in range(1, 40):
        bank.step(c)
        bank.finish_cycle()
        assert bank.max_busy <= 2
        for k in keys:
            served += bank.request(bank.available(k), k, c)
    assert served == 6
    assert bank.produced_total == 6


def test_rz_bank_retries_failed_rounds() -> None:
    ok = make_bank(RzSynthConfig(q_round=0.0), 1, trial_seed=10)
    flaky = make_bank(RzSynthConfig(q_round=0.9), 1, trial_seed=10)
    for b in (ok, flaky):
        b.register_demand(0.7, 1)
    done_ok = done_flaky = None
    for c in range(1, 400):
        ok.step(c)
        ok.finish_cycle()
        flaky.step(c)
        flaky.finish_cycle()
        if done_ok is None and ok.available(0.7):
            done_ok = c
        if done_flaky is None and flaky.available(0.7):
            done_flaky = c
    assert done_ok is not None and done_flaky is not None
    assert done_flaky > done_ok
    assert flaky.abort_count > 0


def test_make_bank_rejects_unknown_config() -> None:
    with pytest.raises(TypeError):
        make_bank(object(), 1, trial_seed=0)
