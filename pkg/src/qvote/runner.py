"""Scenario execution: exact reports, Monte-Carlo reports and event scans."""
from __future__ import annotations

from .attacks import max_detection
from .errors import InvalidArgument
from .protocol import ballot_test, encode_event, monte_carlo_round, tally_pvm
from .qstate import Ensemble, apply_channel
from .scenario import AttackSpec, ScenarioConfig


def party_label(party) -> str:
    return f"{party[0]}-{party[1]}" if isinstance(party, tuple) else str(party)


def run_scenario(config: ScenarioConfig) -> dict:
    """Exact probabilities for one scenario, plus sampled counts in Monte-Carlo mode.

    The attack is built for the announced tally and applied to the
    post-tally ballots.
    """
    event = config.event
    s = event.s_expected
    attack = config.attack.build(event.n, s)
    if attack.s is not None and attack.s != s:
        raise InvalidArgument(f"attack is built for s={attack.s}, event announces s={s}")
    outcomes = tally_pvm(encode_event(event))
    announced = max(outcomes, key=lambda o: o.probability)
    returned = apply_channel(Ensemble.pure(announced.post_state), attack.channel)
    test = ballot_test(event, returned)
    report = {
        "config": config.to_dict(),
        "k": event.k, "l": event.l, "s_expected": s,
        "tally": [{"s": o.s, "probability": o.probability} for o in outcomes],
        "pass_probability": test.pass_probability,
        "detection_probability": max(0.0, 1.0 - test.pass_probability),
        "per_party": [{"party": party_label(p), "failure_probability": f}
                      for p, f in test.per_party],
    }
    if config.shots:
        seed = config.seed or 0
        counts = monte_carlo_round(event, config.shots, seed, attack.channel)
        shots = config.shots
        report["monte_carlo"] = {
            "shots": shots, "seed": seed,
            "tally_frequencies": [{"s": k, "frequency": v / shots}
                                  for k, v in counts["tally"].items()],
            "failure_frequency": counts["failures"] / shots,
            "per_party": [{"party": party_label(p), "failure_frequency": c / shots}
                          for p, c in zip(event.parties, counts["party_failures"])],
        }
    return report


def scan(attack: AttackSpec, n: int, s: int) -> dict:
    """Detection probability of every event with ``n`` voters announcing ``s``."""
    result = max_detection(attack.build(n, s), n, s)
    rows = [{"index": a, "event": str(e), "k": e.k, "l": e.l, "detection_probability": p}
            for a, (e, p) in enumerate(result.per_event, start=1)]
    best = next(r for r, (e, _) in zip(rows, result.per_event) if e is result.max_event)
    return {"config": {"attack": attack.describe(), "n": n, "s": s},
            "rows": rows, "max_event": best["event"], "max_index": best["index"],
            "max_probability": result.max_probability}
