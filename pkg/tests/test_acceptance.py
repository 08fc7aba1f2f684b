"""Acceptance gate: the twelve criteria at their full pinned budgets.

One test per criterion, in order; each prints a PASS/FAIL line plus the
metric table behind it (visible with ``pytest -s`` or on failure) and
asserts the criterion outcome.  All runs derive from one pinned master
seed, so every number here is reproducible byte-for-byte.
"""

import math

from phaserec.experiments import acceptance as acc

MASTER_SEED = 2026


def _report(result):
    status = "PASS" if result.passed else "FAIL"
    print(f"\n{status}  criterion {result.number:2d}: {result.name}  ({result.runtime:.1f}s)")
    for metric, value, threshold, st in result.details:
        bound = "" if math.isnan(threshold) else f"  vs {threshold:.6g}"
        print(f"      [{st:>4}] {metric} = {value:.6g}{bound}")
    for note in result.notes:
        print(f"      note: {note}")
    assert result.passed, (
        f"criterion {result.number} ({result.name}) failed; metrics: {result.details}"
    )
    return result


def test_criterion_01_exact_transform_identities():
    _report(acc.criterion_1(MASTER_SEED))


def test_criterion_02_modular_invariance_by_enumeration():
    _report(acc.criterion_2(MASTER_SEED))


def test_criterion_03_conditional_law_vs_bayes():
    _report(acc.criterion_3(MASTER_SEED))


def test_criterion_04_sampler_correctness():
    _report(acc.criterion_4(MASTER_SEED))


def test_criterion_05_information_variance_asymptotics():
    _report(acc.criterion_5(MASTER_SEED))


def test_criterion_06_localized_regime_bounded_variance():
    _report(acc.criterion_6(MASTER_SEED))


def test_criterion_07_delocalized_regime_log_growth():
    _report(acc.criterion_7(MASTER_SEED))


def test_criterion_08_disagreement_cluster_tail():
    _report(acc.criterion_8(MASTER_SEED))


def test_criterion_09_free_boundary_dichotomy():
    _report(acc.criterion_9(MASTER_SEED))


def test_criterion_10_random_phase_tilt_variance():
    _report(acc.criterion_10(MASTER_SEED))


def test_criterion_11_level_lines():
    _report(acc.criterion_11(MASTER_SEED))


def test_criterion_12_byte_determinism(tmp_path):
    """The deliverable check itself: ``verify --quick`` run twice at worker
    counts 1 and 8 must produce byte-identical CSV tables."""
    from phaserec.cli import main

    blobs = {}
    for threads in (1, 8):
        for attempt in (0, 1):
            out = tmp_path / f"verify-t{threads}-{attempt}"
            code = main(
                [
                    "verify",
                    "--quick",
                    "--seed",
                    str(MASTER_SEED),
                    "--threads",
                    str(threads),
                    "--out",
                    str(out),
                ]
            )
            assert code == 0
            blobs[(threads, attempt)] = (
                (out / "verify.csv").read_bytes()
                + (out / "verify_details.csv").read_bytes()
            )
    reference = blobs[(1, 0)]
    assert blobs[(1, 1)] == reference, "re-run at 1 worker changed bytes"
    assert blobs[(8, 0)] == reference, "8 workers changed bytes"
    assert blobs[(8, 1)] == reference, "re-run at 8 workers changed bytes"
    _report(acc.criterion_12(MASTER_SEED))
