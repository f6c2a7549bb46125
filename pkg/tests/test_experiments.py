from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Optional

import pytest

from app.cli import main
from app.errors import BoundaryZeroSuspected, DegreeTooSmall
from app.experiments import gap, runner
from app.experiments.gap import (
    counting_region,
    run_gap_experiment,
    same_zeros,
    subtract_zeros,
    summarize,
    trend_holds,
)
from app.experiments.hs_decay import decay_tau, run_hs_decay
from app.experiments.jensen import jensen_audit
from app.experiments.runner import (
    binomial_error,
    config_hash,
    log_slope,
    output_dir,
    run_tasks,
    write_csv,
    write_dat,
)
from app.experiments.scaling import run_partition_scaling, three_case_bound
from app.models import (
    AuditRow,
    Disk,
    GapExperimentConfig,
    GapTrialRow,
    HsDecayConfig,
    ScalingConfig,
    SchottkyData,
    ZeroRecord,
    ZeroReport,
)
from app.permutations.permrep import derive_seed, sample_rep
from app.spectral.contour import ContourResult
from app.spectral.representations import StdZeroRep, TrivialRep

from conftest import TEST_DEGREE


def _square(task: tuple) -> int:
    return task[0] ** 2


def test_config_hash_ignores_worker_count() -> None:
    a = GapExperimentConfig(degrees=[2, 4], trials=3, jobs=1)
    b = GapExperimentConfig(degrees=[2, 4], trials=3, jobs=8)
    c = GapExperimentConfig(degrees=[2, 4], trials=4, jobs=1)
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash(c)


def test_run_tasks_keeps_task_order() -> None:
    assert run_tasks(_square, [(3,), (1,), (2,)], jobs=1) == [9, 1, 4]


def test_binomial_error_and_slope() -> None:
    assert binomial_error(0.5, 100) == pytest.approx(0.05)
    assert binomial_error(0.3, 0) == 0.0
    assert log_slope([1, 2, 4, 8], [1, 4, 16, 64]) == pytest.approx(2.0)


def test_writers(tmp_path: Path) -> None:
    csv_path = write_csv(tmp_path / "rows.csv", [{"n": 2, "x": 0.5, "extra": "ignored"}], ["n", "x"])
    assert csv_path.read_text().splitlines() == ["n,x", "2,0.5"]
    dat_path = write_dat(tmp_path / "rows.dat", ["n", "x"], [(2, 0.25), (4, 0.125)])
    assert dat_path.read_text().splitlines() == ["# n x", "2 0.25", "4 0.125"]


def test_output_dir_defaults_under_root(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(runner, "OUTPUT_ROOT", str(tmp_path / "runs"))
    path = output_dir(None, "gap-experiment")
    assert path.is_dir()
    assert path.parent == tmp_path / "runs"
    assert path.name.startswith("gap-experiment-")
    assert output_dir(str(tmp_path / "given"), "ignored") == tmp_path / "given"


def test_zero_multisets() -> None:
    full = [ZeroRecord(re=0.5, im=0.0, multiplicity=2), ZeroRecord(re=0.3, im=0.2)]
    base = [ZeroRecord(re=0.5, im=0.0)]
    difference = subtract_zeros(full, base)
    assert sorted((z.re, z.im) for z in difference) == [(0.3, 0.2), (0.5, 0.0)]
    assert same_zeros(difference, [ZeroRecord(re=0.3, im=0.2), ZeroRecord(re=0.5 + 1e-7, im=0.0)])
    assert not same_zeros(difference, [ZeroRecord(re=0.3, im=0.2)])


def test_summaries_and_trend() -> None:
    rows = [
        GapTrialRow(n=2, trial=0, seed=1, transitive=True, new_zero_count=1),
        GapTrialRow(n=2, trial=1, seed=2, transitive=True, new_zero_count=0),
        GapTrialRow(n=4, trial=0, seed=3, transitive=True, new_zero_count=0),
        GapTrialRow(n=4, trial=1, seed=4, error="BoundaryZeroSuspected: close"),
    ]
    two, four = summarize(rows, [2, 4])
    assert (two.completed, two.fraction_with_new_zeros) == (2, 0.5)
    assert two.binomial_error == pytest.approx(math.sqrt(0.25 / 2))
    assert (four.trials, four.completed, four.fraction_with_new_zeros) == (2, 1, 0.0)
    assert trend_holds([two, four])
    assert not trend_holds([four.model_copy(update={"binomial_error": 0.0}),
                            two.model_copy(update={"fraction_with_new_zeros": 1.0, "binomial_error": 0.0})])


def test_counting_region_contains_delta(delta: float) -> None:
    config = GapExperimentConfig(sigma0_fraction=0.8, height=2.0)
    region = counting_region(delta, config)
    assert region.re_min == pytest.approx(0.8 * delta)
    assert region.re_min < delta < region.re_max
    assert (region.im_min, region.im_max) == (-2.0, 2.0)


def test_three_case_bound() -> None:
    assert three_case_bound(0.25, 4.0, 0.5, 0.0, 3) == pytest.approx(4 * 2 + 3 + 4 / 4)


def test_identity_covers_add_no_new_zeros(group: SchottkyData, delta: float) -> None:
    config = GapExperimentConfig(degrees=[2], trials=2, taylor_degree=8, contour_nodes=64,
                                 audit_trials=0, identity_debug=True, jobs=1)
    first = run_gap_experiment(config, group, delta)
    base_count = sum(z.multiplicity for z in first.base_zeros)
    assert base_count >= 1
    assert [row.new_zero_count for row in first.rows] == [base_count, base_count]
    assert all(row.error is None for row in first.rows)

    second = run_gap_experiment(config, group, delta)
    assert ([r.model_dump(exclude={"wall_ms"}) for r in first.rows]
            == [r.model_dump(exclude={"wall_ms"}) for r in second.rows])
    assert first.config_hash == second.config_hash


@pytest.mark.slow
def test_gap_audit_matches_factorization(group: SchottkyData, delta: float) -> None:
    config = GapExperimentConfig(degrees=[2], trials=1, taylor_degree=8, contour_nodes=64,
                                 audit_trials=1, jobs=1)
    record = run_gap_experiment(config, group, delta)
    assert [audit.matched for audit in record.audits] == [True]


def test_hs_decay_rows(group: SchottkyData, delta: float) -> None:
    config = HsDecayConfig(degrees=[1, 2], trials=2, taylor_degree=8, jobs=1)
    record = run_hs_decay(config, group, delta)
    ones = [r for r in record.rows if r.n == 1]
    twos = [r for r in record.rows if r.n == 2]
    assert ones and all(r.mean_hs2 == 0.0 and r.words == 0 for r in ones)
    assert twos and all(r.mean_hs2 > 0 and r.words > 0 for r in twos)
    assert twos[0].tau == pytest.approx(decay_tau(2, delta))
    assert record.fits == []


def test_partition_scaling(group: SchottkyData, delta: float) -> None:
    record = run_partition_scaling(ScalingConfig(taus=[0.1, 0.05]), group, delta)
    assert [r.tau for r in record.rows] == [0.1, 0.05]
    small, large = record.rows
    assert large.zbar_size > small.zbar_size
    assert math.isfinite(record.zbar_exponent)
    assert all(h.count > 0 for h in record.histogram)


def test_jensen_audit_around_delta(group: SchottkyData, delta: float) -> None:
    disk = Disk(center_re=delta + 0.05, radius=0.1)
    audit = jensen_audit(TrivialRep(), group, disk=disk, degree=TEST_DEGREE, delta=delta)
    assert audit.residual < 1e-6
    assert len(audit.zeros) == 1
    assert audit.zeros[0].re == pytest.approx(delta, abs=1e-8)


class _Linear:
    """s - root, shaped like ZetaFunction."""

    def __init__(self, root: complex):
        self.root = root

    def value(self, s: complex) -> complex:
        return s - self.root

    def value_and_log_derivative(self, s: complex) -> tuple[complex, complex]:
        return s - self.root, 1 / (s - self.root)


def test_jensen_audit_refuses_a_zero_on_its_circle(monkeypatch: pytest.MonkeyPatch,
                                                  group: SchottkyData) -> None:
    monkeypatch.setattr("app.experiments.jensen.ZetaFunction",
                        lambda *args, **kwargs: _Linear(1.0 + 1e-13))
    with pytest.raises(BoundaryZeroSuspected):
        jensen_audit(TrivialRep(), group, disk=Disk(center_re=0.0, radius=1.0))


def test_audit_tasks_carry_strict_mode(monkeypatch: pytest.MonkeyPatch, group: SchottkyData,
                                       delta: float) -> None:
    calls: list[tuple] = []

    def record_tasks(fn, tasks, jobs):
        calls.append((fn, tasks))
        return []

    monkeypatch.setattr(gap, "run_tasks", record_tasks)
    monkeypatch.setattr(gap, "locate_zeros",
                        lambda zeta, region, **kwargs: ZeroReport(region=region, winding=0))
    config = GapExperimentConfig(degrees=[2], trials=1, taylor_degree=8, contour_nodes=64,
                                 audit_trials=1, strict=True, jobs=1)
    gap.run_gap_experiment(config, group, delta)
    audit_tasks = next(tasks for fn, tasks in calls if fn is gap._audit_trial)
    assert [task[-1] for task in audit_tasks] == [True]


def test_audit_trial_builds_strict_zeta_functions(monkeypatch: pytest.MonkeyPatch,
                                                  group: SchottkyData, delta: float) -> None:
    seen: list[Optional[bool]] = []

    def strict_zeta(kind, g, rep, degree=None, strict=None):
        seen.append(strict)
        raise DegreeTooSmall("trailing coefficient mass above the limit")

    monkeypatch.setattr(gap, "ZetaFunction", strict_zeta)
    region = counting_region(delta, GapExperimentConfig())
    task = (group.model_dump(), 8, 64, region.model_dump(), 2, 0, 5, False, [], True)
    row = AuditRow(**gap._audit_trial(task))
    assert seen == [True]
    assert row.matched is False


def test_gap_trial_ignores_zeros_in_the_dilation_margin(monkeypatch: pytest.MonkeyPatch,
                                                       group: SchottkyData, delta: float) -> None:
    region = counting_region(delta, GapExperimentConfig())
    wider = region.dilated(1.01)
    inside = ZeroRecord(re=region.center.real, im=0.5)
    margin = ZeroRecord(re=region.re_max + 0.0005, im=0.0)
    monkeypatch.setattr(gap, "contour_count",
                        lambda zeta, rect, nodes: ContourResult(2, 2 + 0j, nodes, 1.0, wider))
    monkeypatch.setattr(gap, "locate_zeros",
                        lambda zeta, rect, **kwargs: ZeroReport(region=wider, winding=2,
                                                                zeros=[inside, margin]))
    task = (group.model_dump(), 8, 64, region.model_dump(), 2, 0, 5, False,
            0.8 * delta, delta, False)
    row = GapTrialRow(**gap._gap_trial(task))
    assert row.error is None
    assert row.new_zero_count == 1


@pytest.mark.slow
def test_trial_seeds_do_not_depend_on_the_worker_count(tmp_path: Path) -> None:
    argv = ["gap-experiment", "--degrees", "2", "--trials", "2", "-M", "8", "--nodes", "64",
            "--audit-trials", "0", "--seed", "3"]
    for jobs in ("1", "2"):
        assert main(argv + ["--jobs", jobs, "--out", str(tmp_path / jobs)]) == 0
    one, two = tmp_path / "1", tmp_path / "2"
    assert (one / "gap_fraction.dat").read_bytes() == (two / "gap_fraction.dat").read_bytes()

    def without_timing(path: Path) -> list[dict]:
        with open(path, newline="") as fh:
            return [{k: v for k, v in row.items() if k != "wall_ms"} for row in csv.DictReader(fh)]

    assert without_timing(one / "gap_trials.csv") == without_timing(two / "gap_trials.csv")


@pytest.mark.slow
def test_jensen_audit_on_the_default_disk(group: SchottkyData, delta: float) -> None:
    audit = jensen_audit(TrivialRep(), group, degree=TEST_DEGREE, delta=delta)
    assert audit.residual <= 1e-3
    assert any(z.re == pytest.approx(delta, abs=1e-8) for z in audit.zeros)


@pytest.mark.slow
def test_jensen_audit_for_a_random_cover(group: SchottkyData, delta: float) -> None:
    rep = StdZeroRep(sample_rep(8, 2, derive_seed(0, 8, 0)))
    audit = jensen_audit(rep, group, degree=TEST_DEGREE, delta=delta)
    assert audit.residual <= 1e-3
