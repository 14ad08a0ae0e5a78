"""Monte-Carlo harness: single estimates, NMSE and capacity sweeps, op-count scaling.

Every trial draws its noise from its own stream keyed by
``(seed, snr_index, trial)``, so two sweeps that differ only in, say, the
sign mode see identical noise and can be compared pairwise. Pilots come
from the separate stream ``(seed, 0)`` and are shared by all trials.
"""

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .capacity import CapacityModel, capacity
from .channel import noisy_frame, synthesize_frame
from .config import ConfigError
from .esprit import OpCounter
from .estimator import EstimatorConfig, run_mf_mt_esprit
from .flags import format_flags
from .pilots import SignMode, generate_pilots

STEERING_NOTE = "simplified phase-conjugate receive steering (not an optimal beamformer)"
CAPACITY_NOTE = "equal power over U modes; log2 det(I + rho/U H H^H) on W_rx^H H W_tx; mean over subcarriers"


def trial_rng(seed, snr_index, trial):
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(1, snr_index, trial)))


def pilot_rng(seed):
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0,)))


@dataclass(frozen=True)
class Scenario:
    """Everything a trial needs, built once per experiment."""

    config: object
    geom: object
    modes: object
    carriers: object
    pilots: object
    context: object
    clean: object
    estimator: EstimatorConfig

    @classmethod
    def from_config(cls, config):
        geom = config.geometry()
        modes, carriers = config.modes(), config.carriers()
        pilots = generate_pilots(modes, carriers, pilot_rng(config.seed))
        clean = synthesize_frame(geom, modes, carriers, pilots, config.channel, config.snapshots)
        est = EstimatorConfig(SignMode(config.sign_mode), config.subarray)
        return cls(config, geom, modes, carriers, pilots, config.sign_context(), clean, est)

    def estimate(self, snr_db, rng, counter=None):
        frame = noisy_frame(self.clean, snr_db, rng)
        return run_mf_mt_esprit(frame, self.pilots, self.context, self.estimator, counter)


@dataclass(frozen=True)
class TrialRecord:
    snr_db: float
    trial: int
    phi: float
    theta: float
    r_wrapped: float
    gamma: float
    xi_wrapped: float
    delta: float
    flags: frozenset
    failed: bool

    COLUMNS = (
        "snr_db", "trial", "phi_hat", "theta_hat", "r_wrapped", "gamma_hat",
        "xi_wrapped", "delta", "failed", "flags",
    )

    @classmethod
    def from_report(cls, snr_db, trial, report):
        return cls(
            float(snr_db), int(trial), float(report.phi), float(report.theta),
            float(report.r_wrapped), float(report.gamma), float(report.xi_wrapped),
            float(report.delta), report.flags, report.failed,
        )

    def row(self):
        return (
            self.snr_db, self.trial, self.phi, self.theta, self.r_wrapped, self.gamma,
            self.xi_wrapped, self.delta, int(self.failed), format_flags(self.flags),
        )


def _run_chunk(args):
    scenario, tasks = args
    out = []
    for snr_index, snr_db, trial in tasks:
        report = scenario.estimate(snr_db, trial_rng(scenario.config.seed, snr_index, trial))
        out.append(TrialRecord.from_report(snr_db, trial, report))
    return out


def run_trials(scenario, snr_list, trials, workers=1):
    """Records for every (snr, trial), in that order regardless of ``workers``."""
    tasks = [(i, float(s), t) for i, s in enumerate(snr_list) for t in range(trials)]
    if workers <= 1 or len(tasks) < 2 * workers:
        return _run_chunk((scenario, tasks))
    size = math.ceil(len(tasks) / (4 * workers))
    chunks = [(scenario, tasks[i : i + size]) for i in range(0, len(tasks), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return [rec for part in pool.map(_run_chunk, chunks) for rec in part]


def normalized_sq_error(estimates, truth):
    return ((np.asarray(estimates, dtype=float) - truth) / truth) ** 2


def nmse(estimates, truth, ok=None):
    """Mean of ``((x_hat - x) / x)^2`` over the usable entries; NaN if none."""
    err = normalized_sq_error(estimates, truth)
    ok = np.ones(err.shape, dtype=bool) if ok is None else np.asarray(ok, dtype=bool)
    return float(np.mean(err[ok])) if ok.any() else math.nan


def bootstrap_difference(err_a, ok_a, err_b, ok_b, n_boot=2000, level=0.95, seed=0):
    """Paired bootstrap band for ``NMSE_b - NMSE_a``.

    Trials are resampled jointly, so the t-th entries of ``a`` and ``b`` stay
    together; flagged entries drop out of both numerator and denominator.
    """
    err_a, err_b = np.where(ok_a, err_a, 0.0), np.where(ok_b, err_b, 0.0)
    ok_a, ok_b = np.asarray(ok_a, float), np.asarray(ok_b, float)
    n = len(err_a)
    idx = np.random.default_rng(seed).integers(0, n, size=(n_boot, n))
    with np.errstate(invalid="ignore", divide="ignore"):
        diff = err_b[idx].sum(1) / ok_b[idx].sum(1) - err_a[idx].sum(1) / ok_a[idx].sum(1)
    diff = diff[np.isfinite(diff)]
    tail = (1.0 - level) / 2.0
    return float(np.quantile(diff, tail)), float(np.quantile(diff, 1.0 - tail))


@dataclass
class SweepResult:
    """Per-trial records plus the aggregate table recomputed from them."""

    config: object
    snr_db: tuple
    records: list
    table: list = field(default_factory=list)
    columns: tuple = ()
    per_trial: dict = field(default_factory=dict)

    def at(self, snr_index):
        t = self.config.trials
        return self.records[snr_index * t : (snr_index + 1) * t]

    def arrays(self, snr_index):
        recs = self.at(snr_index)
        phi = np.array([r.phi for r in recs])
        theta = np.array([r.theta for r in recs])
        ok = np.array([not r.failed for r in recs])
        return phi, theta, ok

    @property
    def flagged_fraction(self):
        """Worst per-SNR fraction of trials carrying a failure flag."""
        return max(
            (sum(r.failed for r in self.at(i)) / self.config.trials for i in range(len(self.snr_db))),
            default=0.0,
        )


def nmse_table(result):
    pose = result.config.pose
    rows = []
    for i, snr in enumerate(result.snr_db):
        phi, theta, ok = result.arrays(i)
        rows.append((
            snr, nmse(phi, pose.phi, ok), nmse(theta, pose.theta, ok),
            len(ok), float(np.mean(~ok)),
        ))
    return rows


def nmse_sweep(config):
    """NMSE of both angles per SNR (CSV columns as in ``NMSE_COLUMNS``)."""
    scenario = Scenario.from_config(config)
    records = run_trials(scenario, config.snr_db, config.trials, config.workers)
    result = SweepResult(config, config.snr_db, records, columns=NMSE_COLUMNS)
    result.table = nmse_table(result)
    return result


NMSE_COLUMNS = ("snr_db", "nmse_phi", "nmse_theta", "trials", "flagged_fraction")
CAPACITY_COLUMNS = ("snr_db", "cap_aligned", "cap_misaligned", "cap_steered_est", "cap_steered_true")


def capacity_sweep(config):
    """Aligned, unsteered, estimate-steered and truth-steered capacity per SNR.

    A trial whose estimate failed is left unsteered.

    Raises:
        ConfigError: if the SNR list holds a non-finite entry.
    """
    if not all(np.isfinite(config.snr_db)):
        raise ConfigError("capacity-sweep needs finite SNRs (no 'inf' sentinel)")
    scenario = Scenario.from_config(config)
    records = run_trials(scenario, config.snr_db, config.trials, config.workers)
    model = CapacityModel(scenario.geom, scenario.modes, scenario.carriers, config.channel)
    steered_true = model.steered_true()
    result = SweepResult(config, config.snr_db, records, columns=CAPACITY_COLUMNS)
    for i, snr in enumerate(config.snr_db):
        est = np.array([
            capacity(model.misaligned if r.failed else model.steered(r.phi, r.theta), snr)
            for r in result.at(i)
        ])
        result.per_trial[snr] = est
        result.table.append((
            snr, capacity(model.aligned, snr), capacity(model.misaligned, snr),
            float(np.mean(est)), capacity(steered_true, snr),
        ))
    return result


def estimate_once(config, snr_db, trial=0):
    """One frame at ``snr_db`` drawn from stream ``(seed, 0, trial)``."""
    scenario = Scenario.from_config(config)
    report = scenario.estimate(snr_db, trial_rng(config.seed, 0, trial))
    return report, TrialRecord.from_report(snr_db, trial, report)


SCALING_COLUMNS = ("sweep", "U", "P", "macs_r", "macs_gamma", "macs_xi", "macs_total")


def _centred_modes(u):
    lo = -(u // 2)
    return lo, lo + u - 1


def scaling_counts(config, u, p):
    """Stage op counts for one estimate with ``u`` modes and ``p`` subcarriers."""
    lo, hi = _centred_modes(u)
    cfg = config.replace(
        n_elements=max(u, config.n_elements), mode_min=lo, mode_max=hi, subcarriers=p,
        channel="approx", subarray=None, radius=config.array_radius,
    )
    counter = OpCounter()
    Scenario.from_config(cfg).estimate(cfg.scaling_snr_db, trial_rng(cfg.seed, 0, 0), counter)
    return {stage: counter.macs.get(stage, 0) for stage in ("r", "gamma", "xi")}


def scaling(config):
    """Rows sweeping U at fixed P and P at fixed U over ``config.scaling_sizes``."""
    rows = []
    for u in config.scaling_sizes:
        c = scaling_counts(config, u, config.subcarriers)
        rows.append(("U", u, config.subcarriers, c["r"], c["gamma"], c["xi"], sum(c.values())))
    for p in config.scaling_sizes:
        c = scaling_counts(config, config.mode_count, p)
        rows.append(("P", config.mode_count, p, c["r"], c["gamma"], c["xi"], sum(c.values())))
    return rows


def loglog_slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def scaling_slopes(rows):
    """(r-stage slope in U, gamma-stage slope in P)."""
    u_rows = [r for r in rows if r[0] == "U"]
    p_rows = [r for r in rows if r[0] == "P"]
    return (
        loglog_slope([r[1] for r in u_rows], [r[3] for r in u_rows]),
        loglog_slope([r[2] for r in p_rows], [r[4] for r in p_rows]),
    )


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def csv_text(columns, rows, header_lines=()):
    """CSV with ``#``-prefixed metadata lines and round-trip float formatting."""
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_csv(path, columns, rows, header_lines=()):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(csv_text(columns, rows, header_lines))


def read_csv(path):
    """(metadata lines, column names, rows of strings)."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    meta = [ln[2:] for ln in lines if ln.startswith("# ")]
    body = [ln for ln in lines if not ln.startswith("#")]
    reader = list(csv.reader(body))
    return meta, reader[0], reader[1:]


def records_rows(records):
    return [r.row() for r in records]
