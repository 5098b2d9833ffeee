"""Monte Carlo link simulation over quasi-static Rayleigh fading.

Model per trial: ``Y = S(X) H + N`` with ``H`` (nt x nr) i.i.d. CN(0, 1),
fixed over one codeword.  The constellation is scaled so that
``E||S(X)||_F^2 = nt^2`` (unit energy per codeword entry), and the noise
entries are CN(0, nt / snr).  The SNR is therefore the average received
signal power per receive antenna over the noise power.

Randomness for trial ``t`` at SNR index ``p`` comes from
``numpy.random.default_rng([seed, p, t])`` so counts do not depend on how
trials are split across workers.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np

from .diversity import Constellation

DECODERS = ("groupwise", "exhaustive", "both")
EXHAUSTIVE_BUDGET = 10 ** 6
CHUNK = 500


@dataclass
class Decision:
    indices: tuple
    x: np.ndarray
    evaluations: int


def _per_group(code, partition, constellations):
    groups = partition.groups()
    if partition.size != code.K:
        raise ValueError("partition does not match the code")
    if isinstance(constellations, Constellation):
        constellations = [constellations] * len(groups)
    if len(constellations) != len(groups):
        raise ValueError(f"{len(constellations)} constellations for {len(groups)} groups")
    for b, c in zip(groups, constellations):
        if c.dim != len(b):
            raise ValueError(f"group of {len(b)} symbols cannot use a {c.dim}-dim constellation")
    return groups, list(constellations)


def _tables(code, groups, constellations):
    """``S_k(a)`` for every group ``k`` and point ``a``: list of (|A_k|, nt, nt)."""
    W = code.stacked
    return [np.tensordot(c.points, W[list(b)], axes=1) for b, c in zip(groups, constellations)]


def _assemble(code, groups, constellations, indices):
    x = np.zeros(code.K)
    for b, c, i in zip(groups, constellations, indices):
        x[list(b)] = c.points[i]
    return x


def _metrics(table, y, h):
    """``||Y - S_k(a) H||^2`` for every point ``a``; batched over leading axis of y, h."""
    P = np.einsum("aij,bjr->bair", table, h)
    return np.sum(np.abs(y[:, None] - P) ** 2, axis=(2, 3))


def groupwise_ml_decode(code, partition, constellations, y, h):
    """Per-group ML decisions ``argmin_{X_k} ||Y - S_k(X_k) H||^2``.

    Ties go to the lowest constellation index.  Costs ``sum_k |A_k|`` metric
    evaluations.
    """
    groups, consts = _per_group(code, partition, constellations)
    y = np.asarray(y, dtype=complex)[None]
    h = np.asarray(h, dtype=complex)[None]
    idx = tuple(int(np.argmin(_metrics(t, y, h)[0])) for t in _tables(code, groups, consts))
    return Decision(idx, _assemble(code, groups, consts, idx), sum(len(c) for c in consts))


def exhaustive_ml_decode(code, constellations, y, h, partition=None, chunk=16384):
    """Joint ML decision over the full product constellation.

    Candidates are scanned in lexicographic order of the group index tuple and
    the first minimiser wins.

    Raises
    ------
    ValueError
        If the product constellation has more than ``10**6`` points.
    """
    partition = partition or code.grouping
    groups, consts = _per_group(code, partition, constellations)
    sizes = [len(c) for c in consts]
    total = math.prod(sizes)
    if total > EXHAUSTIVE_BUDGET:
        raise ValueError(f"exhaustive search over {total} codewords exceeds {EXHAUSTIVE_BUDGET}")
    y = np.asarray(y, dtype=complex)
    h = np.asarray(h, dtype=complex)
    parts = [np.einsum("aij,jr->air", t, h) for t in _tables(code, groups, consts)]
    best, best_flat = np.inf, 0
    for start in range(0, total, chunk):
        flat = np.arange(start, min(total, start + chunk))
        idx = np.unravel_index(flat, sizes)
        SH = sum(p[i] for p, i in zip(parts, idx))
        m = np.sum(np.abs(y[None] - SH) ** 2, axis=(1, 2))
        j = int(np.argmin(m))
        if m[j] < best:
            best, best_flat = float(m[j]), int(flat[j])
    chosen = tuple(int(v) for v in np.unravel_index(best_flat, sizes))
    return Decision(chosen, _assemble(code, groups, consts, chosen), total)


def ml_metric(y, s, h):
    return float(np.sum(np.abs(np.asarray(y) - np.asarray(s) @ np.asarray(h)) ** 2))


def gray(i):
    return i ^ (i >> 1)


def transmit_scale(code, groups, constellations):
    """Factor giving ``E||S(X)||_F^2 = nt^2`` for independent uniform groups."""
    tables = _tables(code, groups, constellations)
    energy = sum(float(np.mean(np.sum(np.abs(t) ** 2, axis=(1, 2)))) for t in tables)
    means = [t.mean(axis=0) for t in tables]
    for k in range(len(means)):
        for j in range(len(means)):
            if j != k:
                energy += float(np.real(np.trace(means[k].conj().T @ means[j])))
    return code.nt / math.sqrt(energy)


@dataclass(frozen=True)
class SimConfig:
    code: object
    constellation: object
    snr_points_db: tuple
    trials_per_point: int
    n_r: int = 1
    seed: int = 0
    decoder: str = "groupwise"
    partition: object = None
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "snr_points_db", tuple(float(s) for s in self.snr_points_db))
        if not self.snr_points_db:
            raise ValueError("snr list must not be empty")
        if not all(math.isfinite(s) for s in self.snr_points_db):
            raise ValueError("snr points must be finite")
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be >= 1")
        if self.n_r < 1:
            raise ValueError("n_r must be >= 1")
        if self.decoder not in DECODERS:
            raise ValueError(f"decoder must be one of {DECODERS}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def echo(self):
        return {
            "nt": self.code.nt,
            "K": self.code.K,
            "code_meta": self.code.meta.get("construction"),
            "partition": list((self.partition or self.code.grouping).assignment),
            "constellation_size": [len(c) for c in self._consts()],
            "snr_points_db": list(self.snr_points_db),
            "trials_per_point": self.trials_per_point,
            "n_r": self.n_r,
            "seed": self.seed,
            "decoder": self.decoder,
            "snr_definition": "E||S H||^2 / E||N||^2 per receive antenna; E||S||_F^2 = nt^2",
            "channel": "quasi-static i.i.d. CN(0,1), fresh per codeword",
            "bit_mapping": "binary-reflected Gray code of the constellation point index, per group",
            "rng": "numpy default_rng([seed, snr_index, trial_index])",
        }

    def _consts(self):
        part = self.partition or self.code.grouping
        return _per_group(self.code, part, self.constellation)[1]


@dataclass
class SimPoint:
    snr_db: float
    decoder: str
    trials: int
    bit_errors: int
    bits_per_trial: int
    sym_errors: int
    groups: int

    @property
    def ber(self):
        return self.bit_errors / (self.bits_per_trial * self.trials)

    @property
    def ser(self):
        return self.sym_errors / (self.groups * self.trials)

    def row(self, seed):
        return {
            "snr_db": self.snr_db,
            "trials": self.trials,
            "bit_errors": self.bit_errors,
            "ber": self.ber,
            "sym_errors": self.sym_errors,
            "ser": self.ser,
            "decoder": self.decoder,
            "seed": seed,
        }


@dataclass
class SimResult:
    points: list
    config: dict = field(default_factory=dict)
    decoder_disagreements: int = 0

    @property
    def seed(self):
        return self.config.get("seed")

    def rows(self):
        return [p.row(self.seed) for p in self.points]

    def curve(self, decoder="groupwise"):
        return [p for p in self.points if p.decoder == decoder]


CSV_COLUMNS = ("snr_db", "trials", "bit_errors", "ber", "sym_errors", "ser", "decoder", "seed")


class _Kernel:
    """Picklable per-run state shared by worker processes."""

    def __init__(self, cfg):
        code = cfg.code
        part = cfg.partition or code.grouping
        groups, consts = _per_group(code, part, cfg.constellation)
        scale = transmit_scale(code, groups, consts)
        self.tables = [t * scale for t in _tables(code, groups, consts)]
        self.sizes = [len(c) for c in consts]
        for s in self.sizes:
            if s & (s - 1):
                raise ValueError(f"constellation size {s} is not a power of two")
        self.bits = [s.bit_length() - 1 for s in self.sizes]
        self.nt = code.nt
        self.n_r = cfg.n_r
        self.seed = cfg.seed
        self.decoder = cfg.decoder

    def draw(self, p, t, sigma2):
        rng = np.random.default_rng([self.seed, p, t])
        idx = np.array([rng.integers(0, s) for s in self.sizes])
        h = (rng.standard_normal((self.nt, self.n_r)) + 1j * rng.standard_normal((self.nt, self.n_r))) / math.sqrt(2)
        noise = (rng.standard_normal((self.nt, self.n_r)) + 1j * rng.standard_normal((self.nt, self.n_r))) * math.sqrt(sigma2 / 2)
        return idx, h, noise

    def groupwise(self, y, h):
        return np.stack([np.argmin(_metrics(t, y, h), axis=1) for t in self.tables], axis=1)

    def exhaustive(self, y, h):
        total = math.prod(self.sizes)
        if total > EXHAUSTIVE_BUDGET:
            raise ValueError(f"exhaustive search over {total} codewords exceeds {EXHAUSTIVE_BUDGET}")
        out = np.empty((len(y), len(self.sizes)), dtype=int)
        grid = np.unravel_index(np.arange(total), self.sizes)
        for b in range(len(y)):
            parts = [np.einsum("aij,jr->air", t, h[b]) for t in self.tables]
            SH = sum(p[i] for p, i in zip(parts, grid))
            j = int(np.argmin(np.sum(np.abs(y[b][None] - SH) ** 2, axis=(1, 2))))
            out[b] = [g[j] for g in grid]
        return out

    def errors(self, tx, rx):
        sym = int(np.sum(tx != rx))
        bits = 0
        for k in range(tx.shape[1]):
            diff = np.array([gray(int(a)) ^ gray(int(b)) for a, b in zip(tx[:, k], rx[:, k])])
            bits += int(sum(bin(int(d)).count("1") for d in diff))
        return bits, sym

    def run(self, p, snr_db, start, stop):
        sigma2 = self.nt / 10 ** (snr_db / 10)
        draws = [self.draw(p, t, sigma2) for t in range(start, stop)]
        tx = np.stack([d[0] for d in draws])
        h = np.stack([d[1] for d in draws])
        noise = np.stack([d[2] for d in draws])
        S = sum(t[tx[:, k]] for k, t in enumerate(self.tables))
        y = S @ h + noise
        out = {}
        decisions = {}
        if self.decoder in ("groupwise", "both"):
            decisions["groupwise"] = self.groupwise(y, h)
        if self.decoder in ("exhaustive", "both"):
            decisions["exhaustive"] = self.exhaustive(y, h)
        for name, rx in decisions.items():
            out[name] = self.errors(tx, rx)
        disagree = 0
        if len(decisions) == 2:
            disagree = int(np.sum(np.any(decisions["groupwise"] != decisions["exhaustive"], axis=1)))
        return p, out, disagree


def _run_task(args):
    kernel, p, snr, start, stop = args
    return kernel.run(p, snr, start, stop)


def run_simulation(cfg):
    """BER/SER versus SNR for `cfg`; bit-identical for a given seed and any worker count."""
    kernel = _Kernel(cfg)
    n = cfg.trials_per_point
    tasks = [
        (kernel, p, snr, s, min(n, s + CHUNK))
        for p, snr in enumerate(cfg.snr_points_db)
        for s in range(0, n, CHUNK)
    ]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            results = list(ex.map(_run_task, tasks))
    else:
        results = [_run_task(t) for t in tasks]

    names = ["groupwise", "exhaustive"] if cfg.decoder == "both" else [cfg.decoder]
    counts = {(p, d): [0, 0] for p in range(len(cfg.snr_points_db)) for d in names}
    disagreements = 0
    for p, out, dis in results:
        disagreements += dis
        for d, (bits, sym) in out.items():
            counts[(p, d)][0] += bits
            counts[(p, d)][1] += sym
    points = [
        SimPoint(snr, d, n, counts[(p, d)][0], sum(kernel.bits), counts[(p, d)][1], len(kernel.sizes))
        for d in names
        for p, snr in enumerate(cfg.snr_points_db)
    ]
    return SimResult(points, cfg.echo(), disagreements)
