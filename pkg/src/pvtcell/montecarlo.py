"""Monte Carlo oracles for outage and blocking.

Randomness comes from counter-based Philox streams keyed by
``(seed, stream, chunk)``. Trials are processed in fixed-size chunks and
chunk results are combined in chunk order, so estimates are bit-identical
for a given seed whatever the number of worker threads.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .interference import RAYLEIGH, FadingKind, FadingModel, LinkParams
from .markov import ChainParams

__all__ = [
    "MCConfig",
    "MCEstimate",
    "make_rng",
    "sample_fading",
    "sample_nearest_distance",
    "mc_outage_disk",
    "mc_outage_pvt",
    "mc_outage_grid",
    "mc_outage_grid_table",
    "mc_chain_blocking",
    "ppp_window_counts",
    "hex_lattice",
]

# Stream identifiers keep the estimators statistically independent.
STREAM_DISK, STREAM_PVT, STREAM_GRID, STREAM_CHAIN, STREAM_COUNTS = range(1, 6)


@dataclass(frozen=True)
class MCConfig:
    """Monte Carlo settings.

    Lengths left as ``None`` are resolved against the BS density:
    ``disk_radius = 50/sqrt(lambda_B)``, ``window = 20/sqrt(lambda_B)``,
    ``guard = 2/sqrt(lambda_B)``.
    """

    trials: int = 100_000
    seed: int = 0
    disk_radius: float | None = None
    window: float | None = None
    guard: float | None = None
    chunk_size: int = 20_000
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.chunk_size < 1 or self.workers < 1:
            raise ValueError("chunk_size and workers must be >= 1")
        if self.disk_radius is not None and not self.disk_radius > 0:
            raise ValueError("disk_radius must be positive")
        if self.guard is not None and not self.guard > 0:
            raise ValueError("guard must be positive")
        if self.window is not None and self.guard is not None and not self.window > 2 * self.guard:
            raise ValueError("window must exceed twice the guard")

    def resolved(self, lambda_B: float) -> "MCConfig":
        unit = 1.0 / math.sqrt(lambda_B)
        cfg = MCConfig(
            self.trials,
            self.seed,
            self.disk_radius if self.disk_radius is not None else 50 * unit,
            self.window if self.window is not None else 20 * unit,
            self.guard if self.guard is not None else 2 * unit,
            self.chunk_size,
            self.workers,
        )
        if not cfg.window > 2 * cfg.guard:
            raise ValueError("window must exceed twice the guard")
        return cfg

    def digest(self) -> str:
        """Short hash of every setting except the worker count."""
        d = asdict(self)
        d.pop("workers")
        return hashlib.sha256(repr(sorted(d.items())).encode()).hexdigest()[:12]


@dataclass
class MCEstimate:
    mean: float
    std_error: float
    trials: int
    seed: int = 0
    meta: dict = field(default_factory=dict)

    def within(self, value: float, k: float) -> bool:
        return abs(self.mean - value) <= k * self.std_error


def make_rng(seed: int, stream: int, chunk: int = 0) -> np.random.Generator:
    """Independent Philox generator for ``(seed, stream, chunk)``."""
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=(stream, chunk))
    return np.random.Generator(np.random.Philox(ss))


def _chunks(cfg: MCConfig):
    full, rest = divmod(cfg.trials, cfg.chunk_size)
    sizes = [cfg.chunk_size] * full + ([rest] if rest else [])
    return list(enumerate(sizes))


def _run_chunks(cfg: MCConfig, work):
    """Apply ``work(chunk_index, size)`` to every chunk, results in order."""
    chunks = _chunks(cfg)
    if cfg.workers == 1:
        return [work(i, n) for i, n in chunks]
    with ThreadPoolExecutor(cfg.workers) as pool:
        return list(pool.map(lambda c: work(*c), chunks))


def _bernoulli_estimates(counts: np.ndarray, n: int, seed: int, meta: dict):
    """Turn failure counts into estimates with the sample-std standard error."""
    out = []
    for c in np.atleast_1d(counts):
        p = float(c) / n
        var = p * (1 - p) * n / (n - 1) if n > 1 else 0.0
        out.append(MCEstimate(p, math.sqrt(var / n), n, seed, dict(meta)))
    return out


def sample_fading(model: FadingModel, rng: np.random.Generator, size) -> np.ndarray:
    """Power fading factors for any supported scenario."""
    kind = model.kind
    if kind is FadingKind.NONE:
        return np.ones(size)
    if kind is FadingKind.RAYLEIGH:
        return rng.standard_exponential(size)
    out = np.ones(size)
    if kind in (FadingKind.NAKAGAMI, FadingKind.NAKAGAMI_LOGNORMAL):
        out = out * rng.gamma(model.m, 1.0 / model.m, size)
    if kind in (FadingKind.LOGNORMAL, FadingKind.NAKAGAMI_LOGNORMAL):
        out = out * np.exp(2.0 * model.sigma * rng.standard_normal(size))
    return out


def nearest_distance_from_uniform(u, lambda_B: float):
    """Inverse CDF of the nearest-BS distance."""
    return np.sqrt(-np.log(u) / (math.pi * lambda_B))


def sample_nearest_distance(lambda_B: float, rng: np.random.Generator, size=None):
    """Distance (km) from a typical user to its nearest base station."""
    if not lambda_B > 0:
        raise ValueError("lambda_B must be positive")
    # 1 - U lies in (0, 1], so the log is finite.
    return nearest_distance_from_uniform(1.0 - rng.random(size), lambda_B)


def _gammas(gamma0):
    g = np.atleast_1d(np.asarray(gamma0, float))
    if np.any(g <= 0):
        raise ValueError("gamma0 must be positive")
    return g


def _unpack(estimates, gamma0):
    return estimates[0] if np.ndim(gamma0) == 0 else estimates


def mc_outage_disk(gamma0, delta: int, link: LinkParams, model: FadingModel = RAYLEIGH,
                   cfg: MCConfig = MCConfig()):
    """Outage with ``delta`` interferers uniform on a disk around the user.

    The serving distance follows the nearest-BS law; every link fades
    independently. ``gamma0`` may be an array, in which case one estimate
    per threshold is returned from the same samples.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    cfg = cfg.resolved(link.lambda_B)
    g = _gammas(gamma0)
    a, b, K = cfg.disk_radius, link.b, link.K_prime

    def work(chunk, n):
        rng = make_rng(cfg.seed, STREAM_DISK, chunk)
        r = sample_nearest_distance(link.lambda_B, rng, n)
        signal = K * sample_fading(model, rng, n) * r**-b
        interference = np.zeros(n)
        if delta:
            d = a * np.sqrt(rng.random((n, delta)))
            interference = (K * sample_fading(model, rng, (n, delta)) * d**-b).sum(axis=1)
        with np.errstate(divide="ignore"):
            sinr = signal / (link.noise_power + interference)
        return (sinr[:, None] < g[None, :]).sum(axis=0)

    counts = np.sum(_run_chunks(cfg, work), axis=0)
    meta = {"model": "disk", "delta": delta, "disk_radius": cfg.disk_radius, "config": cfg.digest()}
    return _unpack(_bernoulli_estimates(counts, cfg.trials, cfg.seed, meta), gamma0)


def _ppp_sinr(link, model, cfg, rng, n, batch=500):
    """SINR of the origin user in ``n`` independent PPP realisations.

    Realisations are generated ``batch`` at a time as one flat point array
    with per-realisation segments.
    """
    W, G = cfg.window, cfg.guard
    mean_count = link.lambda_B * (2 * W) ** 2
    sinr = np.empty(n)
    resampled = 0
    for start in range(0, n, batch):
        size = min(batch, n - start)
        ks = rng.poisson(mean_count, size)
        while np.any(ks == 0):
            zero = ks == 0
            resampled += int(zero.sum())
            ks[zero] = rng.poisson(mean_count, int(zero.sum()))
        xy = rng.uniform(-W, W, (int(ks.sum()), 2))
        d2 = np.einsum("ij,ij->i", xy, xy)
        power = link.K_prime * sample_fading(model, rng, len(d2)) * d2 ** (-link.b / 2)
        starts = np.concatenate([[0], np.cumsum(ks)[:-1]])
        nearest = np.minimum.reduceat(d2, starts)
        serving = np.add.reduceat(power * (d2 == np.repeat(nearest, ks)), starts)
        total = np.add.reduceat(power, starts)
        out = serving / (link.noise_power + total - serving)
        # Serving BS inside the guard band: redraw that realisation.
        for i in np.flatnonzero(nearest > (W - G) ** 2):
            resampled += 1
            out[i] = _ppp_sinr_single(link, model, cfg, rng)
        sinr[start:start + size] = out
    return sinr, resampled


def _ppp_sinr_single(link, model, cfg, rng):
    W, G = cfg.window, cfg.guard
    while True:
        k = rng.poisson(link.lambda_B * (2 * W) ** 2)
        if k == 0:
            continue
        xy = rng.uniform(-W, W, (k, 2))
        d2 = np.einsum("ij,ij->i", xy, xy)
        j = int(np.argmin(d2))
        if d2[j] <= (W - G) ** 2:
            break
    power = link.K_prime * sample_fading(model, rng, k) * d2 ** (-link.b / 2)
    return power[j] / (link.noise_power + power.sum() - power[j])


def mc_outage_pvt(gamma0, link: LinkParams, model: FadingModel = RAYLEIGH,
                  cfg: MCConfig = MCConfig()):
    """Unconditioned outage of a typical user in a Poisson network.

    Base stations form a PPP of density ``lambda_B`` on a square window of
    half-width ``cfg.window`` centred on the user. The nearest one serves,
    all others interfere. Realisations with no BS or with the serving BS
    inside the guard band are redrawn.
    """
    cfg = cfg.resolved(link.lambda_B)
    g = _gammas(gamma0)

    def work(chunk, n):
        rng = make_rng(cfg.seed, STREAM_PVT, chunk)
        sinr, resampled = _ppp_sinr(link, model, cfg, rng, n)
        return (sinr[:, None] < g[None, :]).sum(axis=0), resampled

    parts = _run_chunks(cfg, work)
    counts = np.sum([p[0] for p in parts], axis=0)
    meta = {"model": "pvt", "window": cfg.window, "guard": cfg.guard,
            "resampled": int(sum(p[1] for p in parts)), "config": cfg.digest()}
    return _unpack(_bernoulli_estimates(counts, cfg.trials, cfg.seed, meta), gamma0)


def ppp_window_counts(lambda_B: float, cfg: MCConfig, realisations: int) -> np.ndarray:
    """Point counts of independent PPP realisations on the square window."""
    cfg = cfg.resolved(lambda_B)
    rng = make_rng(cfg.seed, STREAM_COUNTS)
    return rng.poisson(lambda_B * (2 * cfg.window) ** 2, realisations)


def hex_lattice(lambda_B: float, rings: int, radius: float | None = None) -> np.ndarray:
    """Hexagonal lattice points of density ``lambda_B`` within ``rings`` rings
    of the origin, origin excluded, sorted by ring.

    With ``radius`` the ring count is chosen to cover that distance and only
    points within it are kept.
    """
    d = math.sqrt(2.0 / (math.sqrt(3.0) * lambda_B))
    if radius is not None:
        rings = int(math.ceil(radius / (d * math.sqrt(3.0) / 2))) + 1
    if rings < 1:
        raise ValueError("rings must be >= 1")
    i, j = np.meshgrid(np.arange(-rings, rings + 1), np.arange(-rings, rings + 1), indexing="ij")
    i, j = i.ravel(), j.ravel()
    ring = np.maximum(np.maximum(np.abs(i), np.abs(j)), np.abs(i + j))
    keep = (ring > 0) & (ring <= rings)
    pts = np.column_stack([d * (i + 0.5 * j), d * math.sqrt(3.0) / 2 * j])[keep]
    ring = ring[keep]
    if radius is not None:
        inside = np.hypot(pts[:, 0], pts[:, 1]) <= radius
        pts, ring = pts[inside], ring[inside]
    return pts[np.argsort(ring, kind="stable")]


def _sample_hexagon(lambda_B: float, rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform points in the Voronoi hexagon of the origin (rejection)."""
    d = math.sqrt(2.0 / (math.sqrt(3.0) * lambda_B))
    R = d / math.sqrt(3.0)
    normals = np.array([[math.cos(t), math.sin(t)] for t in np.arange(6) * math.pi / 3])
    out = np.empty((0, 2))
    while len(out) < n:
        cand = rng.uniform(-R, R, (2 * (n - len(out)) + 16, 2))
        inside = np.all(np.abs(cand @ normals.T) <= d / 2, axis=1)
        out = np.vstack([out, cand[inside]])
    return out[:n]


def mc_outage_grid(gamma0, link: LinkParams, model: FadingModel = RAYLEIGH,
                   cfg: MCConfig = MCConfig(), rings: int = 8, delta: int | None = None,
                   user_position=None, radius: float | None = None):
    """Outage of a user in the central cell of a hexagonal grid.

    The user's own cell centre serves. Every lattice BS within ``rings``
    rings (or within ``radius`` km) interferes unless ``delta`` is given,
    in which case a uniformly random subset of ``delta`` of them is active
    in each trial. ``user_position`` pins the user instead of drawing it
    uniformly over the central cell.
    """
    table = mc_outage_grid_table(np.atleast_1d(gamma0), [delta], link, model, cfg, rings,
                                 user_position, radius)
    rows = [row[0] for row in table]
    return rows[0] if np.ndim(gamma0) == 0 else rows


def mc_outage_grid_table(gammas, deltas, link: LinkParams, model: FadingModel = RAYLEIGH,
                         cfg: MCConfig = MCConfig(), rings: int = 8, user_position=None,
                         radius: float | None = None):
    """Grid outage for every ``(gamma, delta)`` pair from shared samples.

    Each trial draws a uniformly random ordering of the interferer set; the
    first ``delta`` of them are active for count ``delta`` (``None`` means
    all). Returns a nested list ``[gamma][delta]`` of estimates.
    """
    g = _gammas(gammas)
    bs = hex_lattice(link.lambda_B, rings, radius)
    n_bs = len(bs)
    dl = [n_bs if d is None else int(d) for d in deltas]
    if any(d < 0 or d > n_bs for d in dl):
        raise ValueError(f"delta must lie in [0, {n_bs}]")
    top = max(dl)
    cfg = cfg.resolved(link.lambda_B)
    b2 = -link.b / 2

    def work(chunk, n):
        rng = make_rng(cfg.seed, STREAM_GRID, chunk)
        if user_position is None:
            user = _sample_hexagon(link.lambda_B, rng, n)
        else:
            user = np.broadcast_to(np.asarray(user_position, float), (n, 2))
        r2 = np.einsum("ij,ij->i", user, user)
        signal = link.K_prime * sample_fading(model, rng, n) * r2**b2
        if top < n_bs:
            keys = rng.random((n, n_bs))
            pick = np.argpartition(keys, top - 1, axis=1)[:, :top] if top else np.zeros((n, 0), int)
            order = np.argsort(np.take_along_axis(keys, pick, axis=1), axis=1)
            pick = np.take_along_axis(pick, order, axis=1)
            pos = bs[pick]
        else:
            pos = np.broadcast_to(bs, (n, n_bs, 2))
        diff = pos - user[:, None, :]
        d2 = np.einsum("nkj,nkj->nk", diff, diff)
        interf = link.K_prime * sample_fading(model, rng, d2.shape) * d2**b2
        csum = np.concatenate([np.zeros((n, 1)), np.cumsum(interf, axis=1)], axis=1)
        sinr = signal[:, None] / (link.noise_power + csum[:, dl])
        return (sinr[:, None, :] < g[None, :, None]).sum(axis=0)

    counts = np.sum(_run_chunks(cfg, work), axis=0)
    meta = {"model": "grid", "interferers": n_bs, "config": cfg.digest()}
    return [
        _bernoulli_estimates(counts[i], cfg.trials, cfg.seed, {**meta, "gamma0": float(g[i])})
        for i in range(len(g))
    ]


def mc_chain_blocking(chain: ChainParams, horizon: float, cfg: MCConfig = MCConfig(),
                      batches: int = 20) -> MCEstimate:
    """Event-driven simulation of the channel-access chain.

    Blocking is the fraction of arrivals that find every available channel
    occupied. The first 10% of the horizon is discarded and the standard
    error comes from ``batches`` equal-time batch means.
    """
    if chain.lam * horizon < 1e4:
        raise ValueError("horizon must cover at least 1e4 expected arrivals")
    rng = make_rng(cfg.seed, STREAM_CHAIN)
    C, lam, eta, alpha, beta = chain.C, chain.lam, chain.eta, chain.alpha, chain.beta
    warm = 0.1 * horizon
    span = (horizon - warm) / batches
    arrivals = np.zeros(batches, dtype=np.int64)
    blocked = np.zeros(batches, dtype=np.int64)
    m, n, t = 0, C, 0.0
    block = 4096
    exps, unis, pos = rng.standard_exponential(block), rng.random(block), 0
    while True:
        up = lam if m < n else 0.0
        loss = n * beta if m < n else 0.0
        dep = m * eta
        rec = (C - n) * alpha
        total = lam + loss + dep + rec
        if pos == block:
            exps, unis, pos = rng.standard_exponential(block), rng.random(block), 0
        t += exps[pos] / total
        if t >= horizon:
            break
        x = unis[pos] * total
        pos += 1
        if x < lam:
            if t >= warm:
                k = min(int((t - warm) / span), batches - 1)
                arrivals[k] += 1
                blocked[k] += up == 0.0
            if up:
                m += 1
        elif x < lam + loss:
            n -= 1
        elif x < lam + loss + dep:
            m -= 1
        else:
            n += 1
    ratios = blocked / np.maximum(arrivals, 1)
    se = float(np.std(ratios, ddof=1) / math.sqrt(batches))
    total_arrivals = int(arrivals.sum())
    return MCEstimate(float(blocked.sum() / total_arrivals), se, total_arrivals, cfg.seed,
                      {"horizon": horizon, "batches": batches})
