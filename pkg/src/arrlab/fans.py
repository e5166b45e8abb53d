"""Fan partitions of point-cloud measures on spheres.

A fan is parametrized by an orthonormal frame (u, w): the cut plane is
span{u, w}, the first cut points along u, and angles run from u toward w.
Cuts after the first are placed so the designated measure mu_1 is
equiparted.  Point clouds are smoothed on the projected circle by a wrapped
Gaussian of width sigma; sigma = 0 means hard assignment.
"""

from __future__ import annotations

import csv
import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .errors import BadParam, BestEffort, DegenerateProjection, ImproperMeasure
from .ration import Ration

TWO_PI = 2.0 * math.pi
PROJ_EPS = 1e-12
DEGENERATE_WEIGHT = 1e-9
MIN_GAP = 1e-9


# -- data types --------------------------------------------------------------

@dataclass
class MeasureCloud:
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] < 3:
            raise BadParam("a measure needs points in R^d with d >= 3")
        if self.weights.shape != (self.points.shape[0],):
            raise BadParam("one weight per point required")
        if np.any(self.weights < 0):
            raise BadParam("weights must be non-negative")
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise BadParam(f"weights sum to {self.weights.sum()!r}, expected 1")
        if np.any(np.abs(np.linalg.norm(self.points, axis=1) - 1.0) > 1e-12):
            raise BadParam("points must lie on the unit sphere")

    @classmethod
    def from_arrays(cls, points, weights=None) -> "MeasureCloud":
        """Normalizes points to the sphere and weights to total mass 1."""
        P = np.asarray(points, dtype=float)
        if P.ndim != 2:
            raise BadParam("points must be a 2-d array")
        norms = np.linalg.norm(P, axis=1)
        if np.any(norms == 0):
            raise BadParam("zero vector cannot be projected to the sphere")
        P = P / norms[:, None]
        W = np.full(len(P), 1.0) if weights is None else np.asarray(weights, dtype=float)
        if np.any(W < 0) or W.sum() <= 0:
            raise BadParam("weights must be non-negative with positive total")
        W = W / W.sum()
        # renormalize once more so rounding cannot push the sum past 1e-12
        W = W / math.fsum(W)
        return cls(P, W)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return len(self.weights)

    @classmethod
    def from_csv(cls, path) -> "MeasureCloud":
        rows = []
        with open(path, newline="") as fh:
            for lineno, rec in enumerate(csv.reader(fh)):
                if not rec or not "".join(rec).strip():
                    continue
                try:
                    rows.append([float(x) for x in rec])
                except ValueError:
                    if lineno == 0 and not rows:
                        continue  # header
                    raise BadParam(f"{path}:{lineno + 1}: non-numeric entry") from None
        if not rows:
            raise BadParam(f"{path}: no data rows")
        if len({len(r) for r in rows}) != 1:
            raise BadParam(f"{path}: rows have different lengths")
        data = np.array(rows)
        return cls.from_arrays(data[:, 1:], data[:, 0])

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["weight"] + [f"x{i + 1}" for i in range(self.dim)])
            for wt, p in zip(self.weights, self.points):
                wr.writerow([repr(float(wt))] + [repr(float(x)) for x in p])


@dataclass(frozen=True)
class FanFrame:
    u: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        w = np.asarray(self.w, dtype=float)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "w", w)
        if u.shape != w.shape or u.ndim != 1:
            raise BadParam("frame vectors must be equal-length 1-d arrays")
        if abs(u @ u - 1) > 1e-12 or abs(w @ w - 1) > 1e-12 or abs(u @ w) > 1e-12:
            raise BadParam("frame is not orthonormal")

    @classmethod
    def from_vectors(cls, u, w) -> "FanFrame":
        """Gram-Schmidt on (u, w)."""
        u = np.asarray(u, dtype=float)
        w = np.asarray(w, dtype=float)
        u = u / np.linalg.norm(u)
        w = w - (w @ u) * u
        nw = np.linalg.norm(w)
        if nw < 1e-9:
            raise BadParam("frame vectors are (nearly) parallel")
        w = w / nw
        # one more pass for orthogonality at the 1e-16 level
        w = w - (w @ u) * u
        w = w / np.linalg.norm(w)
        return cls(u, w)

    @property
    def dim(self) -> int:
        return len(self.u)

    def direction(self, angle: float) -> np.ndarray:
        return math.cos(angle) * self.u + math.sin(angle) * self.w


@dataclass
class Fan:
    frame: FanFrame
    n: int
    psi: np.ndarray

    def __post_init__(self):
        self.psi = np.asarray(self.psi, dtype=float)
        if self.psi.shape != (self.n,):
            raise BadParam(f"expected {self.n} cut angles")
        if self.psi[0] != 0.0:
            raise BadParam("the first cut angle must be 0")
        gaps = np.diff(np.append(self.psi, TWO_PI))
        if np.any(gaps <= 0):
            raise BadParam("cut angles must increase strictly inside [0, 2pi)")

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(np.append(self.psi, TWO_PI))

    def cut_directions(self) -> np.ndarray:
        return np.array([self.frame.direction(a) for a in self.psi])

    def to_json(self) -> dict:
        return {"u": self.frame.u.tolist(), "w": self.frame.w.tolist(), "n": self.n, "psi": self.psi.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "Fan":
        try:
            return cls(FanFrame(data["u"], data["w"]), int(data["n"]), data["psi"])
        except (KeyError, TypeError) as exc:
            raise BadParam(f"malformed fan JSON: {exc}") from exc


@dataclass
class PartitionReport:
    kind: str
    tol: float
    angle_tol: float
    masses: list  # hard sector masses, one list of n per measure
    grouped: list  # masses of the 2k grouped sectors, per measure
    residual: list  # angle entries (arrangement kind) then antipodal differences of mu_2..mu_j
    # mu1_error: worst of |mu_1 block - a_t/n| and |mu_1(block t) - mu_1(block k+t)|
    mu1_error: float
    angle_residual: float
    passed: bool = False

    @property
    def residual_max(self) -> float:
        return max((abs(r) for r in self.residual), default=0.0)

    @property
    def score(self) -> float:
        """Worst tolerance ratio; the report passes iff score <= 1."""
        parts = [self.mu1_error / self.tol, self.angle_residual / self.angle_tol]
        parts += [abs(r) / self.tol for r in self.residual[self._n_angles():]]
        return max(parts)

    def _n_angles(self) -> int:
        return len(self.grouped[0]) // 2 if self.kind == "arrangement" else 0

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "tol": self.tol,
            "angle_tol": self.angle_tol,
            "masses": self.masses,
            "grouped_masses": self.grouped,
            "residual": self.residual,
            "residual_max": self.residual_max,
            "mu1_error": self.mu1_error,
            "angle_residual": self.angle_residual,
            "pass": self.passed,
        }


# -- projections and smoothed masses -----------------------------------------

def sector_angle(p, frame: FanFrame):
    """Angle in [0, 2pi) of p's projection to span{u, w}, or None if p is in L."""
    p = np.asarray(p, dtype=float)
    a, b = float(p @ frame.u), float(p @ frame.w)
    if math.hypot(a, b) < PROJ_EPS:
        return None
    return math.atan2(b, a) % TWO_PI


def _project(mu: MeasureCloud, frame: FanFrame, u=None, w=None):
    """Angles and weights of the points that do not project into L."""
    u = frame.u if u is None else u
    w = frame.w if w is None else w
    a = mu.points @ u
    b = mu.points @ w
    keep = np.hypot(a, b) >= PROJ_EPS
    lost = mu.weights[~keep].sum()
    if lost > DEGENERATE_WEIGHT:
        raise DegenerateProjection(f"weight {lost:.3g} projects onto the cut axis")
    theta = np.mod(np.arctan2(b[keep], a[keep]), TWO_PI)
    theta[theta >= TWO_PI] = 0.0
    return theta, mu.weights[keep]


def _kernel_cdf(y, sigma, density=False):
    """Cumulative wrapped-Gaussian kernel K with K' = wrapped density and K(y + 2pi) = K(y) + 1."""
    q = np.floor((y + math.pi) / TWO_PI)
    delta = y - TWO_PI * q
    # terms with |m| > M are below Phi(-9) for delta in [-pi, pi)
    M = max(0, math.ceil((9.0 * sigma / math.pi + 1.0) / 2.0) - 1)
    K = q + ndtr(delta / sigma)
    dens = np.exp(-0.5 * (delta / sigma) ** 2) if density else None
    for m in range(1, M + 1):
        K += ndtr((delta - TWO_PI * m) / sigma) - ndtr(-(delta + TWO_PI * m) / sigma)
        if density:
            dens += np.exp(-0.5 * ((delta - TWO_PI * m) / sigma) ** 2)
            dens += np.exp(-0.5 * ((delta + TWO_PI * m) / sigma) ** 2)
    if density:
        return K, dens / (sigma * math.sqrt(TWO_PI))
    return K


def _smoothed_cdf(x, theta, wts, sigma, density=False):
    """Smoothed mass of the arc (0, x) for each x in [0, 2pi], optionally with its derivative."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    base = _kernel_cdf(-theta, sigma) @ wts
    if not density:
        return _kernel_cdf(x[:, None] - theta[None, :], sigma) @ wts - base
    K, dens = _kernel_cdf(x[:, None] - theta[None, :], sigma, density=True)
    return K @ wts - base, dens @ wts


def _hard_cuts(theta, wts, targets):
    order = np.argsort(theta, kind="stable")
    th, cw = theta[order], np.cumsum(wts[order])
    nxt = np.append(th[1:], th[0] + TWO_PI)
    cuts = []
    for t in targets:
        i = min(int(np.searchsorted(cw, t - 1e-15)), len(th) - 1)
        if i > 0 and abs(cw[i - 1] - t) < abs(cw[i] - t):
            i -= 1
        cuts.append(0.5 * (th[i] + nxt[i]))
    return np.array(cuts)


def _equipartition_angles(theta, wts, n, sigma):
    total = float(wts.sum())
    if n == 1:
        return np.zeros(1)
    targets = total * np.arange(1, n) / n
    if sigma > 0:
        lo = np.zeros(n - 1)
        hi = np.full(n - 1, TWO_PI)
        x = np.clip(_hard_cuts(theta, wts, targets), 1e-9, TWO_PI - 1e-9)
        for _ in range(200):
            F, g = _smoothed_cdf(x, theta, wts, sigma, density=True)
            f = F - targets
            lo = np.where(f < 0, x, lo)
            hi = np.where(f > 0, x, hi)
            with np.errstate(divide="ignore", invalid="ignore"):
                newton = x - f / g
            ok = (g > 0) & (newton > lo) & (newton < hi)
            step = np.where(ok, newton, 0.5 * (lo + hi)) - x
            x = x + step
            if np.all(np.abs(step) <= 1e-12):
                break
        f = _smoothed_cdf(x, theta, wts, sigma) - targets
        if np.any(np.abs(f) > 1e-10):
            raise ImproperMeasure("smoothed circular distribution cannot be inverted (density vanishes)")
        psi = np.concatenate([[0.0], x])
    else:
        if len(wts) == 0 or wts.max() > total / n * (1 + 1e-9):
            raise ImproperMeasure("an atom carries more than 1/n of the mass; hard equipartition impossible")
        cuts = _hard_cuts(theta, wts, targets)
        psi = np.concatenate([[0.0], cuts])
    if np.any(np.diff(np.append(psi, TWO_PI)) < MIN_GAP):
        raise ImproperMeasure("equipartition cuts collapse; the measure is not proper")
    return psi


def _masses(psi, theta, wts, sigma):
    n = len(psi)
    if sigma > 0:
        F = _smoothed_cdf(np.append(psi, TWO_PI), theta, wts, sigma)
        return np.diff(F)
    idx = np.searchsorted(psi, theta, side="right") - 1
    return np.bincount(idx, weights=wts, minlength=n)[:n]


def equipartition_fan(frame: FanFrame, mu1: MeasureCloud, n: int, sigma: float = 0.0) -> Fan:
    if n < 1:
        raise BadParam("a fan needs at least one cut")
    if sigma < 0:
        raise BadParam("sigma must be non-negative")
    theta, wts = _project(mu1, frame)
    return Fan(frame, n, _equipartition_angles(theta, wts, n, sigma))


def sector_masses(fan: Fan, mu: MeasureCloud, sigma: float = 0.0) -> np.ndarray:
    theta, wts = _project(mu, fan.frame)
    return _masses(fan.psi, theta, wts, sigma)


# -- test maps and residuals -------------------------------------------------

def test_map_F(frame: FanFrame, measures, n: int, sigma: float = 0.0) -> np.ndarray:
    """(mu_i(O_t) - 1/n) over t = 1..n for i = 2..j, sectors from the mu_1 equipartition."""
    if not measures:
        raise BadParam("need at least one measure")
    fan = equipartition_fan(frame, measures[0], n, sigma)
    blocks = [sector_masses(fan, mu, sigma) - 1.0 / n for mu in measures[1:]]
    return np.concatenate(blocks) if blocks else np.zeros(0)


def test_map_H(frame: FanFrame, measures, n: int, sigma: float = 0.0) -> np.ndarray:
    """Angle gaps minus 2pi/n, followed by the blocks of :func:`test_map_F`."""
    fan = equipartition_fan(frame, measures[0], n, sigma)
    blocks = [fan.gaps - TWO_PI / n]
    blocks += [sector_masses(fan, mu, sigma) - 1.0 / n for mu in measures[1:]]
    return np.concatenate(blocks)


def _antipodal_differences(block_values: np.ndarray, ration: Ration) -> np.ndarray:
    """Per row: sum over block t minus sum over block k+t, t = 1..k."""
    groups = ration.blocks()
    k = ration.k
    sums = np.stack([block_values[:, list(g)].sum(axis=1) for g in groups], axis=1)
    return (sums[:, :k] - sums[:, k:]).reshape(-1)


def wrap_angle(x):
    return np.mod(np.asarray(x) + math.pi, TWO_PI) - math.pi


def _angle_entries(psi: np.ndarray, ration: Ration) -> np.ndarray:
    half = ration.n // 2
    b = np.array(ration.boundaries())
    return wrap_angle(psi[b + half] - psi[b] - math.pi)


def residual_fan(frame: FanFrame, measures, ration: Ration, sigma: float = 0.0) -> np.ndarray:
    if len(measures) < 2:
        raise BadParam("the fan residual needs j >= 2 measures")
    x = test_map_F(frame, measures, ration.n, sigma).reshape(len(measures) - 1, ration.n)
    return _antipodal_differences(x, ration)


def residual_arrangement(frame: FanFrame, measures, ration: Ration, sigma: float = 0.0) -> np.ndarray:
    fan = equipartition_fan(frame, measures[0], ration.n, sigma)
    parts = [_angle_entries(fan.psi, ration)]
    if len(measures) > 1:
        x = np.stack([sector_masses(fan, mu, sigma) - 1.0 / ration.n for mu in measures[1:]])
        parts.append(_antipodal_differences(x, ration))
    return np.concatenate(parts)


# -- verification ------------------------------------------------------------

def verify(fan: Fan, measures, ration: Ration, tol: float = 1e-3, kind: str = "fan",
           angle_tol: float | None = None) -> PartitionReport:
    """Hard-assignment check of the alpha-partition conditions for a given fan."""
    if kind not in ("fan", "arrangement"):
        raise BadParam(f"unknown kind {kind!r}")
    if fan.n != ration.n:
        raise BadParam(f"fan has {fan.n} cuts but the ration needs {ration.n}")
    angle_tol = tol if angle_tol is None else angle_tol
    masses = np.stack([sector_masses(fan, mu, 0.0) for mu in measures])
    groups = ration.blocks()
    grouped = np.stack([masses[:, list(g)].sum(axis=1) for g in groups], axis=1)
    alphas = np.array([float(a) for a in ration.alphas])
    k = ration.k
    diffs = (grouped[:, :k] - grouped[:, k:])
    mu1_error = float(max(np.max(np.abs(grouped[0] - alphas)), np.max(np.abs(diffs[0]))))
    diffs = diffs[1:].reshape(-1)
    residual = []
    angle_res = 0.0
    if kind == "arrangement":
        ang = _angle_entries(fan.psi, ration)
        angle_res = float(np.max(np.abs(ang)))
        residual.extend(float(a) for a in ang)
    residual.extend(float(x) for x in diffs)
    ok = mu1_error <= tol and angle_res <= angle_tol and all(abs(x) <= tol for x in diffs)
    return PartitionReport(kind, tol, angle_tol, masses.tolist(), grouped.tolist(), residual,
                           mu1_error, angle_res, bool(ok))


# -- dihedral action on configurations ---------------------------------------

def dihedral_act_on_config(element, frame: FanFrame, mu1: MeasureCloud, n: int, sigma: float = 0.0) -> FanFrame:
    """Frame of the fan relabeled by eps^a sigma^b, element = (a, b).

    eps moves the last cut to the front: (v_1..v_n) -> (v_n, v_1, .., v_{n-1}).
    The reflection keeps v_1 and reverses the orientation, so sector t goes
    to sector n+1-t.
    """
    a, b = element
    out = frame
    if b % 2:
        out = FanFrame(out.u, -out.w)
    for _ in range(a % n):
        fan = equipartition_fan(out, mu1, n, sigma)
        last = fan.psi[-1]
        c, s = math.cos(last), math.sin(last)
        out = FanFrame.from_vectors(c * out.u + s * out.w, -s * out.u + c * out.w)
    return out


# -- solver ------------------------------------------------------------------

@dataclass
class SolverConfig:
    seed: int = 0
    restarts: int = 64
    sigmas: tuple = (0.2, 0.05, 0.0125)
    tol: float = 1e-3
    angle_tol: float | None = None
    max_evals: int = 200_000
    fd_step: float = 1e-5
    max_iter: int = 200
    threads: int | None = None
    designated: int = 0


@dataclass
class _RestartResult:
    index: int
    fan: Fan | None
    report: PartitionReport | None
    evals: int
    note: str = ""

    @property
    def key(self):
        score = self.report.score if self.report is not None else math.inf
        return (score, self.index)


class _Degenerate(Exception):
    pass


class _Objective:
    def __init__(self, kind, measures, ration, sigma):
        self.kind = kind
        self.measures = measures
        self.ration = ration
        self.sigma = sigma
        self.d = measures[0].dim
        self.evals = 0

    def frame(self, p) -> FanFrame:
        d = self.d
        u = p[:d] / np.linalg.norm(p[:d])
        w = p[d:] - (p[d:] @ u) * u
        nw = np.linalg.norm(w)
        if nw < 1e-9:
            raise _Degenerate("frame collapsed")
        w = w / nw
        w = w - (w @ u) * u
        return FanFrame(u, w / np.linalg.norm(w))

    def __call__(self, p) -> np.ndarray:
        self.evals += 1
        frame = self.frame(p)
        try:
            if self.kind == "fan":
                return residual_fan(frame, self.measures, self.ration, self.sigma)
            return residual_arrangement(frame, self.measures, self.ration, self.sigma)
        except ImproperMeasure as exc:
            raise _Degenerate(str(exc)) from exc


def _retract(p, d):
    u = p[:d] / np.linalg.norm(p[:d])
    w = p[d:] - (p[d:] @ u) * u
    return np.concatenate([u, w / np.linalg.norm(w)])


def _levenberg_marquardt(obj: _Objective, p, target, cfg: SolverConfig, budget: int):
    """Damped Gauss-Newton on the 2d frame coordinates with retraction after each step."""
    d = obj.d
    h = cfg.fd_step
    r = obj(p)
    f = float(r @ r)
    lam = 1e-3
    for _ in range(cfg.max_iter):
        if np.max(np.abs(r)) <= target or obj.evals >= budget:
            break
        J = np.empty((len(r), 2 * d))
        for i in range(2 * d):
            e = np.zeros(2 * d)
            e[i] = h
            J[:, i] = (obj(p + e) - obj(p - e)) / (2 * h)
        JJt = J @ J.T
        improved = False
        while lam < 1e10 and obj.evals < budget:
            step = -J.T @ np.linalg.solve(JJt + lam * np.eye(len(r)), r)
            nrm = np.linalg.norm(step)
            if nrm > 0.5:
                step *= 0.5 / nrm
            q = _retract(p + step, d)
            try:
                rq = obj(q)
            except _Degenerate:
                lam *= 4
                continue
            fq = float(rq @ rq)
            if fq < f:
                p, r, f = q, rq, fq
                lam = max(lam / 3, 1e-12)
                improved = True
                break
            lam *= 4
        if not improved:
            break
    return p, r


def _hard_check(p, kind, measures, ration, sigma, cfg, angle_tol):
    frame = _Objective(kind, measures, ration, sigma).frame(p)
    fan = equipartition_fan(frame, measures[0], ration.n, sigma)
    return fan, verify(fan, measures, ration, cfg.tol, kind, angle_tol)


def _run_restart(index, seed_seq, kind, measures, ration, cfg: SolverConfig, angle_tol) -> _RestartResult:
    rng = np.random.default_rng(seed_seq)
    d = measures[0].dim
    p = _retract(rng.standard_normal(2 * d), d)
    evals = 0
    sigmas = list(cfg.sigmas)
    best = None
    s_i = 0
    while s_i < len(sigmas):
        sigma = sigmas[s_i]
        obj = _Objective(kind, measures, ration, sigma)
        last = s_i >= len(cfg.sigmas) - 1
        target = 1e-12 if last else 1e-6
        try:
            p, _ = _levenberg_marquardt(obj, p, target, cfg, cfg.max_evals - evals)
        except _Degenerate as exc:
            evals += obj.evals
            if best is None:
                return _RestartResult(index, None, None, evals, f"degenerate fan: {exc}")
            break
        evals += obj.evals
        if last:
            try:
                fan, report = _hard_check(p, kind, measures, ration, sigma, cfg, angle_tol)
            except (ImproperMeasure, _Degenerate) as exc:
                if best is None:
                    return _RestartResult(index, None, None, evals, str(exc))
                break
            if best is None or report.score < best[1].score:
                best = (fan, report)
            # the hard residual carries a smoothing bias of order sigma; keep
            # annealing (at most three more stages) while it eats over half the tolerance
            if best[1].score > 0.5 and len(sigmas) < len(cfg.sigmas) + 3 and evals < cfg.max_evals:
                sigmas.append(sigma / 4)
        s_i += 1
    return _RestartResult(index, best[0], best[1], evals)


def _thread_count(cfg: SolverConfig) -> int:
    if cfg.threads:
        return max(1, int(cfg.threads))
    env = os.environ.get("ARRLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise BadParam(f"ARRLAB_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def solve(kind: str, measures, ration: Ration, config: SolverConfig | None = None) -> tuple[Fan, PartitionReport]:
    """Multistart search for an alpha-partition by a fan or a fan-position arrangement.

    Restarts are processed in index order; the search stops at the first
    restart whose hard-assignment report passes, and the returned fan is the
    best (score, index) among restarts up to that one.  Raises
    :class:`BestEffort` when no restart passes.
    """
    cfg = config or SolverConfig()
    if kind not in ("fan", "arrangement"):
        raise BadParam(f"unknown kind {kind!r}")
    measures = list(measures)
    if not measures:
        raise BadParam("need at least one measure")
    if not 0 <= cfg.designated < len(measures):
        raise BadParam("designated measure index out of range")
    if cfg.designated:
        measures.insert(0, measures.pop(cfg.designated))
    d = measures[0].dim
    if any(mu.dim != d for mu in measures):
        raise BadParam("all measures must live on the same sphere")
    j, k = len(measures), ration.k
    if not cfg.sigmas or any(s < 0 for s in cfg.sigmas):
        raise BadParam("sigma schedule must be non-empty and non-negative")
    angle_tol = cfg.tol if cfg.angle_tol is None else cfg.angle_tol
    constraints = k * (j - 1) if kind == "fan" else k * j
    if not constraints < d - 1:
        warnings.warn(
            f"{constraints} constraints with d-1 = {d - 1}: existence of a partition is not guaranteed",
            stacklevel=2,
        )

    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    if kind == "fan" and j == 1:
        # no constraints: any mu_1-equipartition fan works; prefer exact quantile cuts
        frame = FanFrame.from_vectors(*np.random.default_rng(seeds[0]).standard_normal((2, d)))
        try:
            fan = equipartition_fan(frame, measures[0], ration.n, 0.0)
        except ImproperMeasure:
            fan = equipartition_fan(frame, measures[0], ration.n, cfg.sigmas[-1])
        report = verify(fan, measures, ration, cfg.tol, kind, angle_tol)
        if not report.passed:
            raise BestEffort("equipartition misses the tolerance (atoms too heavy)", fan, report)
        return fan, report

    # restarts run in waves of `threads` so nothing past the first pass is wasted;
    # results are consumed in index order, which keeps the output schedule-independent
    threads = _thread_count(cfg)
    results = []
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for start in range(0, len(seeds), threads):
            wave = [pool.submit(_run_restart, i, seeds[i], kind, measures, ration, cfg, angle_tol)
                    for i in range(start, min(start + threads, len(seeds)))]
            hit = False
            for fut in wave:
                res = fut.result()
                results.append(res)
                if res.report is not None and res.report.passed:
                    hit = True
                    break
            if hit:
                break
    done = [r for r in results if r.report is not None]
    if not done:
        raise BestEffort("every restart degenerated", None, None)
    best = min(done, key=lambda r: r.key)
    if not best.report.passed:
        raise BestEffort(
            f"no restart reached tol={cfg.tol} (best score {best.report.score:.3g})", best.fan, best.report
        )
    return best.fan, best.report


# keep pytest from collecting these when imported into test modules
test_map_F.__test__ = False
test_map_H.__test__ = False


# -- fixtures ------------------------------------------------------------------

def vmf_cloud(mean, kappa: float, size: int, seed) -> MeasureCloud:
    """Equal-weight sample of a von Mises-Fisher distribution."""
    from scipy.stats import vonmises_fisher

    mean = np.asarray(mean, dtype=float)
    mean = mean / np.linalg.norm(mean)
    pts = vonmises_fisher(mean, kappa).rvs(size, random_state=np.random.default_rng(seed))
    return MeasureCloud.from_arrays(pts)


def mixed_cloud(mean, kappa: float, size: int, seed, uniform_share: float = 0.5) -> MeasureCloud:
    """vMF sample blended with a uniform spherical sample, so every arc of every projection carries mass."""
    rng = np.random.default_rng(seed)
    mean = np.asarray(mean, dtype=float)
    n_uni = int(round(size * uniform_share))
    from scipy.stats import vonmises_fisher

    peak = vonmises_fisher(mean / np.linalg.norm(mean), kappa).rvs(size - n_uni, random_state=rng)
    flat = rng.standard_normal((n_uni, len(mean)))
    return MeasureCloud.from_arrays(np.vstack([peak, flat]))


def load_fan(path) -> Fan:
    with open(path) as fh:
        return Fan.from_json(json.load(fh))
