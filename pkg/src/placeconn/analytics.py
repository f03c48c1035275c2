"""Log transforms, correlations, OLS with classical errors, distance-decay fits."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import polars as pl
from scipy import stats

from .errors import DataError
from .places import PlaceLevel, PlaceRegistry, haversine_miles


def log10_scaled(values, scale: float = 1.0) -> np.ndarray:
    """``log10(value * scale)`` elementwise; zeros must be dropped beforehand."""
    if not scale > 0:
        raise ValueError("scale must be positive")
    v = np.asarray(values, dtype=np.float64) * scale
    if np.any(~(v > 0)) or np.any(~np.isfinite(v)):
        raise ValueError("log transform needs positive, finite values after scaling")
    return np.log10(v)


def pearson_r(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d sequences of equal length")
    if x.size < 3:
        raise ValueError("need at least 3 pairs")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite values")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("zero variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def _oriented(df: pl.DataFrame, value: str) -> pl.DataFrame:
    """Both orientations of each pair: focal, partner, value."""
    a = df.select(focal=pl.col("place_i"), partner=pl.col("place_j"), v=pl.col(value))
    b = df.select(focal=pl.col("place_j"), partner=pl.col("place_i"), v=pl.col(value))
    return pl.concat([a, b]).filter(pl.col("focal") != pl.col("partner"))


@dataclass
class PairedSeries:
    keys: list[tuple[str, str]]
    x: np.ndarray
    y: np.ndarray
    excluded: int = 0  # pairs dropped for a non-positive value

    @property
    def n(self) -> int:
        return self.x.size


def join_pairs(a: pl.DataFrame, b: pl.DataFrame, a_col: str, b_col: str, scale_a: float = 1.0,
               scale_b: float = 1.0, log: bool = True) -> PairedSeries:
    """Align two pair tables on (place_i, place_j), keep pairs positive in both,
    and optionally log10-transform with the given scales."""
    j = a.select("place_i", "place_j", pl.col(a_col).alias("_a")).join(
        b.select("place_i", "place_j", pl.col(b_col).alias("_b")), on=["place_i", "place_j"], how="inner"
    ).sort("place_i", "place_j")
    pos = (pl.col("_a") > 0) & (pl.col("_b") > 0)
    kept = j.filter(pos)
    x = kept["_a"].to_numpy().astype(np.float64)
    y = kept["_b"].to_numpy().astype(np.float64)
    if log:
        x, y = log10_scaled(x, scale_a), log10_scaled(y, scale_b)
    keys = list(zip(kept["place_i"].to_list(), kept["place_j"].to_list()))
    return PairedSeries(keys, x, y, excluded=j.height - kept.height)


def per_place_correlation(
    a: pl.DataFrame,
    b: pl.DataFrame,
    a_col: str,
    b_col: str,
    scale_a: float = 1.0,
    scale_b: float = 1.0,
    log: bool = True,
    min_n: int = 3,
) -> tuple[dict[str, tuple[float, int]], dict[str, str]]:
    """Pearson r per focal place over its partners present (and positive) in both tables.

    Returns ``(results, omitted)`` where results maps place -> (r, n) and
    omitted maps place -> reason.
    """
    oa = _oriented(a, a_col).rename({"v": "va"})
    ob = _oriented(b, b_col).rename({"v": "vb"})
    j = oa.join(ob, on=["focal", "partner"], how="inner").filter((pl.col("va") > 0) & (pl.col("vb") > 0))
    all_places = sorted(set(oa["focal"].to_list()) | set(ob["focal"].to_list()))
    results: dict[str, tuple[float, int]] = {}
    omitted: dict[str, str] = {}
    groups = {k[0]: g for k, g in j.sort("focal", "partner").group_by(["focal"], maintain_order=True)}
    for place in all_places:
        g = groups.get(place)
        n = 0 if g is None else g.height
        if n < min_n:
            omitted[place] = f"only {n} partner(s) with both values"
            continue
        x = g["va"].to_numpy().astype(np.float64)
        y = g["vb"].to_numpy().astype(np.float64)
        if log:
            x, y = log10_scaled(x, scale_a), log10_scaled(y, scale_b)
        try:
            results[place] = (pearson_r(x, y), n)
        except ValueError as exc:
            omitted[place] = str(exc)
    return results, omitted


def _stars(p: float) -> str:
    if p < 0.01:
        return "***"
    if p < 0.05:
        return "**"
    if p < 0.1:
        return "*"
    return ""


@dataclass
class RegressionResult:
    names: list[str]
    coef: np.ndarray
    se: np.ndarray
    t: np.ndarray
    p: np.ndarray
    r2: float
    adj_r2: float
    n: int
    resid: np.ndarray = field(repr=False, default=None)

    def __getitem__(self, name: str) -> dict:
        k = self.names.index(name)
        return {"coef": float(self.coef[k]), "se": float(self.se[k]), "t": float(self.t[k]), "p": float(self.p[k])}

    def to_dict(self) -> dict:
        return {
            "coefficients": {
                name: {**self[name], "stars": _stars(float(self.p[k]))}
                for k, name in enumerate(self.names)
            },
            "r2": self.r2,
            "adj_r2": self.adj_r2,
            "n": self.n,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def table(self) -> str:
        """Aligned text table: coefficient with stars, SE, then adjusted R2 and n."""
        w = max(14, max(len(n) for n in self.names) + 2)
        lines = [f"{'':<{w}}{'Coefficient':>16}{'SE':>14}"]
        for k, name in enumerate(self.names):
            c = f"{self.coef[k]:.4g}{_stars(float(self.p[k]))}"
            lines.append(f"{name:<{w}}{c:>16}{self.se[k]:>14.4g}")
        lines.append(f"{'Adjusted R2':<{w}}{self.adj_r2:>16.2f}")
        lines.append(f"{'Observations':<{w}}{self.n:>16d}")
        lines.append("* p<0.1 ** p<0.05 *** p<0.01")
        return "\n".join(lines)


def ols(y, X, names: list[str] | None = None, intercept: bool = True) -> RegressionResult:
    """Ordinary least squares via QR with classical standard errors.

    ``X`` is ``(n, p)`` predictors (or 1-d for a single predictor); an
    intercept column is prepended unless ``intercept=False``.
    """
    y = np.asarray(y, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    if names is None:
        names = [f"x{k + 1}" for k in range(p)]
    if len(names) != p:
        raise ValueError("one name per predictor column")
    if intercept:
        X = np.column_stack([np.ones(n), X])
        names = ["Intercept", *names]
    k = X.shape[1]
    if y.shape != (n,):
        raise ValueError("y length must match X rows")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(X))):
        raise ValueError("non-finite values in regression inputs")
    df_resid = n - k
    if df_resid < 1:
        raise ValueError(f"need more observations than coefficients (n={n}, coefficients={k})")
    # QR on unit-norm columns so the rank test ignores column scale
    norms = np.linalg.norm(X, axis=0)
    if np.any(norms == 0):
        raise ValueError("predictor matrix is rank deficient")
    Q, R = np.linalg.qr(X / norms)
    diag = np.abs(np.diag(R))
    if diag.min() <= max(n, k) * np.finfo(float).eps * 16:
        raise ValueError("predictor matrix is rank deficient")
    beta = np.linalg.solve(R, Q.T @ y) / norms
    resid = y - X @ beta
    rss = float(resid @ resid)
    sigma2 = rss / df_resid
    Rinv = np.linalg.inv(R)
    cov = sigma2 * (Rinv @ Rinv.T) / np.outer(norms, norms)
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    tss = float(((y - y.mean()) ** 2).sum()) if intercept else float(y @ y)
    r2 = 1.0 - rss / tss if tss > 0 else 0.0
    adj = 1.0 - (1.0 - r2) * ((n - 1) if intercept else n) / df_resid
    with np.errstate(divide="ignore", invalid="ignore"):
        t = beta / se
    t[(se == 0) & (beta == 0)] = 0.0
    pval = 2.0 * stats.t.sf(np.abs(t), df_resid)
    return RegressionResult(list(names), beta, se, t, pval, r2, adj, n, resid)


def same_region_dummy(
    pairs: list[tuple[str, str]], registry: PlaceRegistry, region_level: PlaceLevel | str
) -> np.ndarray:
    """1 where both places roll up to the same ancestor at ``region_level``."""
    out = np.empty(len(pairs), dtype=np.int64)
    memo: dict[str, str] = {}

    def region(code):
        if code not in memo:
            r = registry.rollup(code, region_level)
            if r is None:
                raise DataError(f"place {code!r} has no ancestor at level {PlaceLevel.parse(region_level).value}")
            memo[code] = r
        return memo[code]

    for k, (a, b) in enumerate(pairs):
        out[k] = int(region(a) == region(b))
    return out


@dataclass
class DecayFit:
    amplitude: float
    exponent: float
    r2: float
    n: int

    def predict(self, dist) -> np.ndarray:
        return self.amplitude * np.asarray(dist, dtype=np.float64) ** self.exponent


def decay_fit(pci, dist) -> DecayFit:
    """Power law ``pci = a * dist**b`` fitted by OLS of log10(pci) on log10(dist)."""
    pci = np.asarray(pci, dtype=np.float64)
    dist = np.asarray(dist, dtype=np.float64)
    if pci.shape != dist.shape or pci.size < 3:
        raise ValueError("need at least 3 aligned (pci, distance) values")
    ly = log10_scaled(pci)
    lx = log10_scaled(dist)
    res = ols(ly, lx, names=["log_distance"])
    r2 = min(max(res.r2, 0.0), 1.0)
    return DecayFit(10.0 ** float(res.coef[0]), float(res.coef[1]), r2, int(pci.size))


# -- pair-table helpers used by the study commands ----------------------------

def focal_pairs(matrix: pl.DataFrame, focal: str, column: str = "pci") -> pl.DataFrame:
    """Rows touching ``focal`` as ``partner, value`` sorted by partner."""
    return (
        _oriented(matrix, column)
        .filter(pl.col("focal") == focal)
        .select("partner", value=pl.col("v"))
        .sort("partner")
    )


def pair_distances(pairs: list[tuple[str, str]], registry: PlaceRegistry) -> np.ndarray:
    codes = sorted({c for p in pairs for c in p})
    places = []
    for c in codes:
        pl_ = registry.get(c)
        if pl_ is None:
            raise DataError(f"place {c!r} not in registry")
        places.append(pl_)
    idx = {c: k for k, c in enumerate(codes)}
    lat = np.array([p.centroid[0] for p in places])
    lon = np.array([p.centroid[1] for p in places])
    a = np.array([idx[p[0]] for p in pairs], dtype=np.int64)
    b = np.array([idx[p[1]] for p in pairs], dtype=np.int64)
    return haversine_miles(lat[a], lon[a], lat[b], lon[b])

