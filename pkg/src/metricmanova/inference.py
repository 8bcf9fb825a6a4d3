"""Test statistics and the seven group-difference tests.

Statistic families
------------------
* Variance/covariance ANOVA triples (F, U, T) per space and per space pair:
  F contrasts the pooled moment with the group-weighted moment, U is the
  weighted sum of squared pairwise group differences scaled by moment
  variances, and T combines both into a statistic that is asymptotically
  chi-square with J-1 degrees of freedom under the null.
* R statistics: Riemannian distances (Euc/AIRM/LERM) between the pooled and
  group-weighted covariance matrices, and weighted pairwise distances between
  group covariance or correlation matrices.
* Pillai adaptations: ``pillai_adapted`` compares the group-weighted to the
  pooled covariance matrix via S - tr(Sigma_g Sigma_p^-1); ``pillai_distance``
  is the classical Pillai-Bartlett trace applied to the per-group distance
  profile, with the standard F approximation.

Tests
-----
``R_Euc``/``R_AIRM``/``R_LERM`` combine three permutation p-values (mean,
covariance, correlation) with a Bonferroni correction at level alpha/3.
``T_FA`` compares each of the S(S+1)/2 ANOVA statistics against the
chi-square upper quantile at level 2*alpha/(S(S+1)); ``T_FA_perm`` compares
the same statistics against their permutation distributions.  ``Pillai`` is
permutation-calibrated at level alpha and ``Pillai_d`` uses the F
approximation.

Permutation p-values use the add-one estimator (1 + #{perm >= obs})/(B + 1),
with one set of label shuffles shared by all components of a test.  Replicate
``b``'s shuffle is drawn from an independent stream derived from ``(seed, b)``,
so p-values depend only on the data, the seed, and B.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from .distributions import chi2_sf, chi2_upper_quantile, f_sf
from .engine import DEGENERATE_REL_TOL, MomentStack, StatEngine
from .errors import DegenerateDataError, SingularMatrixError, UnstableStatisticError
from .estimators import MomentSet
from .rng import check_seed, permuted_labels
from .samples import GroupedMultiSample
from .spd import (
    SPD_FLOOR_REL,
    SPD_KINDS,
    spd_distance,
    stack_airm_sq,
    stack_matrix_log,
)

TEST_NAMES = ("R_Euc", "R_AIRM", "R_LERM", "T_FA", "T_FA_perm", "Pillai", "Pillai_d")
R_TARGETS = ("mean", "cov", "cor")

_PERM_TESTS = frozenset({"R_Euc", "R_AIRM", "R_LERM", "T_FA_perm", "Pillai"})
_MAX_DEGENERATE_FRACTION = 0.2


@dataclass(frozen=True)
class ComponentResult:
    """One component of a test: its statistic and how it was judged."""

    name: str
    statistic: float
    p_value: Optional[float]
    threshold: Optional[float]
    level: float
    reject: bool


@dataclass(frozen=True)
class TestReport:
    """Outcome of one of the seven tests on one multisample."""

    test_name: str
    components: Tuple[ComponentResult, ...]
    alpha: float
    global_reject: bool
    permutations_used: int
    seed: Optional[int]


# -- stacked statistic evaluation (shared by observed and permuted paths) ----


def _fa_stack(
    mom: MomentStack, pooled_cov: np.ndarray, n: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """F, U, T matrices (L, S, S) plus validity mask; diagonal = per-space stats."""
    L, J = mom.counts.shape
    F = pooled_cov[None, :, :] - mom.weighted_cov
    V = mom.moment_var
    scale = np.maximum(mom.prod_sqmean, 1.0e-300)
    degen = V <= DEGENERATE_REL_TOL * scale
    valid = ~np.any(degen, axis=1)
    Vs = np.where(degen, 1.0, V)
    g = mom.gammas
    cov = mom.group_cov
    U = np.zeros_like(F)
    for j in range(J):
        for jp in range(j + 1, J):
            w = (g[:, j] * g[:, jp])[:, None, None]
            diff = cov[:, j] - cov[:, jp]
            U += w * diff * diff / (Vs[:, j] * Vs[:, jp])
    den_u = np.einsum("lj,ljst->lst", g, 1.0 / Vs)
    den_f = np.einsum("lj,ljst->lst", g * g, Vs)
    T = n * U / den_u + n * F * F / den_f
    U = np.where(valid, U, np.nan)
    T = np.where(valid, T, np.nan)
    return F, U, T, valid


def _ridge_stack(mats: np.ndarray) -> np.ndarray:
    dim = mats.shape[-1]
    eps = 1.0e-10 * np.einsum("...ss->...", mats) / dim
    return mats + eps[..., None, None] * np.eye(dim)


def _pair_weights(gammas: np.ndarray, j: int, jp: int) -> np.ndarray:
    return gammas[:, j] * gammas[:, jp]


def _r_stack(
    mom: MomentStack,
    pooled_cov: np.ndarray,
    kinds: Iterable[str],
    targets: Iterable[str],
    *,
    ridge: bool = False,
) -> Dict[Tuple[str, str], Tuple[np.ndarray, np.ndarray]]:
    """(values, validity) per (kind, target) over the labeling stack."""
    kinds = tuple(kinds)
    targets = tuple(targets)
    L, J = mom.counts.shape
    S = pooled_cov.shape[0]
    eye = np.eye(S)

    weighted = mom.weighted_cov
    group_cov = mom.group_cov
    need_cor = "cor" in targets
    if need_cor:
        if mom.group_cor is None:
            raise ValueError("correlation matrices were not computed")
        cor_ok = mom.cor_valid.all(axis=1)
        group_cor = np.where(mom.cor_valid[:, :, None, None], mom.group_cor, eye)
    pooled = pooled_cov
    if ridge:
        pooled = _ridge_stack(pooled_cov[None])[0]
        weighted = _ridge_stack(weighted)
        group_cov = _ridge_stack(group_cov)
        if need_cor:
            group_cor = _ridge_stack(group_cor)

    out: Dict[Tuple[str, str], Tuple[np.ndarray, np.ndarray]] = {}

    def _target_mats(target):
        if target == "mean":
            return None
        return group_cov if target == "cov" else group_cor

    def _target_valid(target):
        if target == "cor":
            return cor_ok.copy()
        return np.ones(L, dtype=bool)

    if "Euc" in kinds:
        for target in targets:
            if target == "mean":
                vals = np.linalg.norm(pooled[None] - weighted, axis=(1, 2))
            else:
                mats = _target_mats(target)
                vals = np.zeros(L)
                for j in range(J):
                    for jp in range(j + 1, J):
                        d = np.linalg.norm(mats[:, j] - mats[:, jp], axis=(1, 2))
                        vals += _pair_weights(mom.gammas, j, jp) * d
            out[("Euc", target)] = (vals, _target_valid(target))

    if "AIRM" in kinds:
        for target in targets:
            if target == "mean":
                A = np.broadcast_to(pooled, weighted.shape)
                sq, ok = stack_airm_sq(A, weighted)
                vals = np.sqrt(sq)
            else:
                mats = _target_mats(target)
                vals = np.zeros(L)
                ok = _target_valid(target)
                for j in range(J):
                    for jp in range(j + 1, J):
                        sq, pair_ok = stack_airm_sq(mats[:, j], mats[:, jp])
                        ok &= pair_ok
                        vals += _pair_weights(mom.gammas, j, jp) * np.sqrt(sq)
            if target == "cor":
                ok = ok & cor_ok
            out[("AIRM", target)] = (vals, ok)

    if "LERM" in kinds:
        log_pooled, pooled_ok = stack_matrix_log(pooled[None])
        log_pooled, pooled_ok = log_pooled[0], bool(pooled_ok[0])
        logs_cache: Dict[str, Tuple[np.ndarray, np.ndarray]] = {}

        def _logs(target):
            if target not in logs_cache:
                mats = _target_mats(target)
                logs, ok = stack_matrix_log(mats)
                logs_cache[target] = (logs, ok.all(axis=1))
            return logs_cache[target]

        for target in targets:
            if target == "mean":
                logs_w, ok = stack_matrix_log(weighted)
                vals = np.linalg.norm(log_pooled[None] - logs_w, axis=(1, 2))
                ok = ok & pooled_ok
            else:
                logs, ok = _logs(target)
                vals = np.zeros(L)
                for j in range(J):
                    for jp in range(j + 1, J):
                        d = np.linalg.norm(logs[:, j] - logs[:, jp], axis=(1, 2))
                        vals += _pair_weights(mom.gammas, j, jp) * d
            if target == "cor":
                ok = ok & cor_ok
            out[("LERM", target)] = (vals, ok)

    return out


def _pooled_inverse(pooled_cov: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvalsh(pooled_cov)
    if w[0] <= SPD_FLOOR_REL * max(float(w[-1]), 0.0):
        raise SingularMatrixError(
            f"pooled covariance matrix is singular (eigenvalue {w[0]:.6e})"
        )
    return np.linalg.inv(pooled_cov)


def _pillai_stack(mom: MomentStack, pooled_inv: np.ndarray) -> np.ndarray:
    S = pooled_inv.shape[0]
    return S - np.einsum("lst,ts->l", mom.weighted_cov, pooled_inv)


def _pillai_trace(
    counts: np.ndarray, col_mean: np.ndarray, centered_cov: np.ndarray, n: int
) -> float:
    """Classical one-way Pillai trace from group column means and scatters."""
    grand = counts @ col_mean / n
    dm = col_mean - grand[None, :]
    H = np.einsum("j,js,jt->st", counts, dm, dm)
    E = np.einsum("j,jst->st", counts, centered_cov)
    try:
        V = float(np.trace(np.linalg.solve(H + E, H)))
    except np.linalg.LinAlgError as exc:
        raise DegenerateDataError(f"singular total scatter matrix: {exc}") from exc
    return V


def _pillai_f_approx(V: float, S: int, J: int, n: int) -> Tuple[float, int, int, float]:
    p, q = S, J - 1
    s = min(p, q)
    m = (abs(p - q) - 1) / 2.0
    r = (n - J - p - 1) / 2.0
    slack = s - V
    if slack <= 0.0:
        raise DegenerateDataError(
            f"Pillai trace {V} reached its bound {s}; F approximation undefined"
        )
    F = (2.0 * r + s + 1.0) * V / ((2.0 * m + s + 1.0) * slack)
    df1 = int(round(s * (2 * m + s + 1)))
    df2 = int(round(s * (2 * r + s + 1)))
    # the floor keeps reported p-values strictly positive under underflow
    return F, df1, df2, max(f_sf(F, df1, df2), 5e-324)


# -- public statistic operations ----------------------------------------------


def _fa_for(ms: GroupedMultiSample) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    if ms.n_groups < 2:
        raise ValueError("at least two groups are required")
    engine = StatEngine(ms)
    mom = engine.moments(ms.codes[None, :], want_cor=False, want_moment_var=True)
    F, U, T, valid = _fa_stack(mom, engine.pooled_cov, ms.n)
    return F[0], U[0], T[0], valid[0]


def anova_stats_variance(ms: GroupedMultiSample, s: int) -> Tuple[float, float, float]:
    """(F, U, T) for the variance comparison in space ``s`` (0-based)."""
    F, U, T, valid = _fa_for(ms)
    if not (0 <= s < ms.n_spaces):
        raise ValueError(f"space index {s} out of range")
    if not valid[s, s]:
        raise DegenerateDataError(
            f"degenerate moment variance for space {s}; T_{s + 1} undefined"
        )
    return float(F[s, s]), float(U[s, s]), float(T[s, s])


def anova_stats_covariance(
    ms: GroupedMultiSample, s: int, s2: int
) -> Tuple[float, float, float]:
    """(F, U, T) for the covariance comparison of spaces ``s`` and ``s2``."""
    if s == s2:
        raise ValueError("covariance statistics need two distinct spaces")
    F, U, T, valid = _fa_for(ms)
    for idx in (s, s2):
        if not (0 <= idx < ms.n_spaces):
            raise ValueError(f"space index {idx} out of range")
    if not valid[s, s2]:
        raise DegenerateDataError(
            f"degenerate moment variance for space pair ({s}, {s2}); "
            f"T_{s + 1}_{s2 + 1} undefined"
        )
    return float(F[s, s2]), float(U[s, s2]), float(T[s, s2])


def r_statistic(
    kind: str,
    target: str,
    moments: MomentSet,
    gammas: Optional[np.ndarray] = None,
    *,
    ridge: bool = False,
) -> float:
    """Riemannian comparison statistic.

    ``target="mean"`` measures d(pooled, group-weighted) covariance matrices;
    ``"cov"``/``"cor"`` sum gamma_j*gamma_j' d(M_j, M_j') over group pairs for
    the covariance and centered-correlation matrices respectively.
    """
    if kind not in SPD_KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {SPD_KINDS}")
    if target not in R_TARGETS:
        raise ValueError(f"unknown target {target!r}; expected one of {R_TARGETS}")
    if gammas is None:
        gammas = moments.gammas
    gammas = np.asarray(gammas, dtype=float)
    if target == "mean":
        return spd_distance(kind, moments.pooled_cov, moments.weighted_cov, ridge=ridge)
    mats = moments.group_cov if target == "cov" else moments.group_cor
    J = mats.shape[0]
    if gammas.shape != (J,):
        raise ValueError(f"gammas must have shape ({J},)")
    total = 0.0
    for j in range(J):
        for jp in range(j + 1, J):
            total += gammas[j] * gammas[jp] * spd_distance(
                kind, mats[j], mats[jp], ridge=ridge
            )
    return float(total)


def pillai_adapted(moments: MomentSet) -> float:
    """S - tr(Sigma_g Sigma_p^-1); near zero when groups share moments."""
    pooled_inv = _pooled_inverse(moments.pooled_cov)
    S = moments.n_spaces
    return float(S - np.trace(moments.weighted_cov @ pooled_inv))


def pillai_distance(ms: GroupedMultiSample) -> Tuple[float, float]:
    """Classical Pillai trace on the per-group distance profile, with the
    standard F-approximation p-value."""
    if ms.n_groups < 2:
        raise ValueError("at least two groups are required")
    if ms.n - ms.n_groups - ms.n_spaces < 1:
        raise ValueError(
            f"need n - J - S >= 1 (n={ms.n}, J={ms.n_groups}, S={ms.n_spaces})"
        )
    engine = StatEngine(ms)
    mom = engine.moments(ms.codes[None, :], want_cor=False, want_moment_var=False)
    V = _pillai_trace(mom.counts[0], mom.col_mean[0], mom.centered_cov[0], ms.n)
    _, _, _, p = _pillai_f_approx(V, ms.n_spaces, ms.n_groups, ms.n)
    return V, p


def permutation_pvalue(
    stat: Callable[[GroupedMultiSample], float],
    ms: GroupedMultiSample,
    B: int,
    seed: int,
) -> float:
    """Label-permutation p-value of an arbitrary statistic.

    Permutes the group labels B times (object vectors stay intact), counting
    permuted values >= the observed one; returns (1 + count)/(B + 1).
    Replicates on which ``stat`` reports degeneracy are dropped; more than
    20% of them aborts with :class:`UnstableStatisticError`.
    """
    if B < 1:
        raise ValueError(f"need at least one permutation, got B={B}")
    check_seed(seed)
    observed = float(stat(ms))
    count = 0
    valid = 0
    degenerate = 0
    for b in range(B):
        shuffled = ms.with_labels(permuted_labels(ms.labels, seed, b))
        try:
            value = float(stat(shuffled))
        except DegenerateDataError:
            degenerate += 1
            continue
        valid += 1
        if value >= observed:
            count += 1
    if degenerate > _MAX_DEGENERATE_FRACTION * B:
        raise UnstableStatisticError(
            f"{degenerate} of {B} permutation replicates were degenerate"
        )
    return (1 + count) / (valid + 1)


# -- the seven tests ----------------------------------------------------------


def _perm_p(observed: float, values: np.ndarray, valid: np.ndarray, name: str) -> float:
    valid = valid & np.isfinite(values)
    n_valid = int(valid.sum())
    B = values.shape[0]
    if B - n_valid > _MAX_DEGENERATE_FRACTION * B:
        raise UnstableStatisticError(
            f"component {name}: {B - n_valid} of {B} permutation replicates degenerate"
        )
    count = int(np.sum(values[valid] >= observed))
    return (1 + count) / (n_valid + 1)


def _fa_component_names(S: int) -> list:
    names = [f"T_{s + 1}" for s in range(S)]
    names += [f"T_{s + 1}_{t + 1}" for s in range(S) for t in range(s + 1, S)]
    return names


def _fa_values(T: np.ndarray, S: int) -> np.ndarray:
    """Flatten the (.., S, S) T matrix to (.., S(S+1)/2) component order."""
    cols = [T[..., s, s] for s in range(S)]
    cols += [T[..., s, t] for s in range(S) for t in range(s + 1, S)]
    return np.stack(cols, axis=-1)


def run_test(
    name: str,
    ms: GroupedMultiSample,
    alpha: float = 0.05,
    B: int = 500,
    seed: int = 0,
    *,
    ridge: bool = False,
) -> TestReport:
    """Run one of the seven tests and report components and the global decision."""
    return run_tests([name], ms, alpha=alpha, B=B, seed=seed, ridge=ridge)[0]


def run_tests(
    names: Sequence[str],
    ms: GroupedMultiSample,
    alpha: float = 0.05,
    B: int = 500,
    seed: int = 0,
    *,
    ridge: bool = False,
) -> list:
    """Run several tests on one multisample, sharing the permutation sweep.

    The permutation shuffles depend only on ``(seed, replicate)``, so the
    reports are identical to running each test separately with the same seed.
    """
    for name in names:
        if name not in TEST_NAMES:
            raise ValueError(f"unknown test {name!r}; expected one of {TEST_NAMES}")
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if ms.n_groups < 2:
        raise ValueError("at least two groups are required")
    seed = check_seed(seed)
    needs_perm = any(name in _PERM_TESTS for name in names)
    if needs_perm and B < 1:
        raise ValueError(f"need at least one permutation, got B={B}")

    S, J, n = ms.n_spaces, ms.n_groups, ms.n
    engine = StatEngine(ms)

    r_kinds = tuple(k for k in SPD_KINDS if f"R_{k}" in names)
    want_cor = bool(r_kinds)
    want_fa = "T_FA" in names or "T_FA_perm" in names
    want_pillai = "Pillai" in names
    want_pillai_d = "Pillai_d" in names

    obs_mom = engine.moments(
        ms.codes[None, :], want_cor=want_cor, want_moment_var=want_fa
    )

    # observed statistics, with strict degeneracy errors
    obs_r: Dict[Tuple[str, str], float] = {}
    if r_kinds:
        r_obs = _r_stack(obs_mom, engine.pooled_cov, r_kinds, R_TARGETS, ridge=ridge)
        for key, (vals, ok) in r_obs.items():
            if not ok[0] or not np.isfinite(vals[0]):
                raise SingularMatrixError(
                    f"component R_{key[1]}_{key[0]}: singular or degenerate matrix; "
                    "consider ridge repair"
                )
            obs_r[key] = float(vals[0])
    if want_fa:
        _, _, T_obs_mat, fa_valid = _fa_stack(obs_mom, engine.pooled_cov, n)
        fa_names = _fa_component_names(S)
        T_obs = _fa_values(T_obs_mat[0], S)
        bad = ~np.isfinite(T_obs)
        if np.any(bad):
            raise DegenerateDataError(
                f"component {fa_names[int(np.argmax(bad))]}: degenerate moment variance"
            )
    if want_pillai:
        pooled_inv = _pooled_inverse(engine.pooled_cov)
        pillai_obs = float(_pillai_stack(obs_mom, pooled_inv)[0])
    if want_pillai_d:
        V = _pillai_trace(obs_mom.counts[0], obs_mom.col_mean[0], obs_mom.centered_cov[0], n)
        _, _, _, pillai_d_p = _pillai_f_approx(V, S, J, n)

    # one shared permutation sweep for everything that needs one
    perm_tests = [name for name in names if name in _PERM_TESTS]
    perm_r: Dict[Tuple[str, str], Tuple[np.ndarray, np.ndarray]] = {}
    if perm_tests:
        stack = np.stack([permuted_labels(ms.codes, seed, b) for b in range(B)])
        perm_mom = engine.moments(
            stack,
            want_cor=want_cor,
            want_moment_var="T_FA_perm" in names,
        )
        if r_kinds:
            perm_r = _r_stack(perm_mom, engine.pooled_cov, r_kinds, R_TARGETS, ridge=ridge)
        if "T_FA_perm" in names:
            _, _, T_perm_mat, _ = _fa_stack(perm_mom, engine.pooled_cov, n)
            T_perm = _fa_values(T_perm_mat, S)
        if want_pillai:
            pillai_perm = _pillai_stack(perm_mom, pooled_inv)

    reports = []
    for name in names:
        components = []
        used = B if name in _PERM_TESTS else 0
        if name.startswith("R_"):
            kind = name[2:]
            level = alpha / 3.0
            for target in R_TARGETS:
                vals, ok = perm_r[(kind, target)]
                comp_name = f"R_{target}_{kind}" if target != "mean" else f"R_mu_{kind}"
                p = _perm_p(obs_r[(kind, target)], vals, ok, comp_name)
                components.append(
                    ComponentResult(
                        name=comp_name,
                        statistic=obs_r[(kind, target)],
                        p_value=p,
                        threshold=None,
                        level=level,
                        reject=p <= level,
                    )
                )
        elif name == "T_FA":
            level = 2.0 * alpha / (S * (S + 1))
            threshold = chi2_upper_quantile(J - 1, level)
            for comp_name, value in zip(_fa_component_names(S), T_obs):
                components.append(
                    ComponentResult(
                        name=comp_name,
                        statistic=float(value),
                        p_value=max(chi2_sf(float(value), J - 1), 5e-324),
                        threshold=threshold,
                        level=level,
                        reject=bool(value > threshold),
                    )
                )
        elif name == "T_FA_perm":
            level = 2.0 * alpha / (S * (S + 1))
            for k, comp_name in enumerate(_fa_component_names(S)):
                p = _perm_p(float(T_obs[k]), T_perm[:, k], np.isfinite(T_perm[:, k]), comp_name)
                components.append(
                    ComponentResult(
                        name=comp_name,
                        statistic=float(T_obs[k]),
                        p_value=p,
                        threshold=None,
                        level=level,
                        reject=p <= level,
                    )
                )
        elif name == "Pillai":
            p = _perm_p(pillai_obs, pillai_perm, np.isfinite(pillai_perm), "pillai")
            components.append(
                ComponentResult(
                    name="pillai",
                    statistic=pillai_obs,
                    p_value=p,
                    threshold=None,
                    level=alpha,
                    reject=p <= alpha,
                )
            )
        else:  # Pillai_d
            components.append(
                ComponentResult(
                    name="pillai_d",
                    statistic=float(V),
                    p_value=float(pillai_d_p),
                    threshold=None,
                    level=alpha,
                    reject=bool(pillai_d_p <= alpha),
                )
            )
        reports.append(
            TestReport(
                test_name=name,
                components=tuple(components),
                alpha=alpha,
                global_reject=any(c.reject for c in components),
                permutations_used=used,
                seed=seed,
            )
        )
    return reports
