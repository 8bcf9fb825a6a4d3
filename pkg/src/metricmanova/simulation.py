"""Simulation scenarios and the Monte Carlo rejection-rate harness.

Scenario 1 draws two groups of unit-variance Gaussians whose random locations
``(a, b)`` follow a bivariate normal; the five studies move the location mean,
the scale of ``b``, the correlation between ``a`` and ``b``, or all three at
once.  Scenario 2 draws random trees by degree-powered preferential attachment
together with node covariates whose Gamma distribution is tied to the final
node degrees, giving an intrinsic dependence between topology and covariates.

All generators are deterministic functions of their parameters and an integer
seed; replicate ``k`` of a sweep derives its seed from ``(seed, k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateDataError, UnstableStatisticError
from .inference import TEST_NAMES, run_tests
from .rng import DATA_STREAM, TEST_STREAM, check_seed, derive_rng, spawn_seed
from .samples import GroupedMultiSample
from .spaces import LaplacianMatrix, euclidean_space, gaussian_space, laplacian_space

_PATH_TOL = 1.0e-9


@dataclass(frozen=True)
class Scenario1Params:
    """Two groups of unit-variance Gaussians in two Wasserstein-2 spaces.

    Group 1 baseline: a ~ N(0, 0.5^2), b ~ N(0, 0.2^2), independent except in
    study 4 where cor(a, b) = sqrt(0.5).  Group 2 uses mean shift ``delta`` on
    a, scale ratio ``r`` on b's standard deviation, and correlation ``v``.
    Study 5 moves (delta, r, v) along the path (1-D)*(0,1,0) + D*(1,3,0.9).
    """

    study: int
    delta: float = 0.0
    r: float = 1.0
    v: float = 0.0
    n1: int = 100
    n2: int = 100

    def __post_init__(self):
        if self.study not in (1, 2, 3, 4, 5):
            raise ValueError(f"study must be 1..5, got {self.study}")
        if self.r <= 0:
            raise ValueError(f"scale ratio must be positive, got {self.r}")
        if abs(self.v) >= 1:
            raise ValueError(f"correlation must lie in (-1, 1), got {self.v}")
        if self.n1 < 2 or self.n2 < 2:
            raise ValueError("both groups need at least 2 observations")
        inactive = {
            1: self.r == 1.0 and self.v == 0.0,
            2: self.delta == 0.0 and self.v == 0.0,
            3: self.delta == 0.0 and self.r == 1.0,
            4: self.delta == 0.0 and self.r == 1.0,
        }
        if self.study in inactive and not inactive[self.study]:
            raise ValueError(
                f"study {self.study} varies one parameter; the others stay at "
                "their null values"
            )
        if self.study == 5:
            d = self.delta
            if abs(self.r - (1.0 + 2.0 * d)) > _PATH_TOL or abs(self.v - 0.9 * d) > _PATH_TOL:
                raise ValueError(
                    "study 5 requires (delta, r, v) on the composite path "
                    "(1-D)*(0,1,0) + D*(1,3,0.9)"
                )

    @property
    def group1_rho(self) -> float:
        return math.sqrt(0.5) if self.study == 4 else 0.0

    @classmethod
    def from_effect(cls, study: int, value: float, n1: int = 100, n2: int = 100) -> "Scenario1Params":
        """Parameters with the study's single moving parameter set to ``value``."""
        if study == 1:
            return cls(study=1, delta=value, n1=n1, n2=n2)
        if study == 2:
            return cls(study=2, r=value, n1=n1, n2=n2)
        if study in (3, 4):
            return cls(study=study, v=value, n1=n1, n2=n2)
        if study == 5:
            return cls(
                study=5,
                delta=value,
                r=1.0 + 2.0 * value,
                v=0.9 * value,
                n1=n1,
                n2=n2,
            )
        raise ValueError(f"study must be 1..5, got {study}")


@dataclass(frozen=True)
class Scenario2Params:
    """Two groups of random trees plus node covariates.

    ``gamma1``/``gamma2`` are the preferential-attachment exponents and
    ``nu1``/``nu2`` the covariate variances of groups 1 and 2.  Study 4 moves
    (gamma1, nu2) along (1-D)*(2.5,1) + D*(3,3).
    """

    study: int
    gamma1: float
    gamma2: float
    nu1: float = 1.0
    nu2: float = 1.0
    nodes: int = 10
    n1: int = 100
    n2: int = 100

    def __post_init__(self):
        if self.study not in (1, 2, 3, 4):
            raise ValueError(f"study must be 1..4, got {self.study}")
        if self.nu1 <= 0 or self.nu2 <= 0:
            raise ValueError("covariate variances must be positive")
        if self.nodes < 2:
            raise ValueError(f"need at least 2 nodes, got {self.nodes}")
        if self.n1 < 2 or self.n2 < 2:
            raise ValueError("both groups need at least 2 observations")

    @classmethod
    def from_effect(
        cls, study: int, value: float, nodes: int = 10, n1: int = 100, n2: int = 100
    ) -> "Scenario2Params":
        if study == 1:
            return cls(study=1, gamma1=value, gamma2=2.5, nodes=nodes, n1=n1, n2=n2)
        if study == 2:
            return cls(study=2, gamma1=value, gamma2=1.0, nodes=nodes, n1=n1, n2=n2)
        if study == 3:
            return cls(
                study=3, gamma1=2.5, gamma2=2.5, nu2=value, nodes=nodes, n1=n1, n2=n2
            )
        if study == 4:
            return cls(
                study=4,
                gamma1=2.5 + 0.5 * value,
                gamma2=2.5,
                nu1=1.0,
                nu2=1.0 + 2.0 * value,
                nodes=nodes,
                n1=n1,
                n2=n2,
            )
        raise ValueError(f"study must be 1..4, got {study}")


# study -> (parameter name, grid low, grid high, null value)
SCENARIO1_STUDIES = {
    1: ("delta", -1.0, 1.0, 0.0),
    2: ("r", 0.125, 3.0, 1.0),
    3: ("v", 0.0, 0.9, 0.0),
    4: ("v", 0.0, 0.9, math.sqrt(0.5)),
    5: ("Delta", 0.0, 1.0, 0.0),
}
SCENARIO2_STUDIES = {
    1: ("gamma1", 2.0, 3.0, 2.5),
    2: ("gamma1", -1.0, 2.0, 1.0),
    3: ("nu2", 0.125, 3.0, 1.0),
    4: ("Delta", 0.0, 1.0, 0.0),
}


def study_grid(scenario: int, study: int, points: int = 9) -> np.ndarray:
    """Evenly spaced parameter grid covering the study's range."""
    if points < 1:
        raise ValueError(f"grid needs at least one point, got {points}")
    table = SCENARIO1_STUDIES if scenario == 1 else SCENARIO2_STUDIES
    if scenario not in (1, 2) or study not in table:
        raise ValueError(f"unknown scenario/study ({scenario}, {study})")
    _, lo, hi, _ = table[study]
    return np.linspace(lo, hi, points)


def sample_bivariate_normal(
    mu: Tuple[float, float],
    sds: Tuple[float, float],
    rho: float,
    n: int,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray]:
    """n draws of (a, b) with the requested means, sds, and correlation.

    Generated as a = mu1 + s1*z1 and b = mu2 + s2*(rho*z1 + sqrt(1-rho^2)*z2)
    from independent standard normals.
    """
    if abs(rho) >= 1:
        raise ValueError(f"correlation must lie in (-1, 1), got {rho}")
    if sds[0] < 0 or sds[1] < 0:
        raise ValueError("standard deviations must be non-negative")
    z = rng.standard_normal((n, 2))
    a = mu[0] + sds[0] * z[:, 0]
    b = mu[1] + sds[1] * (rho * z[:, 0] + math.sqrt(1.0 - rho * rho) * z[:, 1])
    return a, b


def gen_scenario1(params: Scenario1Params, seed: int) -> GroupedMultiSample:
    """One scenario-1 dataset: two Wasserstein-2 Gaussian spaces, two groups."""
    rng = derive_rng(seed)
    a1, b1 = sample_bivariate_normal(
        (0.0, 0.0), (0.5, 0.2), params.group1_rho, params.n1, rng
    )
    a2, b2 = sample_bivariate_normal(
        (params.delta, 0.0), (0.5, 0.2 * params.r), params.v, params.n2, rng
    )
    a = np.concatenate([a1, a2])
    b = np.concatenate([b1, b2])
    ones = np.ones_like(a)
    space1 = gaussian_space("X1", np.column_stack([a, ones]))
    space2 = gaussian_space("X2", np.column_stack([b, ones]))
    labels = np.repeat([1, 2], [params.n1, params.n2])
    return GroupedMultiSample([space1, space2], labels)


def ba_graph(
    gamma: float, nodes: int, rng: np.random.Generator
) -> Tuple[LaplacianMatrix, np.ndarray]:
    """Random tree by degree-powered preferential attachment.

    Starting from a single node, each new node attaches by one edge to an
    existing node with probability proportional to degree**gamma; the second
    node necessarily attaches to the first.  Returns the graph Laplacian and
    the final degrees in construction order.
    """
    if nodes < 2:
        raise ValueError(f"need at least 2 nodes, got {nodes}")
    degrees = np.zeros(nodes, dtype=float)
    edges = [(0, 1)]
    degrees[0] = degrees[1] = 1.0
    for t in range(2, nodes):
        weights = degrees[:t] ** gamma
        cum = np.cumsum(weights)
        target = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
        edges.append((target, t))
        degrees[target] += 1.0
        degrees[t] = 1.0
    adj = np.zeros((nodes, nodes), dtype=float)
    for u, v in edges:
        adj[u, v] = adj[v, u] = 1.0
    lap = np.diag(adj.sum(axis=1)) - adj
    return LaplacianMatrix(lap), degrees


def gamma_covariates(
    final_degrees: np.ndarray, nu: float, rng: np.random.Generator
) -> np.ndarray:
    """Node covariates: independent Gamma draws with mean k_f and variance nu."""
    k = np.asarray(final_degrees, dtype=float)
    shape = k * k / nu
    scale = nu / k
    return rng.gamma(shape, scale)


def gen_scenario2(params: Scenario2Params, seed: int) -> GroupedMultiSample:
    """One scenario-2 dataset: Laplacian space plus node-covariate space."""
    rng = derive_rng(seed)
    nodes = params.nodes
    n = params.n1 + params.n2
    laps = np.empty((n, nodes, nodes), dtype=float)
    covs = np.empty((n, nodes), dtype=float)
    i = 0
    for gamma, nu, size in (
        (params.gamma1, params.nu1, params.n1),
        (params.gamma2, params.nu2, params.n2),
    ):
        for _ in range(size):
            lap, kf = ba_graph(gamma, nodes, rng)
            laps[i] = lap.entries
            covs[i] = gamma_covariates(kf, nu, rng)
            i += 1
    space1 = laplacian_space("topology", laps)
    space2 = euclidean_space("covariates", covs, norm="L2")
    labels = np.repeat([1, 2], [params.n1, params.n2])
    return GroupedMultiSample([space1, space2], labels)


def scenario_generator(
    scenario: int,
    study: int,
    value: float,
    n1: int = 100,
    n2: int = 100,
    nodes: int = 10,
) -> Callable[[int], GroupedMultiSample]:
    """A seeded generator for one scenario/study at one parameter value."""
    if scenario == 1:
        params1 = Scenario1Params.from_effect(study, value, n1=n1, n2=n2)
        return lambda seed: gen_scenario1(params1, seed)
    if scenario == 2:
        params2 = Scenario2Params.from_effect(study, value, nodes=nodes, n1=n1, n2=n2)
        return lambda seed: gen_scenario2(params2, seed)
    raise ValueError(f"unknown scenario {scenario}")


@dataclass(frozen=True)
class RejectionEstimate:
    """Monte Carlo rejection-rate estimate for one test at one parameter."""

    test_name: str
    parameter: Optional[float]
    rate: float
    mc_se: float
    nsims: int
    seed: int


def estimate_rejection_rates(
    test_names: Sequence[str],
    generator: Callable[[int], GroupedMultiSample],
    nsims: int,
    alpha: float = 0.05,
    B: int = 500,
    seed: int = 0,
    parameter: Optional[float] = None,
    *,
    ridge: bool = False,
) -> list:
    """Rejection proportion of several tests over seeded replicates.

    Replicate k generates its data with a seed derived from (seed, k) and runs
    every requested test on it, sharing one permutation sweep.  Replicates on
    which the test machinery reports degeneracy are dropped; more than 1% of
    them aborts the estimate.
    """
    if nsims < 1:
        raise ValueError(f"need at least one replicate, got nsims={nsims}")
    for name in test_names:
        if name not in TEST_NAMES:
            raise ValueError(f"unknown test {name!r}")
    seed = check_seed(seed)
    rejects = {name: 0 for name in test_names}
    errors = 0
    used = 0
    for k in range(nsims):
        ms = generator(spawn_seed(seed, DATA_STREAM, k))
        try:
            reports = run_tests(
                list(test_names),
                ms,
                alpha=alpha,
                B=B,
                seed=spawn_seed(seed, TEST_STREAM, k),
                ridge=ridge,
            )
        except DegenerateDataError:
            errors += 1
            continue
        used += 1
        for report in reports:
            rejects[report.test_name] += int(report.global_reject)
    if errors > 0.01 * nsims:
        raise UnstableStatisticError(
            f"{errors} of {nsims} simulation replicates were degenerate"
        )
    out = []
    for name in test_names:
        rate = rejects[name] / used
        out.append(
            RejectionEstimate(
                test_name=name,
                parameter=parameter,
                rate=rate,
                mc_se=math.sqrt(rate * (1.0 - rate) / used),
                nsims=used,
                seed=seed,
            )
        )
    return out


def estimate_rejection_rate(
    test_name: str,
    generator: Callable[[int], GroupedMultiSample],
    nsims: int,
    alpha: float = 0.05,
    B: int = 500,
    seed: int = 0,
    parameter: Optional[float] = None,
    *,
    ridge: bool = False,
) -> RejectionEstimate:
    """Single-test variant of :func:`estimate_rejection_rates`."""
    return estimate_rejection_rates(
        [test_name], generator, nsims, alpha=alpha, B=B, seed=seed,
        parameter=parameter, ridge=ridge,
    )[0]
