"""Independently written brute-force reference implementations.

These deliberately avoid the package's internals: plain Python loops, scipy
where convenient.  They exist so the fast library code can be checked against
straightforward transcriptions of the definitions.
"""

import numpy as np
import scipy.linalg
import scipy.stats


def oracle_medoid(dist, idx):
    """Medoid of the rows ``idx`` of a distance matrix, lowest index on ties."""
    best, best_obj = None, None
    for cand in idx:
        obj = sum(dist[cand, j] ** 2 for j in idx) / len(idx)
        if best_obj is None or obj < best_obj - 1e-15:
            best, best_obj = cand, obj
    return best


def oracle_profiles_from_matrices(dists, labels):
    """(per-group profile, pooled profile) for distance-matrix spaces."""
    n = len(labels)
    S = len(dists)
    per_group = np.zeros((n, S))
    pooled = np.zeros((n, S))
    everyone = list(range(n))
    for s, dist in enumerate(dists):
        pooled_medoid = oracle_medoid(dist, everyone)
        for i in everyone:
            pooled[i, s] = dist[i, pooled_medoid]
        for g in sorted(set(labels)):
            idx = [i for i in everyone if labels[i] == g]
            medoid = oracle_medoid(dist, idx)
            for i in idx:
                per_group[i, s] = dist[i, medoid]
    return per_group, pooled


def oracle_profiles_euclidean(columns, labels):
    """(per-group, pooled) profiles for a list of (n, k) coordinate arrays."""
    n = len(labels)
    S = len(columns)
    per_group = np.zeros((n, S))
    pooled = np.zeros((n, S))
    for s, pts in enumerate(columns):
        pts = np.asarray(pts, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        grand = pts.mean(axis=0)
        for i in range(n):
            pooled[i, s] = np.linalg.norm(pts[i] - grand)
        for g in sorted(set(labels)):
            idx = [i for i in range(n) if labels[i] == g]
            center = pts[idx].mean(axis=0)
            for i in idx:
                per_group[i, s] = np.linalg.norm(pts[i] - center)
    return per_group, pooled


def oracle_fa_stats(per_group, pooled, labels):
    """F, U, T for every space pair, straight from the definitions.

    Returns three dicts keyed by (s, t) with s <= t; (s, s) holds the
    variance statistics.
    """
    per_group = np.asarray(per_group, float)
    pooled = np.asarray(pooled, float)
    n, S = per_group.shape
    groups = sorted(set(labels))
    F, U, T = {}, {}, {}
    for s in range(S):
        for t in range(s, S):
            sigma_p = float(np.mean(pooled[:, s] * pooled[:, t]))
            gam, sig, var = {}, {}, {}
            for g in groups:
                idx = [i for i in range(n) if labels[i] == g]
                prods = [per_group[i, s] * per_group[i, t] for i in idx]
                gam[g] = len(idx) / n
                sig[g] = sum(prods) / len(prods)
                var[g] = sum(p * p for p in prods) / len(prods) - sig[g] ** 2
            f_val = sigma_p - sum(gam[g] * sig[g] for g in groups)
            u_val = 0.0
            for a_i, g in enumerate(groups):
                for g2 in groups[a_i + 1:]:
                    u_val += (
                        gam[g] * gam[g2] / (var[g] * var[g2])
                        * (sig[g] - sig[g2]) ** 2
                    )
            den_u = sum(gam[g] / var[g] for g in groups)
            den_f = sum(gam[g] ** 2 * var[g] for g in groups)
            t_val = n * u_val / den_u + n * f_val ** 2 / den_f
            F[(s, t)] = f_val
            U[(s, t)] = u_val
            T[(s, t)] = t_val
    return F, U, T


def oracle_group_matrices(per_group, labels):
    """Per-group covariance and centered correlation matrices plus weights."""
    per_group = np.asarray(per_group, float)
    n, S = per_group.shape
    covs, cors, gammas = [], [], []
    for g in sorted(set(labels)):
        idx = [i for i in range(n) if labels[i] == g]
        rows = per_group[idx]
        m = len(idx)
        cov = np.zeros((S, S))
        for s in range(S):
            for t in range(S):
                cov[s, t] = sum(rows[i, s] * rows[i, t] for i in range(m)) / m
        cor = np.eye(S)
        means = rows.mean(axis=0)
        for s in range(S):
            for t in range(S):
                if s != t:
                    num = np.mean((rows[:, s] - means[s]) * (rows[:, t] - means[t]))
                    den = np.sqrt(
                        np.mean((rows[:, s] - means[s]) ** 2)
                        * np.mean((rows[:, t] - means[t]) ** 2)
                    )
                    cor[s, t] = num / den
        covs.append(cov)
        cors.append(cor)
        gammas.append(m / n)
    return covs, cors, gammas


def oracle_pooled_cov(pooled):
    pooled = np.asarray(pooled, float)
    n, S = pooled.shape
    cov = np.zeros((S, S))
    for s in range(S):
        for t in range(S):
            cov[s, t] = sum(pooled[i, s] * pooled[i, t] for i in range(n)) / n
    return cov


def oracle_spd_distance(kind, A, B):
    if kind == "Euc":
        return np.linalg.norm(A - B)
    if kind == "AIRM":
        w = scipy.linalg.eigvalsh(B, A)  # eigenvalues of A^-1 B
        return np.sqrt(np.sum(np.log(w) ** 2))
    if kind == "LERM":
        log_a, _ = scipy.linalg.logm(A, disp=False)
        log_b, _ = scipy.linalg.logm(B, disp=False)
        return np.linalg.norm(log_a - log_b)
    raise ValueError(kind)


def oracle_r_statistics(per_group, pooled, labels, kind):
    covs, cors, gammas = oracle_group_matrices(per_group, labels)
    pooled_cov = oracle_pooled_cov(pooled)
    weighted = sum(g * c for g, c in zip(gammas, covs))
    r_mean = oracle_spd_distance(kind, pooled_cov, weighted)
    r_cov = 0.0
    r_cor = 0.0
    J = len(covs)
    for j in range(J):
        for jp in range(j + 1, J):
            r_cov += gammas[j] * gammas[jp] * oracle_spd_distance(kind, covs[j], covs[jp])
            r_cor += gammas[j] * gammas[jp] * oracle_spd_distance(kind, cors[j], cors[jp])
    return r_mean, r_cov, r_cor


def oracle_pillai_adapted(per_group, pooled, labels):
    covs, _, gammas = oracle_group_matrices(per_group, labels)
    pooled_cov = oracle_pooled_cov(pooled)
    weighted = sum(g * c for g, c in zip(gammas, covs))
    S = pooled_cov.shape[0]
    return S - np.trace(weighted @ np.linalg.inv(pooled_cov))


def oracle_pillai_distance(per_group, labels):
    """Classical one-way Pillai trace on the profile rows plus F approximation."""
    D = np.asarray(per_group, float)
    n, S = D.shape
    groups = sorted(set(labels))
    J = len(groups)
    grand = D.mean(axis=0)
    H = np.zeros((S, S))
    E = np.zeros((S, S))
    for g in groups:
        idx = [i for i in range(n) if labels[i] == g]
        rows = D[idx]
        m = rows.mean(axis=0)
        H += len(idx) * np.outer(m - grand, m - grand)
        for row in rows:
            E += np.outer(row - m, row - m)
    V = float(np.trace(H @ np.linalg.inv(H + E)))
    p_, q_ = S, J - 1
    s_ = min(p_, q_)
    m_ = (abs(p_ - q_) - 1) / 2.0
    r_ = (n - J - p_ - 1) / 2.0
    F = (2 * r_ + s_ + 1) * V / ((2 * m_ + s_ + 1) * (s_ - V))
    df1 = s_ * (2 * m_ + s_ + 1)
    df2 = s_ * (2 * r_ + s_ + 1)
    p_value = float(scipy.stats.f.sf(F, df1, df2))
    return V, F, df1, df2, p_value
