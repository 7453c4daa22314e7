"""Direct measurement of the error-decomposition terms on exact MDPs.

Everything is evaluated by finite summation against an explicit evaluation
distribution mu over the joint observation-action support; no sampling
error enters the metric itself.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .fqi import HypothesisSpace, approximation_proxy, uniform_nu
from .mdp import FiniteMDPSpec, OracleResult, value_iteration, value_iteration_oracle


@dataclass(frozen=True)
class WeightFit:
    weights: np.ndarray
    degenerate: bool = False


def fit_credit_weights(
    q_estimates: tuple[np.ndarray, ...],
    q_tot: np.ndarray,
    mu: np.ndarray,
    joint_obs: list,
    joint_act: list,
) -> WeightFit:
    """Simplex-constrained least squares of q_tot against the per-agent
    tables, solved exactly by enumerating active sets.

    ``mu`` weights the joint cells; q_tot and mu are indexed by the joint
    enumeration, q_estimates by each agent's own (z, u).
    """
    n = len(q_estimates)
    if mu.shape != q_tot.shape:
        raise ValueError("support-mismatch")
    if n == 1:
        return WeightFit(weights=np.array([1.0]))
    # Feature matrix: column i is agent i's value at each joint cell.
    feats = np.zeros((q_tot.size, n))
    flat_mu = mu.ravel()
    flat_tot = q_tot.ravel()
    cell = 0
    for zi, zs in enumerate(joint_obs):
        for ui, us in enumerate(joint_act):
            for i in range(n):
                feats[cell, i] = q_estimates[i][zs[i], us[i]]
            cell += 1
    sw = np.sqrt(flat_mu)
    A = feats * sw[:, None]
    b = flat_tot * sw
    if np.allclose(A - A[:, :1], 0.0, atol=1e-12):
        # All agents carry identical values: any simplex point ties.
        return WeightFit(weights=np.full(n, 1.0 / n), degenerate=True)

    best_w, best_obj = None, np.inf
    for size in range(1, n + 1):
        for support in itertools.combinations(range(n), size):
            w = _solve_support(A[:, support], b)
            if w is None or np.any(w < -1e-12):
                continue
            w = np.clip(w, 0.0, None)
            s = w.sum()
            if s <= 0:
                continue
            w = w / s
            full = np.zeros(n)
            full[list(support)] = w
            obj = float(np.sum((A @ full - b) ** 2))
            if obj < best_obj - 1e-15:
                best_obj = obj
                best_w = full
    return WeightFit(weights=best_w)


def _solve_support(A: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """Minimize ||A w - b||^2 subject to sum(w) = 1 via the KKT system."""
    k = A.shape[1]
    G = A.T @ A
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = G
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[:k] = A.T @ b
    rhs[k] = 1.0
    try:
        sol = np.linalg.solve(kkt, rhs)
    except np.linalg.LinAlgError:
        return None
    return sol[:k]


def _joint_values(
    q_per_agent: tuple[np.ndarray, ...], joint_obs: list, joint_act: list
) -> np.ndarray:
    """Stack per-agent tables onto the joint enumeration: out[cell, i]."""
    n = len(q_per_agent)
    out = np.zeros((len(joint_obs) * len(joint_act), n))
    cell = 0
    for zs in joint_obs:
        for us in joint_act:
            for i in range(n):
                out[cell, i] = q_per_agent[i][zs[i], us[i]]
            cell += 1
    return out


def l1_mu(values: np.ndarray, mu: np.ndarray) -> float:
    return float(np.sum(mu.ravel() * np.abs(values.ravel())))


def shared_optimal_q(spec: FiniteMDPSpec) -> np.ndarray:
    """Fixed point of the pooled Bellman regression: the best single table
    when every agent's samples train one Q (uniform pooling).

    Coincides with each agent's Q* when the agents are clones, which is
    what makes the sharing bias vanish there.
    """
    if not spec.same_spaces():
        raise ValueError("shared oracle requires identical spaces")
    P_bar = np.mean([a.P for a in spec.agents], axis=0)
    r_bar = np.mean([a.r for a in spec.agents], axis=0)
    return value_iteration(P_bar, r_bar, spec.gamma)


def algorithmic_term(gamma: float, T: int, M: float) -> float:
    return 4.0 * gamma ** (T + 1) * M / (1.0 - gamma) ** 2


@dataclass(frozen=True)
class DecompositionReport:
    excess_risk: float
    var_term: float
    sharing_bias: float
    approx_term: float
    algorithmic_term: float
    concentration_proxy: float
    sample_size: int
    iterations: int

    FIELDS = (
        "excess_risk",
        "var_term",
        "sharing_bias",
        "approx_term",
        "algorithmic_term",
        "concentration_proxy",
        "sample_size",
        "iterations",
    )

    def as_dict(self) -> dict:
        return {f: getattr(self, f) for f in self.FIELDS}


def decompose(
    spec: FiniteMDPSpec,
    learned: tuple[np.ndarray, ...],
    N: int,
    T: int,
    mode: str = "separate",
    hypothesis: HypothesisSpace | None = None,
    mu: np.ndarray | None = None,
    oracle: OracleResult | None = None,
    nu: np.ndarray | None = None,
) -> DecompositionReport:
    """Measure every decomposition term for one FQI output.

    excess_risk: L1(mu) distance of the fitted mixture from the joint
        optimum, minus the best achievable decomposed approximation.
    var_term: sqrt(n) * ||w* - ŵ|| * ||sqrt(Var_n(Q))||_{1,mu}, with the
        coordinate variance taken over the optimal per-agent values
        (the shared optimum's values in shared mode).
    sharing_bias: ||sum_i w*_i (Q*_i - Q̄*)||_{1,mu} against the pooled
        fixed point; zero exactly for clone agents.
    approx_term: projection-residual proxy of the hypothesis space.
    algorithmic_term: 4 gamma^(T+1) M / (1-gamma)^2, closed form.
    """
    if oracle is None:
        oracle = value_iteration_oracle(spec)
    joint_obs, joint_act = oracle.joint_obs, oracle.joint_act
    if mu is None:
        mu = np.full(oracle.joint.shape, 1.0 / oracle.joint.size)
    if mu.shape != oracle.joint.shape:
        raise ValueError("support-mismatch")
    if hypothesis is None:
        hypothesis = HypothesisSpace()

    w_star = fit_credit_weights(oracle.per_agent, oracle.joint, mu, joint_obs, joint_act)
    w_hat = fit_credit_weights(learned, oracle.joint, mu, joint_obs, joint_act)

    star_vals = _joint_values(oracle.per_agent, joint_obs, joint_act)
    learned_vals = _joint_values(learned, joint_obs, joint_act)
    flat_tot = oracle.joint.ravel()
    base_err = l1_mu(flat_tot - star_vals @ w_star.weights, mu)
    fit_err = l1_mu(flat_tot - learned_vals @ w_hat.weights, mu)
    excess = fit_err - base_err

    n = spec.n_agents
    if mode == "shared" and spec.same_spaces():
        qbar = shared_optimal_q(spec)
        var_basis = _joint_values(tuple(qbar for _ in range(n)), joint_obs, joint_act)
    else:
        var_basis = star_vals
    coord_var = var_basis.var(axis=1)
    var_term = (
        np.sqrt(n)
        * float(np.linalg.norm(w_star.weights - w_hat.weights))
        * l1_mu(np.sqrt(coord_var), mu)
    )

    if spec.same_spaces():
        qbar = shared_optimal_q(spec)
        bias_fn = (star_vals - _joint_values(tuple(qbar for _ in range(n)), joint_obs, joint_act)) @ w_star.weights
        sharing_bias = l1_mu(bias_fn, mu)
    else:
        sharing_bias = float("nan")

    approx = approximation_proxy(spec, hypothesis, learned, nu)
    return DecompositionReport(
        excess_risk=excess,
        var_term=var_term,
        sharing_bias=sharing_bias,
        approx_term=approx,
        algorithmic_term=algorithmic_term(spec.gamma, T, spec.reward_bound),
        concentration_proxy=concentration_proxy(spec, mu, nu),
        sample_size=N,
        iterations=T,
    )


def concentration_proxy(
    spec: FiniteMDPSpec,
    mu: np.ndarray | None = None,
    nu: np.ndarray | None = None,
    horizon: int = 50,
) -> float:
    """Single-policy Radon-Nikodym proxy for the concentration constant.

    The true constant takes a supremum over all policy sequences, which is
    not computable; this follows the greedy-optimal policy of agent 0 only
    and is reported as a flagged proxy, not a bound.
    """
    agent = spec.agents[0]
    n_obs, n_actions = agent.n_obs, agent.n_actions
    if nu is None:
        nu = uniform_nu(n_obs, n_actions)
    q_star = value_iteration(agent.P, agent.r, spec.gamma)
    greedy = q_star.argmax(axis=1)
    if mu is None or mu.shape == ():
        dist = uniform_nu(n_obs, n_actions)
    else:
        # Marginalize the joint mu onto agent 0's cells if shapes differ.
        dist = uniform_nu(n_obs, n_actions) if mu.shape != (n_obs, n_actions) else mu.copy()
    total = 0.0
    for m in range(1, horizon + 1):
        nxt = np.zeros_like(dist)
        for z in range(n_obs):
            for u in range(n_actions):
                if dist[z, u] == 0:
                    continue
                for z2 in range(n_obs):
                    nxt[z2, greedy[z2]] += dist[z, u] * agent.P[z, u, z2]
        dist = nxt
        ratio_sq = np.sum(np.where(nu > 0, dist**2 / np.where(nu > 0, nu, 1.0), 0.0))
        kappa = float(np.sqrt(ratio_sq))
        total += spec.gamma ** (m - 1) * m * kappa
    return (1.0 - spec.gamma) ** 2 * total
