"""Alignment-based retrieval and exploration over a corpus index.

The alignment grid (4 axis reorientations x 13 log-spaced scales x 9
log-spaced duration scales) is searched exhaustively per candidate, with a
small regularizer on |ln scale| + |ln duration_scale| so duration adjustment
cannot trivially zero out the duration factor. Top-k search stays exact but
prunes candidates through admissible lower bounds on the post-alignment
kinematic distance (per-step extent features are 1-Lipschitz under Hausdorff
distance), which keeps full-grid queries interactive on desk-scale corpora.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .config import EngineConfig
from .kinematics import (DomainError, EmissionShape, Kinematics,
                         evolved_cartesian, reference_component_deltas,
                         trail_from_component_deltas)
from .metrics import (MetricParams, StructuredRepresentation,
                      duration_factor, resample_trail, _lambda_values)
from .kinematics import evolved_states
from .semantics import SemanticDescriptor, expand_directionally
from .transforms import (IDENTITY, REORIENTATIONS, SPIN_SIGN, Transformation,
                         reorientation_matrix)


class SearchError(ValueError):
    pass


class NotFoundError(KeyError):
    pass


class ExtrapolationError(ValueError):
    pass


@dataclass(frozen=True)
class SearchConstraint:
    """R_c plus the semantic/kinematic weight; one component may be absent."""

    semantic: SemanticDescriptor | None = None
    kinematics: Kinematics | None = None
    w: float = 0.5

    def __post_init__(self):
        if self.semantic is None and self.kinematics is None:
            raise DomainError("constraint needs at least one component")
        if not 0.0 <= self.w <= 1.0:
            raise DomainError("w must lie in [0, 1]")

    @property
    def effective_w(self) -> float:
        if self.semantic is None:
            return 0.0
        if self.kinematics is None:
            return 1.0
        return self.w


@dataclass(frozen=True)
class RankedResult:
    effect_id: str
    similarity: float
    best_transformation: Transformation
    kinematic_distance: float | None

    def to_dict(self) -> dict:
        return {"effect_id": self.effect_id,
                "similarity": self.similarity,
                "best_transformation": self.best_transformation.to_dict(),
                "kinematic_distance": self.kinematic_distance}


# --- precomputed per-candidate geometry -------------------------------------

def _state_features(points: np.ndarray) -> np.ndarray:
    """Per-step extent features (N, 6): each is 1-Lipschitz w.r.t. point
    displacement, so |feature difference| lower-bounds the Hausdorff
    distance, and every feature scales linearly with uniform scaling."""
    z = points[..., 2]
    rho = np.hypot(points[..., 0], points[..., 1])
    norm = np.linalg.norm(points, axis=-1)
    feats = [z.max(axis=-1), z.min(axis=-1), rho.max(axis=-1),
             rho.min(axis=-1), norm.max(axis=-1), norm.min(axis=-1)]
    return np.stack(feats, axis=-1)


class KinematicCache:
    """Evolved boundary states and pruning features for a candidate list."""

    def __init__(self, kinematics_list, m_boundary: int):
        self.m = m_boundary
        self.count = len(kinematics_list)
        states = np.stack([evolved_cartesian(k, m_boundary)
                           for k in kinematics_list])      # (C, N, m, 3)
        self.n_steps = states.shape[1]
        mats = np.stack([reorientation_matrix(r) for r in REORIENTATIONS])
        # (R, C, N, m, 3)
        self.states = np.einsum("rab,cnmb->rcnma", mats, states)
        self.sq_norms = np.sum(states ** 2, axis=-1)       # (C, N, m)
        self.features = _state_features(self.states)       # (R, C, N, 6)
        self.cum_phi = np.stack([k.trail.cumulative_phi
                                 for k in kinematics_list])  # (C, N)
        self.durations = np.array([k.duration for k in kinematics_list])


@dataclass
class _Query:
    states: np.ndarray      # (N, m, 3)
    sq_norms: np.ndarray    # (N, m)
    cum_phi: np.ndarray     # (N,)
    lambdas: np.ndarray     # (N,) query-side penalty weights
    adaptive: bool          # True -> symmetrize with the candidate's radius
    features: np.ndarray    # (N, 6)
    duration: float


def _prepare_query(kc: Kinematics, params: MetricParams) -> _Query:
    states_sph = evolved_states(kc, params.m_boundary)[1:]
    lambdas = _lambda_values(params.lambda_mode, states_sph)
    states = np.stack([s.to_cartesian() for s in states_sph])
    return _Query(states=states,
                  sq_norms=np.sum(states ** 2, axis=-1),
                  cum_phi=kc.trail.cumulative_phi,
                  lambdas=lambdas,
                  adaptive=params.lambda_mode == "adaptive",
                  features=_state_features(states),
                  duration=kc.duration)


def _spin_signs() -> np.ndarray:
    return np.array([SPIN_SIGN[r] for r in REORIENTATIONS])


def _rotation_penalties(query: _Query, cum_phi: np.ndarray,
                        rho_max: np.ndarray,
                        scales: np.ndarray) -> np.ndarray:
    """Exact penalty totals per (reorientation, candidate, scale).

    Adaptive lambda is the max of the query's and the scaled candidate's
    half equatorial radius per step; `rho_max` is the candidate's equatorial
    radius feature, shape (R, C, N).
    """
    signs = _spin_signs()                                   # (R,)
    delta = query.cum_phi[None, None, :] \
        - signs[:, None, None] * cum_phi[None, :, :]        # (R, C, N)
    mismatch = 1.0 - np.cos(delta)
    if query.adaptive:
        lam = np.maximum(query.lambdas[None, None, :, None],
                         0.5 * rho_max[..., None] * scales)  # (R, C, N, S)
        return np.sum(lam * mismatch[..., None], axis=2)     # (R, C, S)
    total = np.sum(query.lambdas[None, None, :] * mismatch, axis=-1)
    return np.repeat(total[:, :, None], scales.size, axis=2)


def _cell_lower_bounds(query: _Query, features: np.ndarray,
                       scales: np.ndarray) -> np.ndarray:
    """Admissible per-cell lower bound on the trail's Hausdorff sum.

    |constraint feature - scale * candidate feature|, worst feature per step,
    summed over steps; shape (R, C, S).
    """
    diff = np.abs(query.features[None, None, :, :, None]
                  - features[..., None] * scales)           # (R,C,N,6,S)
    return diff.max(axis=3).sum(axis=2)


def _chunk_trail_distances(query: _Query, cache: KinematicCache,
                           idx: np.ndarray,
                           scales: np.ndarray) -> np.ndarray:
    """Exact trail distances for a candidate chunk, shape (B, R, S)."""
    n, m = cache.n_steps, cache.m
    b = idx.size
    xx = cache.sq_norms[idx]                                # (B, N, m)
    h_sq = np.empty((b, len(REORIENTATIONS), scales.size, n))
    for ri in range(len(REORIENTATIONS)):
        for j in range(n):
            x = cache.states[ri, idx, j]                    # (B, m, 3)
            g = x @ query.states[j].T                       # (B, m, m)
            yy = query.sq_norms[j]                          # (m,)
            for si, c in enumerate(scales):
                d2 = (c * c) * xx[:, j, :, None] - (2.0 * c) * g \
                    + yy[None, None, :]
                np.maximum(d2, 0.0, out=d2)
                directed_a = d2.min(axis=1).max(axis=1)     # constraint->cand
                directed_b = d2.min(axis=2).max(axis=1)     # cand->constraint
                h_sq[:, ri, si, j] = np.maximum(directed_a, directed_b)
    trail = np.sqrt(h_sq).sum(axis=3)                       # (B, R, S)
    penalties = _rotation_penalties(query, cache.cum_phi[idx],
                                    cache.features[..., 2][:, idx],
                                    scales)                 # (R, B, S)
    return trail + penalties.transpose(1, 0, 2)


def _evaluate_candidate(query: _Query, cache: KinematicCache, pos: int,
                        cell_bounds: np.ndarray, penalties: np.ndarray,
                        factors: np.ndarray, scales: np.ndarray,
                        dss: np.ndarray, reg_scale: np.ndarray,
                        reg_ds: np.ndarray) -> tuple[Transformation, float]:
    """Exact grid argmin for one candidate, visiting cells lazily.

    (reorientation, scale) cells are evaluated in ascending order of their
    objective lower bound and evaluation stops once the bound exceeds the
    best exact objective found, which keeps most candidates to a handful of
    the 52 cells. Ties resolve to the earliest grid enumeration point.
    """
    lbj = (cell_bounds + penalties) * factors.min() \
        + reg_scale[None, :]                                # (R, S)
    flat = lbj.reshape(-1)
    visit = np.argsort(flat, kind="stable")
    n_scales = scales.size
    best_j = math.inf
    best_rank = None
    best_dk = 0.0
    g_cache: dict[int, np.ndarray] = {}
    xx = cache.sq_norms[pos]                                # (N, m)
    for cell in visit:
        if flat[cell] > best_j:
            break
        ri, si = divmod(int(cell), n_scales)
        g = g_cache.get(ri)
        if g is None:
            x = cache.states[ri, pos]                       # (N, m, 3)
            g = np.einsum("jak,jbk->jab", x, query.states)
            g_cache[ri] = g
        c = scales[si]
        d2 = (c * c) * xx[:, :, None] - (2.0 * c) * g \
            + query.sq_norms[:, None, :]
        np.maximum(d2, 0.0, out=d2)
        h_sq = np.maximum(d2.min(axis=1).max(axis=1),
                          d2.min(axis=2).max(axis=1))
        trail = float(np.sqrt(h_sq).sum()) + penalties[ri, si]
        objective = trail * factors + reg_scale[si] + reg_ds
        di = int(np.argmin(objective))
        j_val = float(objective[di])
        rank = (ri, si, di)
        if j_val < best_j or (j_val == best_j and rank < best_rank):
            best_j = j_val
            best_rank = rank
            best_dk = trail * float(factors[di])
    ri, si, di = best_rank
    return (Transformation(REORIENTATIONS[ri], float(scales[si]),
                           float(dss[di])), best_dk)


# --- exact per-pair evaluation (cdist path) ---------------------------------

def transformed_kinematic_distance(kc: Kinematics, ki: Kinematics,
                                   transformation: Transformation,
                                   params: MetricParams) -> float:
    """D_k between the constraint and a transformed candidate.

    Reorientation is applied to the candidate's evolved boundary states, so
    this works for poses the axisymmetric representation cannot express.
    """
    query = _prepare_query(kc, params)
    states = evolved_cartesian(ki, params.m_boundary)
    rotated = states @ transformation.matrix.T * transformation.scale
    sign = transformation.spin_sign
    delta_phi = query.cum_phi - sign * ki.trail.cumulative_phi
    total = 0.0
    for j in range(states.shape[0]):
        d = cdist(query.states[j], rotated[j])
        h = max(d.min(axis=1).max(), d.min(axis=0).max())
        lam = query.lambdas[j]
        if query.adaptive:
            rho = float(np.hypot(rotated[j, :, 0], rotated[j, :, 1]).max())
            lam = max(lam, 0.5 * rho)
        total += h + lam * (1.0 - math.cos(delta_phi[j]))
    return total * duration_factor(
        kc.duration, ki.duration * transformation.duration_scale,
        params.alpha)


def align(kc: Kinematics, ki: Kinematics, params: MetricParams,
          config: EngineConfig | None = None
          ) -> tuple[Transformation, float]:
    """Exhaustive grid alignment minimizing regularized kinematic distance.

    Returns the winning transformation and its (unregularized) kinematic
    distance. The handful of grid points within rounding distance of the fast
    path's minimum are re-checked with the exact Hausdorff evaluation.
    """
    config = config or EngineConfig()
    query = _prepare_query(kc, params)
    cache = KinematicCache([ki], params.m_boundary)
    scales = np.asarray(config.scale_grid)
    dss = np.asarray(config.duration_scale_grid)
    trail = _chunk_trail_distances(query, cache, np.array([0]), scales)[0]
    reg_unit = config.regularizer_weight * params.sigma
    ratios = np.maximum(query.duration / (ki.duration * dss),
                        (ki.duration * dss) / query.duration)
    factors = 1.0 + params.alpha * (ratios - 1.0) ** 2
    objective = trail[:, :, None] * factors[None, None, :] \
        + reg_unit * (np.abs(np.log(scales))[None, :, None]
                      + np.abs(np.log(dss))[None, None, :])
    j_min = objective.min()
    # the fast path loses ~sqrt(eps) per Hausdorff term to cancellation, so
    # near-ties within that noise floor are re-checked exactly
    tol = 1e-5 + 1e-9 * abs(j_min)
    best = None
    for ri, rname in enumerate(REORIENTATIONS):
        for si, c in enumerate(scales):
            for di, ds in enumerate(dss):
                if objective[ri, si, di] > j_min + tol:
                    continue
                t = Transformation(rname, float(c), float(ds))
                dk = transformed_kinematic_distance(kc, ki, t, params)
                reg = reg_unit * (abs(math.log(c)) + abs(math.log(ds)))
                j_exact = dk + reg
                if best is None or j_exact < best[0] - 1e-15:
                    best = (j_exact, t, dk)
    _, transformation, dk = best
    return transformation, dk


# --- top-k search ------------------------------------------------------------

def search_topk(constraint: SearchConstraint, index, k: int | None = None,
                params: MetricParams | None = None,
                config: EngineConfig | None = None,
                exclude=frozenset()) -> list[RankedResult]:
    """Top-k candidates by combined similarity with aligned kinematics.

    Exact over the full transformation grid; candidates are processed in
    decreasing order of an admissible similarity upper bound and evaluation
    stops once the bound falls below the current k-th best.
    """
    config = config or EngineConfig()
    params = params or MetricParams.from_config(config, sigma=index.sigma)
    if k is None:
        k = config.top_k
    if k < 1:
        raise SearchError("k must be >= 1")

    if not index.ids:
        raise SearchError("corpus is empty")
    ids = [i for i in index.ids if i not in exclude]
    if not ids:
        return []
    positions = np.array([index.position(i) for i in ids])

    w = constraint.effective_w
    if constraint.semantic is not None:
        cos = index.embeddings[positions] @ constraint.semantic.embedding
        cos = np.maximum(0.0, cos)
    else:
        cos = np.zeros(len(ids))

    if w >= 1.0 or constraint.kinematics is None:
        order = sorted(range(len(ids)), key=lambda i: (-cos[i], ids[i]))
        return [RankedResult(ids[i], float(cos[i]), IDENTITY, None)
                for i in order[:k]]

    cache = index.kinematic_cache(params.m_boundary)
    query = _prepare_query(constraint.kinematics, params)
    scales = np.asarray(config.scale_grid)
    dss = np.asarray(config.duration_scale_grid)
    reg_unit = config.regularizer_weight * params.sigma
    reg_scale = reg_unit * np.abs(np.log(scales))
    reg_ds = reg_unit * np.abs(np.log(dss))

    features = cache.features[:, positions]                 # (R, C, N, 6)
    cell_bounds = _cell_lower_bounds(query, features, scales)
    penalties = _rotation_penalties(query, cache.cum_phi[positions],
                                    features[..., 2], scales)
    durations = cache.durations[positions]
    ratios = np.maximum(query.duration / (durations[:, None] * dss),
                        (durations[:, None] * dss) / query.duration)
    factors = 1.0 + params.alpha * (ratios - 1.0) ** 2      # (C, D)
    lb_dk = (cell_bounds + penalties).min(axis=(0, 2)) * factors.min(axis=1)
    ub_sim = w * cos + (1.0 - w) * np.exp(-lb_dk / params.sigma)
    order = np.lexsort((np.array(ids), -ub_sim))

    results: list[RankedResult] = []
    kth = -1.0
    for ci in order:
        if len(results) >= k and ub_sim[ci] <= kth:
            break
        transformation, dk = _evaluate_candidate(
            query, cache, int(positions[ci]), cell_bounds[:, ci, :],
            penalties[:, ci, :], factors[ci], scales, dss,
            reg_scale, reg_ds)
        sim = w * float(cos[ci]) + (1.0 - w) * math.exp(-dk / params.sigma)
        results.append(RankedResult(ids[ci], sim, transformation, dk))
        results.sort(key=lambda r: (-r.similarity, r.effect_id))
        if len(results) >= k:
            kth = results[k - 1].similarity
    return results[:k]


# --- extrapolation -----------------------------------------------------------

def _slog(x: np.ndarray, eps: float) -> np.ndarray:
    return np.sign(x) * np.log1p(np.abs(x) / eps)


def _slog_inverse(y: np.ndarray, eps: float) -> np.ndarray:
    return np.sign(y) * eps * np.expm1(np.abs(y))


def extrapolate(ka: Kinematics, kb: Kinematics, c: float,
                config: EngineConfig | None = None) -> Kinematics:
    """Signed-log extrapolation from ka towards (and beyond) kb.

    Each trail step's axial projection, azimuth advance, and equatorial
    projection, the shape radii, and the duration pass through
    slog(x) = sign(x) ln(1 + |x| / eps), are linearly extrapolated as
    slog(a) + c (slog(b) - slog(a)), and inverted. c = 0 and c = 1 recover
    the endpoints.
    """
    if not math.isfinite(c):
        raise ExtrapolationError("coefficient must be finite")
    config = config or EngineConfig()
    eps = config.slog_epsilon

    if len(ka.trail) != len(kb.trail):
        n = max(len(ka.trail), len(kb.trail))
        ka = Kinematics(ka.shape, resample_trail(ka.trail, n), ka.duration)
        kb = Kinematics(kb.shape, resample_trail(kb.trail, n), kb.duration)

    da = reference_component_deltas(ka)
    db = reference_component_deltas(kb)
    scalars_a = np.array([ka.shape.r, ka.shape.h, ka.duration])
    scalars_b = np.array([kb.shape.r, kb.shape.h, kb.duration])

    sa, sb = _slog(da, eps), _slog(db, eps)
    deltas = _slog_inverse(sa + c * (sb - sa), eps)
    va, vb = _slog(scalars_a, eps), _slog(scalars_b, eps)
    scalars = _slog_inverse(va + c * (vb - va), eps)

    if not (np.all(np.isfinite(deltas)) and np.all(np.isfinite(scalars))):
        raise ExtrapolationError("extrapolation left the finite range")

    kind = kb.shape.s if c >= 0.5 else ka.shape.s
    r = max(0.0, float(scalars[0]))
    h = max(0.0, float(scalars[1])) if kind == "cylinder" else 0.0
    duration = float(scalars[2])
    if duration <= 0:
        raise ExtrapolationError("extrapolated duration is not positive")
    shape = EmissionShape(kind, r, h)
    return Kinematics(shape=shape,
                      trail=trail_from_component_deltas(shape, deltas),
                      duration=duration)


# --- exploration -------------------------------------------------------------

def local_explore(selected_effect_id: str, index,
                  params: MetricParams | None = None,
                  config: EngineConfig | None = None, w: float = 0.5,
                  exclude=frozenset()) -> list[RankedResult]:
    """Top-k around the selected effect's own stored representation."""
    config = config or EngineConfig()
    if selected_effect_id not in index.entries:
        raise NotFoundError(selected_effect_id)
    rep = index.entries[selected_effect_id].representation
    constraint = SearchConstraint(semantic=rep.semantic,
                                  kinematics=rep.kinematics, w=w)
    return search_topk(constraint, index, config.top_k, params, config,
                       exclude=exclude)


def directional_explore(prev_id: str, curr_id: str, user_intent: str,
                        index, llm, embedding_provider,
                        params: MetricParams | None = None,
                        config: EngineConfig | None = None, w: float = 0.5,
                        exclude=frozenset()) -> list[RankedResult]:
    """Search beyond (prev -> curr) along the implied preference direction.

    Probe constraints pair provider-expanded descriptions with kinematic
    extrapolations at the configured coefficients (positionally, cycling the
    shorter list); results merge by max similarity.
    """
    config = config or EngineConfig()
    for effect_id in (prev_id, curr_id):
        if effect_id not in index.entries:
            raise NotFoundError(effect_id)
    exclude = frozenset(exclude) | {prev_id, curr_id}
    if prev_id == curr_id:
        return local_explore(curr_id, index, params, config, w,
                             exclude=exclude)

    rep_prev = index.entries[prev_id].representation
    rep_curr = index.entries[curr_id].representation
    coefficients = list(config.extrapolation_coefficients)
    texts = expand_directionally(rep_prev.semantic, rep_curr.semantic,
                                 user_intent, llm, len(coefficients))

    from .semantics import describe  # local import to avoid cycle at startup

    merged: dict[str, RankedResult] = {}
    n_probes = max(len(texts), len(coefficients))
    for i in range(n_probes):
        text = texts[i % len(texts)]
        coefficient = coefficients[i % len(coefficients)]
        kin = rep_curr.kinematics
        c = coefficient
        for _ in range(8):
            try:
                kin = extrapolate(rep_prev.kinematics, rep_curr.kinematics,
                                  c, config)
                break
            except ExtrapolationError:
                c = 1.0 + (c - 1.0) / 2.0
        semantic = describe(text, llm, embedding_provider)
        constraint = SearchConstraint(semantic=semantic, kinematics=kin, w=w)
        for result in search_topk(constraint, index, config.top_k, params,
                                  config, exclude=exclude):
            prior = merged.get(result.effect_id)
            if prior is None or result.similarity > prior.similarity:
                merged[result.effect_id] = result
    ranked = sorted(merged.values(),
                    key=lambda r: (-r.similarity, r.effect_id))
    return ranked[:config.top_k]
