"""First-order HMM baseline: tags are states, ambiguity classes are observations.

Documents are joined into one observation stream separated by the ``{EOS}``
class, so the initial distribution is simply the ``EOS`` row of the
transition matrix. Forward-backward uses per-position scaling: with
``c_t`` the normaliser of the forward vector at position ``t``, the
log-likelihood of the stream is ``sum(log c_t)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import EOS_CLASS, EOS_ID, AmbiguityInventory, TaggerError
from .corpus import AmbiguousText
from .rules import RuleSet

log = logging.getLogger(__name__)

DEFAULT_ITERATIONS = 10
DEFAULT_EPSILON = 1e-6


@dataclass
class HmmModel:
    inv: AmbiguityInventory
    transitions: np.ndarray   # (tags, tags)
    emissions: np.ndarray     # (tags, classes)
    rules_applied: bool = False
    rules_digest: str = ""
    history: list = field(default_factory=list)

    @property
    def n_tags(self) -> int:
        return self.transitions.shape[0]


def membership(inv: AmbiguityInventory, n_classes: int | None = None) -> np.ndarray:
    n_classes = len(inv) if n_classes is None else n_classes
    mask = np.zeros((len(inv.tagset), n_classes), dtype=bool)
    for c in range(n_classes):
        mask[list(inv.tags_of(c)), c] = True
    return mask


def transition_mask(n_tags: int, rules: RuleSet | None) -> np.ndarray:
    allowed = np.ones((n_tags, n_tags), dtype=bool)
    if rules:
        for a in range(n_tags):
            for b in range(n_tags):
                allowed[a, b] = rules.allows(a, b)
    return allowed


def hmm_init(inv: AmbiguityInventory, rules: RuleSet | None = None) -> HmmModel:
    """Uniform transitions over legal successors, uniform emissions over classes containing each tag."""
    n = len(inv.tagset)
    allowed = transition_mask(n, rules)
    for a in range(n):
        if not allowed[a].any():
            raise TaggerError(f"tag {inv.tagset.name(a)!r} has no legal successor under the rules")
    trans = allowed / allowed.sum(axis=1, keepdims=True)
    member = membership(inv)
    rows = member.sum(axis=1, keepdims=True)
    emis = np.divide(member, rows, out=np.zeros(member.shape), where=rows > 0)
    return HmmModel(inv, trans, emis, rules_applied=rules is not None,
                    rules_digest=rules.digest() if rules is not None else "")


def observations(text: AmbiguousText) -> np.ndarray:
    """The class stream ``EOS d1 EOS d2 ... EOS``."""
    obs = [EOS_CLASS]
    for doc in text.classes():
        obs.extend(doc)
        obs.append(EOS_CLASS)
    return np.asarray(obs, dtype=np.int64)


def _emission_columns(model: HmmModel, obs: np.ndarray, lenient: bool) -> np.ndarray:
    """Emission probabilities per position, shape ``(len(obs), tags)``.

    With ``lenient`` set, classes the model has no emission mass for (added
    to the inventory after training, or never observed) emit 1 for each of
    their tags; this only constrains the path to the class's tags.
    """
    n_classes = model.emissions.shape[1]
    if obs.max(initial=0) >= n_classes:
        if not lenient:
            raise TaggerError("text uses ambiguity classes unknown to the model")
    cols = np.zeros((len(obs), model.n_tags))
    known = obs < n_classes
    cols[known] = model.emissions[:, obs[known]].T
    if lenient:
        dead = ~known
        dead[known] = model.emissions[:, obs[known]].sum(axis=0) == 0
        for t in np.flatnonzero(dead):
            cols[t, list(model.inv.tags_of(int(obs[t])))] = 1.0
    return cols


def forward_backward(model: HmmModel, obs: np.ndarray, lenient: bool = False):
    """Scaled forward-backward over the stream.

    Returns ``(alpha, beta, scale, emis)`` where ``alpha[t] * beta[t]`` is
    the posterior over tags at ``t`` and ``sum(log(scale))`` the
    log-likelihood. Position 0 is the leading ``EOS`` and is fixed.
    """
    A = model.transitions
    B = _emission_columns(model, obs, lenient)
    T, K = B.shape
    alpha = np.zeros((T, K))
    beta = np.ones((T, K))
    scale = np.ones(T)
    alpha[0, EOS_ID] = 1.0
    for t in range(1, T):
        a = (alpha[t - 1] @ A) * B[t]
        s = a.sum()
        if not s > 0:
            raise TaggerError(f"observation stream has zero probability at position {t}")
        alpha[t] = a / s
        scale[t] = s
    for t in range(T - 2, -1, -1):
        beta[t] = (A @ (B[t + 1] * beta[t + 1])) / scale[t + 1]
    if not (np.isfinite(alpha).all() and np.isfinite(beta).all()):
        raise TaggerError("NaN or infinity in forward-backward")
    return alpha, beta, scale, B


def hmm_log_likelihood(model: HmmModel, text: AmbiguousText) -> float:
    _, _, scale, _ = forward_backward(model, observations(text))
    return float(np.log(scale).sum())


def hmm_posteriors(model: HmmModel, text: AmbiguousText) -> np.ndarray:
    """Posterior tag marginals for every token, shape ``(tokens, tags)``."""
    obs = observations(text)
    alpha, beta, _, _ = forward_backward(model, obs)
    post = alpha * beta
    return post[obs != EOS_CLASS] if len(text) else post[:0]


def _em_step(model: HmmModel, obs: np.ndarray) -> tuple[HmmModel, float]:
    alpha, beta, scale, B = forward_backward(model, obs)
    A = model.transitions
    gamma = alpha * beta
    # expected transition counts: sum_t alpha[t-1,i] A[i,j] B[t,j] beta[t,j] / c_t
    weighted = B[1:] * beta[1:] / scale[1:, None]
    xi = A * (alpha[:-1].T @ weighted)
    new_A = A.copy()
    rows = xi.sum(axis=1)
    seen = rows > 0
    new_A[seen] = xi[seen] / rows[seen, None]

    n_classes = model.emissions.shape[1]
    counts = np.zeros((n_classes, model.n_tags))
    np.add.at(counts, obs, gamma)
    counts = counts.T
    new_B = model.emissions.copy()
    totals = counts.sum(axis=1)
    seen = totals > 0
    new_B[seen] = counts[seen] / totals[seen, None]
    updated = HmmModel(model.inv, new_A, new_B, model.rules_applied, model.rules_digest,
                       list(model.history))
    return updated, float(np.log(scale).sum())


def hmm_train(model: HmmModel, text: AmbiguousText, iterations: int = DEFAULT_ITERATIONS,
              epsilon: float = DEFAULT_EPSILON) -> HmmModel:
    """Baum-Welch on the class stream.

    ``model.history`` receives the log-likelihood evaluated before each
    update (and once more after the last), which EM keeps non-decreasing.
    """
    if len(text) == 0:
        raise ValueError("cannot train on an empty text")
    obs = observations(text)
    if obs.max() >= model.emissions.shape[1]:
        raise TaggerError("training text uses ambiguity classes unknown to the model")
    prev = None
    for _ in range(iterations):
        model, ll = _em_step(model, obs)
        model.history.append(ll)
        if prev is not None and abs(ll - prev) <= epsilon * abs(prev):
            break
        prev = ll
    if iterations:
        model.history.append(hmm_log_likelihood(model, text))
    return model


def viterbi(model: HmmModel, obs: np.ndarray) -> np.ndarray | None:
    """Best path restricted to each class's tags, or ``None`` if every path has probability 0."""
    B = _emission_columns(model, obs, lenient=True)
    T, K = B.shape
    member = np.zeros((T, K), dtype=bool)
    for t, c in enumerate(obs):
        member[t, list(model.inv.tags_of(int(c)))] = True
    with np.errstate(divide="ignore"):
        logA = np.log(model.transitions)
        logB = np.where(member, np.log(B), -np.inf)
    delta = np.full(K, -np.inf)
    delta[EOS_ID] = 0.0
    back = np.zeros((T, K), dtype=np.int64)
    for t in range(1, T):
        cand = delta[:, None] + logA
        # argmax returns the first maximum, i.e. the lowest tag id on ties
        back[t] = np.argmax(cand, axis=0)
        delta = cand[back[t], np.arange(K)] + logB[t]
    if not np.isfinite(delta).any():
        return None
    path = np.zeros(T, dtype=np.int64)
    path[-1] = int(np.argmax(delta))
    for t in range(T - 1, 0, -1):
        path[t - 1] = back[t, path[t]]
    return path


def hmm_tag(model: HmmModel, text: AmbiguousText) -> list[int]:
    """Best tag path, decoded one document at a time."""
    out: list[int] = []
    for doc in text.classes():
        obs = np.asarray([EOS_CLASS] + doc + [EOS_CLASS], dtype=np.int64)
        path = viterbi(model, obs)
        if path is None:
            log.warning("every tag path has zero probability; tagging by emission argmax")
            B = _emission_columns(model, obs, lenient=True)
            path = np.zeros(len(obs), dtype=np.int64)
            for t, c in enumerate(obs):
                tags = model.inv.tags_of(int(c))
                path[t] = tags[int(np.argmax(B[t, list(tags)]))]
        out.extend(int(p) for p in path[1:-1])
    return out
