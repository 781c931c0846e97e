"""Logistic regression by Newton/IRLS, scoring, odds ratios and the sanitarian models."""
import logging
import math
from collections import Counter
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from src.constants import (
    BASE_FEATURE_NAMES,
    FEATURE_NAMES,
    MAX_STEP_HALVINGS,
    SANITARIAN_FEATURE_PREFIX,
    SEPARATION_COEFFICIENT_LIMIT,
    SEPARATION_PROBABILITY_TOLERANCE,
    WALD_Z_95,
)
from src.models.features import FeatureVector, LabeledInstance
from src.models.inspection import id_sort_key
from src.models.logistic_model import ClusterAssignment, FitMeta, LogisticModel, TrainingConfig
from src.utils.error_handler import numerical_error, validation_error

logger = logging.getLogger(__name__)

FeatureSource = Union[FeatureVector, Mapping[str, float]]


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Logistic function without overflow for large |z|."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    positive = z >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-z[positive]))
    exp_z = np.exp(z[~positive])
    out[~positive] = exp_z / (1.0 + exp_z)
    return out


def log_likelihood(design: np.ndarray, y: np.ndarray, beta: np.ndarray) -> float:
    """Bernoulli log-likelihood; ``design`` carries the intercept column first."""
    eta = design @ beta
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def penalty_vector(n_columns: int, ridge_epsilon: float) -> np.ndarray:
    penalty = np.full(n_columns, ridge_epsilon)
    penalty[0] = 0.0  # intercept is never regularized
    return penalty


def penalized_objective(design: np.ndarray, y: np.ndarray, beta: np.ndarray, penalty: np.ndarray) -> float:
    return log_likelihood(design, y, beta) - 0.5 * float(np.sum(penalty * beta * beta))


def penalized_gradient(design: np.ndarray, y: np.ndarray, beta: np.ndarray, penalty: np.ndarray) -> np.ndarray:
    return design.T @ (y - sigmoid(design @ beta)) - penalty * beta


def penalized_hessian(design: np.ndarray, beta: np.ndarray, penalty: np.ndarray) -> np.ndarray:
    """Observed information (negative Hessian) of the penalized objective."""
    prob = sigmoid(design @ beta)
    weights = prob * (1.0 - prob)
    return (design * weights[:, None]).T @ design + np.diag(penalty)


def _scaled_solve(information: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve with symmetric diagonal scaling; raw-unit columns differ by many orders of magnitude."""
    diagonal = np.diag(information)
    if np.any(diagonal <= 0) or not np.all(np.isfinite(information)):
        raise numerical_error("information matrix is not positive definite")
    scale = 1.0 / np.sqrt(diagonal)
    scaled = information * scale[:, None] * scale[None, :]
    try:
        return scale * np.linalg.solve(scaled, scale * rhs)
    except np.linalg.LinAlgError:
        raise numerical_error("information matrix is singular")


def _scaled_inverse(information: np.ndarray) -> np.ndarray:
    scale = 1.0 / np.sqrt(np.diag(information))
    scaled = information * scale[:, None] * scale[None, :]
    try:
        return np.linalg.inv(scaled) * scale[:, None] * scale[None, :]
    except np.linalg.LinAlgError:
        raise numerical_error("information matrix is singular")


def fit_logistic_matrix(
    X: np.ndarray,
    y: np.ndarray,
    feature_names: Sequence[str],
    cfg: Optional[TrainingConfig] = None,
) -> LogisticModel:
    """
    Maximize the ridge-conditioned Bernoulli log-likelihood by Newton/IRLS.

    Every accepted step increases the penalized objective (step halving);
    the trace is kept in ``meta.objective_trace``. Constant columns are left
    out of the fit and come back with coefficient 0.

    Args:
        X: n x p matrix in raw units
        y: n labels in {0, 1}
        feature_names: p column names
        cfg: Solver settings

    Returns:
        LogisticModel: Fitted model over all ``feature_names``

    Raises:
        PipelineError: validation for empty/one-class input, numerical for
            non-convergence or separation
    """
    cfg = cfg or TrainingConfig()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    names = list(feature_names)

    n = X.shape[0]
    if n == 0:
        raise validation_error("no instances to train on")
    if X.ndim != 2 or X.shape[1] != len(names):
        raise validation_error(f"design has {X.shape[1] if X.ndim == 2 else '?'} columns for {len(names)} features")
    if not np.all(np.isfinite(X)):
        raise validation_error("feature matrix contains non-finite values")
    if not np.all((y == 0) | (y == 1)):
        raise validation_error("labels must be 0 or 1")
    positives = int(y.sum())
    if positives == 0 or positives == n:
        raise validation_error(
            f"need at least one positive and one negative label, got {positives} of {n}",
            positives=positives,
            n=n,
        )

    active = [j for j in range(X.shape[1]) if X[:, j].max() != X[:, j].min()]
    dropped = [names[j] for j in range(X.shape[1]) if j not in active]
    if dropped:
        logger.warning(f"Dropping constant feature columns: {dropped}")

    design = np.column_stack([np.ones(n), X[:, active]])
    column_scale = np.abs(X[:, active]).max(axis=0) if active else np.zeros(0)
    penalty = penalty_vector(design.shape[1], cfg.ridge_epsilon)

    beta = np.zeros(design.shape[1])
    base_rate = positives / n
    beta[0] = math.log(base_rate / (1.0 - base_rate))

    objective = penalized_objective(design, y, beta, penalty)
    trace = [objective]
    iterations = 0

    def coefficients_of(vector: np.ndarray) -> Dict[str, float]:
        values = {name: 0.0 for name in names}
        for position, j in enumerate(active, start=1):
            values[names[j]] = float(vector[position])
        return values

    while True:
        gradient = penalized_gradient(design, y, beta, penalty)
        grad_norm = float(np.max(np.abs(gradient)))
        logger.debug(f"IRLS iteration {iterations}: objective={objective!r} grad_norm={grad_norm:.3e}")
        if grad_norm < cfg.gradient_tolerance:
            break
        if iterations >= cfg.max_iterations:
            raise numerical_error(
                f"IRLS did not converge in {cfg.max_iterations} iterations (gradient norm {grad_norm:.3e})",
                iterations=iterations,
                grad_norm=grad_norm,
                coefficients=coefficients_of(beta),
                intercept=float(beta[0]),
            )

        step = _scaled_solve(penalized_hessian(design, beta, penalty), gradient)
        factor = 1.0
        for _ in range(MAX_STEP_HALVINGS + 1):
            candidate = beta + factor * step
            candidate_objective = penalized_objective(design, y, candidate, penalty)
            if math.isfinite(candidate_objective) and candidate_objective >= objective:
                break
            factor *= 0.5
        else:
            raise numerical_error(
                f"IRLS line search stalled after {iterations} iterations (gradient norm {grad_norm:.3e})",
                iterations=iterations,
                grad_norm=grad_norm,
                coefficients=coefficients_of(beta),
                intercept=float(beta[0]),
            )

        beta = candidate
        objective = candidate_objective
        trace.append(objective)
        iterations += 1

        contributions = np.abs(beta[1:]) * column_scale
        if contributions.size and float(contributions.max()) > SEPARATION_COEFFICIENT_LIMIT:
            worst = names[active[int(np.argmax(contributions))]]
            raise numerical_error(
                f"perfect separation detected: coefficient of {worst} diverges",
                feature=worst,
                iterations=iterations,
                coefficients=coefficients_of(beta),
            )

    eta = design @ beta
    margin = np.where(y == 1, eta, -eta)
    if float(margin.min()) > -math.log(SEPARATION_PROBABILITY_TOLERANCE):
        raise numerical_error(
            "perfect separation detected: every instance is fitted with probability near its label",
            iterations=iterations,
            coefficients=coefficients_of(beta),
        )

    covariance = _scaled_inverse(penalized_hessian(design, beta, penalty))
    errors = np.sqrt(np.clip(np.diag(covariance), 0.0, None))

    coefficients = coefficients_of(beta)
    standard_errors: List[Optional[float]] = [None] * len(names)
    for position, j in enumerate(active, start=1):
        standard_errors[j] = float(errors[position])

    meta = FitMeta(
        iterations=iterations,
        loglik=log_likelihood(design, y, beta),
        grad_norm=grad_norm,
        config_hash=cfg.config_hash(names),
        dropped_features=dropped,
        objective_trace=trace,
        n_instances=n,
    )
    logger.info(f"IRLS converged in {iterations} iterations, loglik={meta.loglik:.6f}, grad_norm={grad_norm:.3e}")
    return LogisticModel(
        feature_names=names,
        coefficients=[coefficients[name] for name in names],
        intercept=float(beta[0]),
        standard_errors=standard_errors,
        intercept_standard_error=float(errors[0]),
        meta=meta,
    )


def design_matrix(
    instances: Sequence[LabeledInstance],
    feature_names: Sequence[str] = FEATURE_NAMES,
) -> Tuple[np.ndarray, np.ndarray]:
    X = np.array([i.features.values(feature_names) for i in instances], dtype=float).reshape(len(instances), len(feature_names))
    y = np.array([i.label for i in instances], dtype=float)
    return X, y


def fit_logistic(
    instances: Sequence[LabeledInstance],
    cfg: Optional[TrainingConfig] = None,
    feature_names: Sequence[str] = FEATURE_NAMES,
) -> LogisticModel:
    """Fit the production-shaped model over the named predictors of ``instances``."""
    if not instances:
        raise validation_error("no instances to train on")
    X, y = design_matrix(instances, feature_names)
    return fit_logistic_matrix(X, y, feature_names, cfg)


def _feature_values(model: LogisticModel, x: FeatureSource) -> np.ndarray:
    source = x.as_dict() if isinstance(x, FeatureVector) else x
    missing = [name for name in model.feature_names if name not in source]
    if missing:
        raise validation_error(f"missing feature {missing[0]}", feature=missing[0], missing=missing)
    return np.array([float(source[name]) for name in model.feature_names], dtype=float)


def linear_predictor(model: LogisticModel, x: FeatureSource) -> float:
    return model.intercept + float(np.dot(np.asarray(model.coefficients), _feature_values(model, x)))


def predict_probability(model: LogisticModel, x: FeatureSource) -> float:
    """sigmoid(intercept + sum of coefficient * feature)."""
    return float(sigmoid(np.array([linear_predictor(model, x)]))[0])


def score_instances(model: LogisticModel, instances: Sequence[LabeledInstance]) -> np.ndarray:
    """Probabilities of all instances, computed exactly as ``predict_probability`` would."""
    return np.array([predict_probability(model, i.features) for i in instances], dtype=float)


def exp_odds(log_odds: Union[float, Sequence[float], np.ndarray]) -> np.ndarray:
    """exp of log-odds; overflow saturates to inf."""
    with np.errstate(over="ignore"):
        return np.exp(np.asarray(log_odds, dtype=float))


def odds_ratio(model: LogisticModel, feature_name: str) -> float:
    coefficient = model.coefficient(feature_name)
    if coefficient is None:
        raise validation_error(f"unknown feature {feature_name}", feature=feature_name)
    return float(exp_odds(coefficient))


def odds_ratio_table(model: LogisticModel) -> pd.DataFrame:
    """Odds ratios with 95% Wald intervals; interval columns are empty without standard errors."""
    rows = []
    errors = model.standard_errors or [None] * len(model.feature_names)
    for name, coefficient, error in zip(model.feature_names, model.coefficients, errors):
        row = {
            "feature": name,
            "coefficient": coefficient,
            "standard_error": error,
            "odds_ratio": float(exp_odds(coefficient)),
            "ci_lower": None,
            "ci_upper": None,
        }
        if error is not None:
            lower, upper = exp_odds([coefficient - WALD_Z_95 * error, coefficient + WALD_Z_95 * error])
            row["ci_lower"], row["ci_upper"] = float(lower), float(upper)
        rows.append(row)
    return pd.DataFrame(rows, columns=["feature", "coefficient", "standard_error", "odds_ratio", "ci_lower", "ci_upper"])


def sanitarian_feature_name(sanitarian_id: str) -> str:
    return f"{SANITARIAN_FEATURE_PREFIX}{sanitarian_id}"


def fit_sanitarian_model(
    instances: Sequence[LabeledInstance],
    cfg: Optional[TrainingConfig] = None,
) -> Tuple[LogisticModel, Dict[str, float]]:
    """
    Fit the full model: base predictors plus one indicator per previous sanitarian.

    When every instance has a previous sanitarian the indicators would be
    collinear with the intercept, so the most frequent sanitarian (ties by
    id) becomes the reference with coefficient 0. Clustering is unaffected
    by the common shift.

    Returns:
        Tuple[LogisticModel, Dict[str, float]]: Model and sanitarian id -> coefficient
    """
    if not instances:
        raise validation_error("no instances to train on")
    counts = Counter(i.previous_sanitarian for i in instances if i.previous_sanitarian)
    if not counts:
        raise validation_error("no instance has a previous-inspection sanitarian")

    sanitarians = sorted(counts, key=id_sort_key)
    reference = None
    if sum(counts.values()) == len(instances):
        reference = min(sanitarians, key=lambda s: (-counts[s], id_sort_key(s)))
        logger.info(f"Every instance has a previous sanitarian; {reference} is the reference level")
    indicator_ids = [s for s in sanitarians if s != reference]

    names = list(BASE_FEATURE_NAMES) + [sanitarian_feature_name(s) for s in indicator_ids]
    position = {s: len(BASE_FEATURE_NAMES) + k for k, s in enumerate(indicator_ids)}
    X = np.zeros((len(instances), len(names)))
    for row, instance in enumerate(instances):
        X[row, :len(BASE_FEATURE_NAMES)] = instance.features.values(BASE_FEATURE_NAMES)
        column = position.get(instance.previous_sanitarian)
        if column is not None:
            X[row, column] = 1.0
    y = np.array([i.label for i in instances], dtype=float)

    model = fit_logistic_matrix(X, y, names, cfg)
    effects = {s: model.coefficient(sanitarian_feature_name(s)) for s in indicator_ids}
    if reference is not None:
        effects[reference] = 0.0
    logger.info(f"Full model fitted with {len(sanitarians)} sanitarian effects")
    return model, effects


def assign_clusters(
    instances: Sequence[LabeledInstance],
    assignment: ClusterAssignment,
    allow_unmapped: bool = False,
) -> List[LabeledInstance]:
    """
    Replace each instance's cluster one-hot with its previous sanitarian's cluster.

    With ``allow_unmapped`` sanitarians missing from ``assignment`` leave
    their instances unclustered instead of failing.
    """
    unmapped = sorted(
        {i.previous_sanitarian for i in instances if i.previous_sanitarian and i.previous_sanitarian not in assignment.labels},
        key=id_sort_key,
    )
    if unmapped and allow_unmapped:
        logger.warning(f"{len(unmapped)} sanitarians without cluster assignment; their instances stay unclustered")
    elif unmapped:
        raise validation_error(
            f"sanitarians without cluster assignment: {', '.join(unmapped)}",
            sanitarian_ids=unmapped,
        )
    return [
        i.model_copy(update={
            "features": i.features.with_cluster(
                assignment.labels.get(i.previous_sanitarian) if i.previous_sanitarian else None
            )
        })
        for i in instances
    ]


def refit_with_clusters(
    instances: Sequence[LabeledInstance],
    assignment: ClusterAssignment,
    cfg: Optional[TrainingConfig] = None,
) -> Tuple[LogisticModel, List[LabeledInstance]]:
    """Refit the 16-feature model with cluster indicators derived from ``assignment``."""
    clustered = assign_clusters(instances, assignment)
    return fit_logistic(clustered, cfg, FEATURE_NAMES), clustered
