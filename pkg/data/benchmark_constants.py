"""
Constants of the benchmark models.

Every number a benchmark model or its oracle depends on lives here so that
the model programs, the oracles and the tests read one source of truth.
"""

# Gaussian mean with a prior equal to its posterior: no observations
GAUSS_MEAN_EASY = {
    "prior_mean": 0.0,
    "prior_std": 1.0,
}

# Gaussian mean with an uninformative prior. The observations were drawn once
# from N(2, 1) with a fixed seed and centred so that their sample mean is 2.
GAUSS_MEAN_HARD = {
    "prior_lo": 0.0,
    "prior_hi": 10000.0,
    "noise_std": 1.0,
    "observations": [
        2.9988, 2.4976, 1.0607, 2.7862, 2.1375, -1.0488, 2.6841, 2.2480,
        2.7163, 0.6840, 1.0225, 2.8294, 0.8067, 2.2792, 1.7833, 0.6638,
        1.9164, 3.0854, 2.7982, 3.8705, 3.3138, 1.6190, 3.3059, 1.3249,
        1.5914, -0.0497, 1.0302, 2.3844, 1.5626, 3.1447, 2.9530,
    ],
}

# The three gaussian mean models share their prior and observation; the
# observation noise is given as a variance.
NORMAL_MEAN = {
    "prior_mean": 0.0,
    "prior_std": 1.0,
    "observation": 5.0,
    "noise_variance": 1.0,
    "variance_shape": 3.0,
    "variance_scale": 1.0,
    "fixed_variance": 1.0 / 3.0,
}

BRANCHING = {
    "rate": 4.0,
    "threshold": 4,
    "high_branch_rate": 6.0,
    "fib_multiplier": 3,
    "observation": 6,
}

HMM = {
    "initial": [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    "transitions": [
        [0.1, 0.5, 0.4],
        [0.2, 0.2, 0.6],
        [0.15, 0.15, 0.7],
    ],
    "emission_means": [-1.0, 1.0, 0.0],
    "emission_std": 1.0,
    "observations": [0.9, 0.8, 0.7, 0.0, -0.025, -5.0, -2.0, -0.1, 0.0, 0.13],
}

MARSAGLIA = {
    "prior_mean": 1.0,
    "prior_variance": 5.0,
    "noise_variance": 2.0,
    "observations": [9.0, 8.0],
    "uniform_lo": -1.0,
    "uniform_hi": 1.0,
}

CLASSIFIERS = {
    "weight_prior_mean": 0.0,
    "weight_prior_std": 1.0,
    "hidden_layers": [4, 2],
    "classes": ["setosa", "versicolor", "virginica"],
}

IRIS = {
    "rows": 150,
    "rows_per_class": 50,
    "features": ["sepal_length", "sepal_width", "petal_length", "petal_width"],
    "labels": {
        "Iris-setosa": "setosa",
        "Iris-versicolor": "versicolor",
        "Iris-virginica": "virginica",
    },
}
