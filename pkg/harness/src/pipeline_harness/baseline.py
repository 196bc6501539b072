"""The Default baseline: predict the most frequent training label for
classification, the training mean for regression. Any generated pipeline
worth keeping has to beat this."""

from __future__ import annotations

import pandas as pd
from sklearn import metrics


def default_baseline_score(train_csv: str, test_csv: str, target: str,
                           task: str, delimiter: str = ",") -> float:
    """Macro F1 (classification) or R^2 (regression) of the Default
    predictor, trained on train_csv and scored on test_csv."""
    train = pd.read_csv(train_csv, delimiter=delimiter)
    test = pd.read_csv(test_csv, delimiter=delimiter)
    y_train = train[target]
    y_test = test[target]
    if task == "classification":
        majority = y_train.mode(dropna=True).iloc[0]
        predictions = [majority] * len(y_test)
        return float(metrics.f1_score(y_test, predictions, average="macro"))
    mean_value = float(y_train.mean())
    predictions = [mean_value] * len(y_test)
    return float(metrics.r2_score(y_test, predictions))
