"""PCI regression errors"""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np

from pavecorpus.errors import EmptyInput, LengthMismatch


@dataclass(frozen=True, slots=True)
class RegressionScores:
    mae: float
    mse: float
    rmse: float
    r2: Optional[float]
    n: int

    def to_dict(self) -> Dict[str, Any]:
        return {"mae": self.mae, "mse": self.mse, "rmse": self.rmse, "r2": self.r2, "n": self.n}


def regression_scores(preds: Sequence[float], gts: Sequence[float]) -> RegressionScores:
    """MAE, MSE, RMSE and R²; R² is None when every ground truth is equal"""
    if len(preds) != len(gts):
        raise LengthMismatch(f"{len(preds)} predictions for {len(gts)} ground-truth values")
    if not gts:
        raise EmptyInput("regression scores need at least one pair")
    y_hat = np.asarray(preds, dtype=float)
    y = np.asarray(gts, dtype=float)
    errors = y_hat - y
    mse = float(np.mean(errors ** 2))
    total = float(np.sum((y - y.mean()) ** 2))
    r2 = None if total == 0 else 1.0 - float(np.sum(errors ** 2)) / total
    return RegressionScores(
        mae=float(np.mean(np.abs(errors))),
        mse=mse,
        rmse=float(np.sqrt(mse)),
        r2=r2,
        n=len(gts),
    )
