from qaction.continuum.scan import (
    VARIANTS,
    LambdaRow,
    ProbeRow,
    ProductEvaluation,
    ScanConfig,
    ScanResult,
    ScanRow,
    analyticity_probe,
    cauchy_riemann_residual,
    conjecture_scan,
    finite_mode_product,
    lambda_comparison,
    lambda_value_spread,
    regularized_product,
    tail_bound,
    target,
)

__all__ = [
    "VARIANTS",
    "LambdaRow",
    "ProbeRow",
    "ProductEvaluation",
    "ScanConfig",
    "ScanResult",
    "ScanRow",
    "analyticity_probe",
    "cauchy_riemann_residual",
    "conjecture_scan",
    "finite_mode_product",
    "lambda_comparison",
    "lambda_value_spread",
    "regularized_product",
    "tail_bound",
    "target",
]
