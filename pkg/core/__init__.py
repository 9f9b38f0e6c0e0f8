#  core/__init__.py
"""
持續同調近似器 - 核心計算模組
提供點雲取樣、VR 持續同調、距離、平均與理論界限的核心實現
"""

# 點雲與子抽樣
from core.pointcloud import (
    derive_seed,
    sample_torus,
    sample_sphere,
    sample_annulus,
    subsample,
    restrict,
    perturb,
    distance_matrix,
    as_metric_space
)

# 持續同調
from core.vr_persistence import (
    enclosing_radius,
    build_vr_filtration,
    compute_persistence,
    naive_reduction_oracle,
    filter_by_persistence,
    truncate_essential,
    vr_diagrams
)

from core.diagram_measure import (
    diagonal_projection,
    diagram_to_measure,
    measure_to_diagram,
    total_persistence
)

# 距離
from core.transport import (
    wasserstein,
    bottleneck,
    ot_distance,
    plan_cost,
    plan_marginals,
    pairwise_ot_matrix,
    p_hausdorff
)

# 平均與量化
from core.means import (
    mean_measure,
    quantize,
    centroids_around,
    frechet_function,
    frechet_mean
)

# 理論界限與速率擬合
from core.bounds import (
    bias_bound,
    bias_bound_curve,
    hausdorff_tail_bound,
    optimal_subsample_count,
    variance_bound,
    frechet_bias_bound,
    rate_regime
)

from core.rate_fit import fit_rate

# 定義版本
__version__ = "1.0.0"

# 定義公開的API
__all__ = [
    # 從pointcloud導出
    'derive_seed',
    'sample_torus',
    'sample_sphere',
    'sample_annulus',
    'subsample',
    'restrict',
    'perturb',
    'distance_matrix',
    'as_metric_space',

    # 從vr_persistence導出
    'enclosing_radius',
    'build_vr_filtration',
    'compute_persistence',
    'naive_reduction_oracle',
    'filter_by_persistence',
    'truncate_essential',
    'vr_diagrams',

    # 從diagram_measure導出
    'diagonal_projection',
    'diagram_to_measure',
    'measure_to_diagram',
    'total_persistence',

    # 從transport導出
    'wasserstein',
    'bottleneck',
    'ot_distance',
    'plan_cost',
    'plan_marginals',
    'pairwise_ot_matrix',
    'p_hausdorff',

    # 從means導出
    'mean_measure',
    'quantize',
    'centroids_around',
    'frechet_function',
    'frechet_mean',

    # 從bounds導出
    'bias_bound',
    'bias_bound_curve',
    'hausdorff_tail_bound',
    'optimal_subsample_count',
    'variance_bound',
    'frechet_bias_bound',
    'rate_regime',

    # 從rate_fit導出
    'fit_rate'
]
