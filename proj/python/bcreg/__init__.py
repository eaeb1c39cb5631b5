"""Coarse-to-fine global point cloud registration.

Bilateral-consensus matching with softmax pooling, weighted-SVD alignment,
and target-guided denoising refinement, plus an ICP baseline and a synthetic
large-rotation benchmark. The heavy lifting lives in the C++ extension
module; this package re-exports its public surface.
"""

from bcreg._core import (  # noqa: F401
    BENCHMARK_NOISE_SIGMA,
    SHARP_UNIT_NORM_TAU,
    BenchmarkReport,
    DenoiseConfig,
    ExperimentConfig,
    FeatureBackend,
    IcpConfig,
    NormalizationRecord,
    PipelineConfig,
    PointCloud,
    RegistrationResult,
    RigidTransform,
    __version__,
    apply_transform,
    bilateral_consensus,
    coarse_register,
    combined_loss,
    compose,
    extract_features,
    farthest_point_sampling,
    generate_cloud,
    icp,
    interpolate_features,
    inverse,
    is_rotation,
    load_transform_json,
    loss_rot,
    loss_trans,
    normalize_to_box,
    denormalize,
    p_nearest_neighbors,
    parse_cloud,
    radius_neighbors,
    random_rigid_transform,
    random_subset,
    refined_register,
    register_clouds,
    rotation_error_deg,
    run_benchmark,
    save_transform_json,
    similarity_matrix,
    softmax_pool_top_k,
    target_guided_denoise,
    translation_error,
    weighted_procrustes,
    write_xyz_file,
)
