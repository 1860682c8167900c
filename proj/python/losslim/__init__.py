"""H2/Hinf performance limits of lossless systems and swing-equation grids."""

from ._core import (  # noqa: F401
    Controller,
    GeneralizedPlant,
    LosslimError,
    StateSpace,
    __version__,
    build_generalized_plant,
    close_loop,
    closed_loop,
    controllability_rank,
    eigenvector_centrality,
    factor_reduced,
    find_certificate,
    generate_network_json,
    h2_limit,
    h2_limit_swing,
    h2_norm,
    hinf_gamma_feasible,
    hinf_limit,
    hinf_norm,
    jensen_report,
    loop_shift,
    lump_network_json,
    network_gains_json,
    riccati_h2_controller,
    solve_care,
    solve_lyapunov,
    static_hinf_controller,
    structured_h2_controller,
    subblock_gains,
    swing_model_from_network_json,
    swing_statespace,
    verify_certificate,
)
