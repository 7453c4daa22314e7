"""Role-diversity measurement and policy-diagnosis workbench for cooperative MARL.

Subpackages:
    metrics informally lives in ``dists`` / ``overlap`` / ``diversity``
    (pure kernels), ``envs`` (desk-scale Dec-POMDP scenarios), ``learner``
    (tabular joint-Q training under sharing / communication / credit axes),
    ``theory`` (fitted-Q-iteration error decomposition on exact MDPs),
    ``diagnosis`` (threshold guideline), and ``cli`` (orchestration).
"""

__version__ = "0.1.0"
