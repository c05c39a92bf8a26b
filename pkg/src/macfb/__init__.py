"""Three-user multiple-access channel with feedback: codes, simulation and rate regions."""
from __future__ import annotations

__version__ = "0.1.0"

from .channel import (ChannelInput, ChannelOutput, ExampleChannel, TableChannel,  # noqa: E402
                      mixture_entropy_closed_form, mixture_conditional_entropy)
from .errors import (DimensionError, ResourceLimitError, SchemaError,  # noqa: E402
                     UnknownVariableError, ValidationError)
from .gf2 import Codebook, LinearCodeSpec, enumerate_codebook, sum_codebook_stats  # noqa: E402
from .info import (CausalPolicy, JointPmf, causal_entropy, conditional_entropy,  # noqa: E402
                   directed_info, entropy, mutual_info)
from .region import (RatePolytope, InputDistribution, SourceConfig, cl_reduction_region,  # noqa: E402
                     corner_point, polytope_contains, multiletter_region, quasi_linear_region)
from .scheme import SchemeConfig, TrialReport, run_baseline_trial, run_trial  # noqa: E402
from .seeding import derive_seed, splitmix64  # noqa: E402
