"""RIS-aided M-ary FM-DCSK link simulator and semi-analytic BER engine."""

from .chaos import ChaosSequence, FmChaoticSignal, fm_modulate, generate_chaos, logistic_next
from .framing import (SchemeConfig, SourcePayload, TxFrame, bit_to_antipodal,
                      bits_to_psk_phase, build_frame, random_payload)
from .channel import (ChannelProfile, ChannelRealization, propagate,
                      sample_aggregate, sample_cascaded)
from .receiver import (DecisionMetrics, DecodedPayload, compute_metrics, decide,
                       demodulate_frame, metric_antipodal, metric_psk)
from .analytic import (SnrMixture, TheoryPoint, average_ber, ber_b_conditional,
                       ber_c_conditional, mixture_from_profile,
                       overall_ber_scheme_I, theory_curve, theory_point)
from .harness import BerPoint, RunSpec, run_point, run_sweep

__version__ = "0.1.0"

__all__ = [
    "ChaosSequence", "FmChaoticSignal", "fm_modulate", "generate_chaos",
    "logistic_next", "SchemeConfig", "SourcePayload", "TxFrame",
    "bit_to_antipodal", "bits_to_psk_phase", "build_frame", "random_payload",
    "ChannelProfile", "ChannelRealization", "propagate", "sample_aggregate",
    "sample_cascaded", "DecisionMetrics", "DecodedPayload", "compute_metrics",
    "decide", "demodulate_frame", "metric_antipodal", "metric_psk",
    "SnrMixture", "TheoryPoint", "average_ber", "ber_b_conditional",
    "ber_c_conditional", "mixture_from_profile", "overall_ber_scheme_I",
    "theory_curve", "theory_point", "BerPoint", "RunSpec", "run_point",
    "run_sweep",
]
