"""Two-round hierarchical secure aggregation over a prime field, with exact verification."""
from .errors import HSAError, InfeasibleParameters
from .field import PrimeField
from .params import EXAMPLE_1, EXAMPLE_2, SystemParams
from .mds import MdsMatrix, build_candidate, certify_mds, certify_t_private, find_t_private_mds
from .keys import KeyMaterial, deal, key_entropy_audit
from .dropout import DropoutPattern, count_patterns, enumerate_patterns, sample
from .protocol import RateTuple, run_session, server_decode
from .views import LinearView, cond_mi
from .security import check_lemma2, check_relay_security, check_server_security, sweep_security
from .rates import RateRegion, compare, rate_region
from .campaign import CampaignConfig, parse_config, run_campaign

__version__ = "0.1.0"
