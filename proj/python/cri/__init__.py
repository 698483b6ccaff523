"""Python access to the cri column-selection library."""

import json

from ._cri import *  # noqa: F401,F403
from ._cri import _coherence_audit, _order_stat_audit


def order_stat_audit(n, p, r, trials, seed):
    return json.loads(_order_stat_audit(n, p, r, trials, seed))


def coherence_audit(n, p, trials, seed):
    return json.loads(_coherence_audit(n, p, trials, seed))
