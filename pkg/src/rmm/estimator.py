"""Estimator-style wrappers: ``fit`` solves, ``partial_fit`` absorbs arrivals."""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .decomp import rebuild_decompositions
from .dynamic import apply_arrival
from .popular import NoPopularMatching, popular_state, popular_update
from .static import rmm_solve
from .validation import check_applicants, check_events, check_instance, check_preference_events, check_preferences


class RankMaximalMatcher(BaseEstimator):
    """Rank-maximal matching of a ranked bipartite instance.

    Parameters
    ----------
    reverse : bool
        Visit vertices in decreasing id order while solving.  Changes which
        optimum is returned, never its signature.

    Attributes
    ----------
    state_ : RmmState
    matching_ : Matching
    signature_ : Signature
    paths_ : list of UpdatePath, one per absorbed arrival
    """

    def __init__(self, reverse: bool = False):
        self.reverse = reverse

    def fit(self, X, y=None):
        inst = check_instance(X)
        self.state_ = rmm_solve(inst, reverse=self.reverse)
        self.paths_ = []
        self._refresh()
        return self

    def partial_fit(self, events, y=None):
        check_is_fitted(self, "state_")
        for ev in check_events(events):
            n_r, path, trace = apply_arrival(self.state_, ev, inplace=True)
            self.state_ = rebuild_decompositions(self.state_, trace, n_r)
            self.paths_.append(path)
        self._refresh()
        return self

    def _refresh(self) -> None:
        self.matching_ = self.state_.matching
        self.signature_ = self.state_.signature
        self.n_applicants_ = self.state_.applicant_count
        self.n_posts_ = self.state_.post_count

    def predict(self, applicants):
        """Post matched to each applicant, ``-1`` when unmatched."""
        check_is_fitted(self, "state_")
        return [self.matching_.get(a, -1) for a in check_applicants(applicants, self.n_applicants_)]


class PopularMatcher(BaseEstimator):
    """Popular matching of strict preference lists.

    ``matching_`` is ``None`` when no popular matching exists.
    """

    def fit(self, X, y=None):
        self.state_ = popular_state(check_preferences(X))
        self._refresh()
        return self

    def partial_fit(self, events, y=None):
        check_is_fitted(self, "state_")
        for ev in check_preference_events(events):
            self.state_ = popular_update(self.state_, ev)
        self._refresh()
        return self

    def _refresh(self) -> None:
        m = self.state_.matching
        self.matching_ = None if isinstance(m, NoPopularMatching) else m
        self.exists_ = self.matching_ is not None
        self.n_applicants_ = self.state_.reduction.pref.applicant_count

    def predict(self, applicants):
        check_is_fitted(self, "state_")
        if self.matching_ is None:
            raise ValueError("no popular matching exists")
        return [self.matching_.get(a, -1) for a in check_applicants(applicants, self.n_applicants_)]
