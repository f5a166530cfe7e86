"""Nonclassical single-mode states as truncated Fock-basis amplitude vectors.

All states are pure and are represented by a finite complex amplitude list
``c_0 .. c_N`` (a :class:`FockVector`).  Builders evaluate the closed-form
Fock expansions in log-magnitude space, so factorial ratios like
``(2n)!/(2^n n!)`` never overflow, and truncate adaptively: terms are added
until both the next term's squared magnitude and a geometric bound on the
remaining tail fall below ``tail_tol`` (relative to the accumulated norm).

Families provided:

* squeezed vacuum, with ``m`` photons added or subtracted
  (amplitudes proportional to ``sqrt((2n+m)!)/(2^n n!) e^{i n phi} (-tanh r)^n``
  on ``|2n+m>`` for addition, and to
  ``(2n)! e^{i n phi} (-tanh r)^n / (2^n n! sqrt((2n-m)!))`` on ``|2n-m>``
  for subtraction, with the sum starting at ``n = ceil(m/2)``),
* even/odd coherent superpositions (cat states) and plain coherent states,
  including one- and two-photon-added even cats,
* the exponential of the inverse-weighted two-photon raising operator
  ``G = a^dag^2 (1 + n)^{-1}`` acting on vacuum (:func:`janus_exponential`).
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import eval_legendre, gammaln, logsumexp

from .errors import (
    AnnihilatedToZero,
    SubtractFromVacuum,
    TruncationFailure,
    UnsupportedAddition,
    ValidationError,
)

CUTOFF_CAP = 512
DEFAULT_TAIL_TOL = 1e-12

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SqueezeParams:
    """Squeezing magnitude ``r >= 0`` and phase ``phi``, reduced mod 2*pi."""

    r: float
    phi: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.r) or self.r < 0:
            raise ValidationError(f"squeezing magnitude must be finite and >= 0, got {self.r}")
        if not math.isfinite(self.phi):
            raise ValidationError("squeezing phase must be finite")
        reduced = self.phi % TWO_PI
        if reduced >= TWO_PI:  # fmod of a tiny negative rounds up to 2*pi itself
            reduced = 0.0
        object.__setattr__(self, "phi", reduced)


@dataclass(frozen=True)
class CatParams:
    """Coherent amplitude of a cat/coherent state.  |alpha| <= 12 keeps the
    adaptive truncation well inside the cutoff cap."""

    alpha: complex

    def __post_init__(self):
        a = complex(self.alpha)
        if not (math.isfinite(a.real) and math.isfinite(a.imag)):
            raise ValidationError("alpha must be finite")
        if abs(a) > 12.0:
            raise ValidationError(f"|alpha| = {abs(a):g} exceeds the supported bound 12")
        object.__setattr__(self, "alpha", a)


@dataclass(frozen=True)
class FockVector:
    """Normalized amplitudes in the truncated number basis.

    ``amplitudes[n]`` is ``c_n`` for ``n = 0 .. cutoff``; ``discarded_mass``
    is the probability weight dropped by the truncation (exact when a closed
    form for the full norm exists, otherwise a safe geometric bound).
    """

    amplitudes: np.ndarray
    cutoff: int
    discarded_mass: float

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "cutoff", len(amps) - 1)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


SVS_VALIDATED_DELTA = 3
CAT_FAMILIES = ("cat-even", "cat-odd", "coherent")
FAMILIES = ("svs",) + CAT_FAMILIES

_CAT_KIND = {"cat-even": "even", "cat-odd": "odd", "coherent": "coherent"}


@dataclass(frozen=True)
class StateSpec:
    """Uniform address of one state: family, parameters, photon change.

    ``photon_delta > 0`` adds photons, ``< 0`` subtracts (squeezed family
    only), ``0`` leaves the base state.  Cat families support additions
    ``{0, 1, 2}`` on the even cat only.
    """

    family: str
    params: SqueezeParams | CatParams
    photon_delta: int = 0
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.family == "svs":
            if not isinstance(self.params, SqueezeParams):
                raise ValidationError("svs needs SqueezeParams")
            if abs(self.photon_delta) > SVS_VALIDATED_DELTA:
                warnings.warn(
                    f"photon_delta {self.photon_delta} is outside the validated range "
                    f"|m| <= {SVS_VALIDATED_DELTA}; results are unvalidated",
                    stacklevel=2,
                )
        else:
            if not isinstance(self.params, CatParams):
                raise ValidationError(f"{self.family} needs CatParams")
            allowed = (0, 1, 2) if self.family == "cat-even" else (0,)
            if self.photon_delta not in allowed:
                raise UnsupportedAddition(
                    f"{self.family} supports photon_delta in {allowed}, got {self.photon_delta}"
                )
        if not (0 < self.tail_tol < 1):
            raise ValidationError("tail_tol must be in (0, 1)")

    def label(self) -> str:
        base = {"svs": "svs", "cat-even": "ecs", "cat-odd": "ocs", "coherent": "coh"}[self.family]
        m = self.photon_delta
        if m > 0:
            return f"{base}_add{m}"
        if m < 0:
            return f"{base}_sub{-m}"
        return base

    def with_parameter(self, value: float) -> "StateSpec":
        """Return a copy with the family's swept parameter (r or real alpha) set."""
        if self.family == "svs":
            return replace(self, params=replace(self.params, r=float(value)))
        return replace(self, params=CatParams(complex(value)))

    def to_record(self) -> dict:
        """Flat key/value record: {family, r, phi, alpha_re, alpha_im, m, tail_tol}."""
        rec = {"family": self.family, "m": self.photon_delta, "tail_tol": self.tail_tol}
        if self.family == "svs":
            rec["r"] = self.params.r
            rec["phi"] = self.params.phi
        else:
            rec["alpha_re"] = self.params.alpha.real
            rec["alpha_im"] = self.params.alpha.imag
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "StateSpec":
        family = str(rec.get("family", "svs"))
        m = int(rec.get("m", 0))
        tail_tol = float(rec.get("tail_tol", DEFAULT_TAIL_TOL))
        if family == "svs":
            params = SqueezeParams(float(rec.get("r", 0.0)), float(rec.get("phi", 0.0)))
        else:
            params = CatParams(complex(float(rec.get("alpha_re", 0.0)),
                                       float(rec.get("alpha_im", 0.0))))
        return cls(family, params, m, tail_tol)


# ---------------------------------------------------------------------------
# series assembly helpers
# ---------------------------------------------------------------------------

def _finish(indices, log_mags, phases, tail_bound, log_norm_closed=None) -> FockVector:
    """Turn unnormalized series data into a normalized FockVector.

    ``phases`` are unit-modulus complex factors per retained term.  When the
    closed-form log-norm of the untruncated series is known the discarded
    mass is computed exactly from the truncation deficit; otherwise the
    geometric ``tail_bound`` (already relative to the kept norm) is recorded.
    """
    log_mags = np.asarray(log_mags, dtype=float)
    scale = log_mags.max()
    mags = np.exp(log_mags - scale)
    kept = float(np.sum(mags * mags))
    discarded = tail_bound / (1.0 + tail_bound)
    if log_norm_closed is not None:
        # the measured deficit is exact down to rounding noise (~1e-16);
        # below that the geometric bound is the sharper sound value
        total = math.exp(log_norm_closed - 2.0 * scale)
        discarded = min(discarded, max(0.0, 1.0 - kept / total))
    coeffs = mags / math.sqrt(kept) * np.asarray(phases, dtype=np.complex128)
    amps = np.zeros(max(indices) + 1, dtype=np.complex128)
    amps[np.asarray(indices)] = coeffs
    return FockVector(amps, len(amps) - 1, discarded)


def _series_phase(n: int, phi: float) -> complex:
    """Unit factor (-1)^n e^{i n phi}; exactly real when phi == 0."""
    sign = -1.0 if n % 2 else 1.0
    if phi == 0.0:
        return complex(sign)
    return sign * cmath.exp(1j * n * phi)


def _run_series(term_log_mag, term_index, term_phase, tail_tol, what, ratio_limit=0.0):
    """Accumulate series terms until tail_tol is met or the cap is hit.

    ``term_log_mag(n)`` gives the log magnitude of term ``n`` (n = 0, 1, ...
    relative to the series start), ``term_index(n)`` its Fock index.  Stops
    once the geometric bound ``next^2 / (1 - q)`` on the whole remaining tail
    drops below ``tail_tol`` times the accumulated squared norm.  ``q`` upper
    bounds every later term-to-term squared ratio: the local ratio works for
    the families whose ratios decrease, ``ratio_limit`` covers those that
    increase toward an asymptote (tanh^2 r for the squeezed series).
    """
    indices, log_mags, phases = [], [], []
    log_norm = -math.inf
    log_tol = math.log(tail_tol)
    n = 0
    while True:
        lm = term_log_mag(n)
        idx = term_index(n)
        if idx > CUTOFF_CAP:
            raise TruncationFailure(
                f"{what}: cutoff cap {CUTOFF_CAP} reached before tail tolerance {tail_tol:g}"
            )
        indices.append(idx)
        log_mags.append(lm)
        phases.append(term_phase(n))
        log_norm = np.logaddexp(log_norm, 2.0 * lm)
        log_next_sq = 2.0 * term_log_mag(n + 1)
        step = 2.0 * (term_log_mag(n + 2) - term_log_mag(n + 1))
        q = max(math.exp(min(step, 50.0)), ratio_limit)
        if q < 1.0:
            log_tail = log_next_sq - math.log1p(-q)
            if log_tail - log_norm < log_tol:
                return indices, log_mags, phases, math.exp(log_tail - log_norm)
        n += 1


# ---------------------------------------------------------------------------
# squeezed-vacuum family
# ---------------------------------------------------------------------------

def build_svs_family(p: SqueezeParams, m: int, tail_tol: float = DEFAULT_TAIL_TOL) -> FockVector:
    """Squeezed vacuum with ``m`` photons added (m > 0) or subtracted (m < 0).

    Addition normalizes ``a^dag^m S(xi)|0>``; the closed-form norm of the
    series is ``m! (cosh r)^(m+1) P_m(cosh r)`` with ``P_m`` the Legendre
    polynomial, evaluated in log space.  Subtraction normalizes ``a^m S(xi)|0>``
    and requires ``r > 0``.  One-photon subtraction produces the same ray as
    one-photon addition, so ``m = -1`` returns the ``m = +1`` amplitudes
    (index-wise identical; literal evaluation of the subtracted series only
    differs by the global phase ``-e^{i phi}``).
    """
    if m < 0:
        if p.r == 0.0:
            raise SubtractFromVacuum(
                f"cannot subtract {-m} photon(s) from the vacuum (r = 0 makes the norm vanish)"
            )
        if m == -1:
            return build_svs_family(p, 1, tail_tol)
        return _svs_subtracted(p, -m, tail_tol)
    return _svs_added(p, m, tail_tol)


def _svs_added(p: SqueezeParams, m: int, tail_tol: float) -> FockVector:
    t = math.tanh(p.r)
    if t == 0.0:
        amps = np.zeros(m + 1, dtype=np.complex128)
        amps[m] = 1.0
        return FockVector(amps, m, 0.0)
    log_t = math.log(t)
    ln2 = math.log(2.0)

    def log_mag(n):
        return 0.5 * gammaln(2 * n + m + 1) - n * ln2 - gammaln(n + 1) + n * log_t

    idx, lm, ph, tail = _run_series(
        log_mag, lambda n: 2 * n + m, lambda n: _series_phase(n, p.phi), tail_tol,
        f"{m}-photon-added SVS at r={p.r:g}", ratio_limit=t * t,
    )
    log_norm = _log_norm_added(p.r, m)
    vec = _finish(idx, lm, ph, tail, log_norm)
    _check_tail(vec, tail_tol, f"{m}-photon-added SVS at r={p.r:g}")
    return vec


def _svs_subtracted(p: SqueezeParams, m: int, tail_tol: float) -> FockVector:
    t = math.tanh(p.r)
    log_t = math.log(t)
    ln2 = math.log(2.0)
    n0 = (m + 1) // 2  # smallest n with 2n >= m

    def log_mag(k):
        n = n0 + k
        return gammaln(2 * n + 1) - n * ln2 - gammaln(n + 1) \
            - 0.5 * gammaln(2 * n - m + 1) + n * log_t

    idx, lm, ph, tail = _run_series(
        log_mag, lambda k: 2 * (n0 + k) - m, lambda k: _series_phase(n0 + k, p.phi), tail_tol,
        f"{m}-photon-subtracted SVS at r={p.r:g}", ratio_limit=t * t,
    )
    log_norm = math.log(_subtracted_norm_closed(p.r, m)) if m <= 3 else None
    vec = _finish(idx, lm, ph, tail, log_norm)
    _check_tail(vec, tail_tol, f"{m}-photon-subtracted SVS at r={p.r:g}")
    return vec


def _check_tail(vec: FockVector, tail_tol: float, what: str) -> None:
    if vec.discarded_mass >= tail_tol:
        raise TruncationFailure(
            f"{what}: discarded mass {vec.discarded_mass:.3e} >= tail tolerance {tail_tol:g}"
        )


def _log_norm_added(r: float, m: int) -> float:
    """log of m!(cosh r)^(m+1) P_m(cosh r), the added-series squared norm."""
    c = math.cosh(r)
    return gammaln(m + 1) + (m + 1) * math.log(c) + math.log(eval_legendre(m, c))


def _subtracted_norm_closed(r: float, m: int) -> float:
    c, s = math.cosh(r), math.sinh(r)
    if m == 1:
        # not tabulated as a subtracted form anywhere; equals cosh r * sinh^2 r
        return c * s * s
    if m == 2:
        return 3 * c**5 - 5 * c**3 + 2 * c
    if m == 3:
        return 3 * s**4 * (5 * c**3 - 2 * c)
    raise ValueError(f"no closed form for m={m}")


def normalization_constant(kind: str, m: int, p: SqueezeParams, method: str = "closed") -> float:
    """Squared norm of the unnormalized added/subtracted squeezed-vacuum series.

    ``kind="added"`` returns ``m!(cosh r)^(m+1) P_m(cosh r)``;
    ``kind="subtracted"`` returns the polynomial-in-cosh closed form for
    ``m <= 3``.  ``method="series"`` sums the defining series instead, which
    the tests use as the independent route.
    """
    if m < 1:
        raise ValidationError("m must be >= 1")
    if kind == "added":
        if method == "closed":
            return math.exp(_log_norm_added(p.r, m))
        return _norm_series(p.r, m, added=True)
    if kind == "subtracted":
        if p.r == 0.0:
            raise SubtractFromVacuum("subtracted-state norm vanishes at r = 0")
        if method == "series" or m > 3:
            return _norm_series(p.r, m, added=False)
        return _subtracted_norm_closed(p.r, m)
    raise ValidationError(f"kind must be 'added' or 'subtracted', got {kind!r}")


def _norm_series(r: float, m: int, added: bool, rel_tol: float = 1e-16) -> float:
    t = math.tanh(r)
    if t == 0.0:
        return math.factorial(m) if added else 0.0
    log_t2 = 2.0 * math.log(t)
    ln2 = math.log(2.0)
    terms = []
    n = 0 if added else (m + 1) // 2
    while True:
        if added:
            lg = gammaln(2 * n + m + 1) - 2 * n * ln2 - 2 * gammaln(n + 1) + n * log_t2
        else:
            lg = 2 * (gammaln(2 * n + 1) - n * ln2 - gammaln(n + 1)) \
                + n * log_t2 - gammaln(2 * n - m + 1)
        terms.append(lg)
        if len(terms) > 3 and lg < max(terms) + math.log(rel_tol) - 0.5 * abs(math.log1p(-t * t)) - 20:
            break
        n += 1
        if n > 50_000:  # pragma: no cover
            raise TruncationFailure("normalization series did not converge")
    return float(math.exp(logsumexp(terms)))


# ---------------------------------------------------------------------------
# cat family
# ---------------------------------------------------------------------------

def build_cat_family(kind: str, p: CatParams, m_add: int = 0,
                     tail_tol: float = DEFAULT_TAIL_TOL) -> FockVector:
    """Even/odd coherent superpositions, coherent states, and photon-added
    even cats.

    Even cat amplitudes are proportional to ``alpha^{2n}/sqrt((2n)!)`` on
    ``|2n>``; the one/two-photon-added even cats carry the extra factors
    ``sqrt(2n+1)`` and ``sqrt((2n+2)(2n+1))`` and shift the support up by
    ``m_add``.  Only the even cat has known added-photon expansions, so
    ``kind`` in {"odd", "coherent"} requires ``m_add = 0``.
    """
    if kind not in ("even", "odd", "coherent"):
        raise ValidationError(f"kind must be even/odd/coherent, got {kind!r}")
    if m_add not in (0, 1, 2) or (kind != "even" and m_add != 0):
        raise UnsupportedAddition(f"no expansion for {m_add} photon(s) added to the {kind} state")
    alpha = p.alpha
    mag = abs(alpha)
    if mag == 0.0:
        if kind == "odd":
            raise ValidationError("odd cat is undefined at alpha = 0 (zero vector)")
        amps = np.zeros(m_add + 1, dtype=np.complex128)
        amps[m_add] = 1.0
        return FockVector(amps, m_add, 0.0)
    log_a = math.log(mag)
    arg = cmath.phase(alpha)

    if kind == "coherent":
        def log_mag(n):
            return n * log_a - 0.5 * gammaln(n + 1)

        def index(n):
            return n

        def phase(n):
            return cmath.exp(1j * n * arg) if arg else 1.0
    elif kind == "odd":
        def log_mag(n):
            return (2 * n + 1) * log_a - 0.5 * gammaln(2 * n + 2)

        def index(n):
            return 2 * n + 1

        def phase(n):
            return cmath.exp(1j * (2 * n + 1) * arg) if arg else 1.0
    else:
        def log_mag(n):
            lm = 2 * n * log_a - 0.5 * gammaln(2 * n + 1)
            if m_add == 1:
                lm += 0.5 * math.log(2 * n + 1)
            elif m_add == 2:
                lm += 0.5 * math.log((2 * n + 2) * (2 * n + 1))
            return lm

        def index(n):
            return 2 * n + m_add

        def phase(n):
            return cmath.exp(1j * 2 * n * arg) if arg else 1.0

    what = f"{kind} cat (m_add={m_add}) at |alpha|={mag:g}"
    idx, lm, ph, tail = _run_series(log_mag, index, phase, tail_tol, what)
    log_norm = _log_norm_cat(kind, mag, m_add)
    vec = _finish(idx, lm, ph, tail, log_norm)
    _check_tail(vec, tail_tol, what)
    return vec


def _log_norm_cat(kind: str, mag: float, m_add: int) -> float:
    """log squared norm of the unnormalized cat series (closed forms).

    |alpha| <= 12 keeps x = |alpha|^2 <= 144, far from double overflow, so
    the hyperbolic functions are evaluated directly.
    """
    x = mag * mag
    if kind == "coherent":
        return x
    if kind == "odd":
        return math.log(math.sinh(x))
    if m_add == 0:
        return math.log(math.cosh(x))
    if m_add == 1:
        return math.log(math.cosh(x) + x * math.sinh(x))
    return math.log((2.0 + x * x) * math.cosh(x) + 4.0 * x * math.sinh(x))


# ---------------------------------------------------------------------------
# janus exponential
# ---------------------------------------------------------------------------

def janus_exponential(f: float, tail_tol: float = DEFAULT_TAIL_TOL) -> FockVector:
    """Normalized ``exp(f G)|0>`` with ``G = a^dag^2 (1 + a^dag a)^{-1}``.

    Built literally: ``G`` is applied repeatedly to the vacuum and the
    exponential series is summed term by term.  ``G|n> = sqrt((n+2)/(n+1))
    |n+2>``, so the support sits on even indices only.
    """
    if not math.isfinite(f) or f < 0:
        raise ValidationError(f"f must be finite and >= 0, got {f}")
    terms = [np.array([1.0])]  # f^j / j! * G^j |0>, dense on even indices
    norms_sq = [1.0]
    j = 0
    while True:
        prev = terms[-1]
        j += 1
        if 2 * j > CUTOFF_CAP:
            raise TruncationFailure("janus series passed the cutoff cap")
        nxt = np.zeros(j + 1)
        ks = np.arange(j)
        nxt[1:] = prev * np.sqrt((2 * ks + 2) / (2 * ks + 1.0)) * (f / j)
        term_sq = float(nxt[-1] ** 2)  # G^j|0> is a single basis vector scaled
        total = math.fsum(norms_sq)
        ratio = (2.0 * f) ** 2 / ((2 * j + 1) * (2 * j + 2))
        if term_sq < tail_tol * total and ratio < 1.0 \
                and term_sq * ratio / (1.0 - ratio) < tail_tol * total:
            break
        terms.append(nxt)
        norms_sq.append(term_sq)
    width = len(terms[-1])
    acc = np.zeros(width)
    for term in terms:
        acc[: len(term)] += term
    acc /= np.linalg.norm(acc)
    amps = np.zeros(2 * (width - 1) + 1, dtype=np.complex128)
    amps[::2] = acc
    tail = term_sq * (1.0 + ratio / (1.0 - ratio)) / math.fsum(norms_sq)
    return FockVector(amps, len(amps) - 1, tail)


def two_photon_raising_matrix(dim: int) -> np.ndarray:
    """Dense matrix of ``a^dag^2 (1 + a^dag a)^{-1}`` on a dim-dimensional truncation."""
    g = np.zeros((dim, dim))
    n = np.arange(dim - 2)
    g[n + 2, n] = np.sqrt((n + 2) / (n + 1.0))
    return g


# ---------------------------------------------------------------------------
# ladder operators and scalar observables
# ---------------------------------------------------------------------------

def apply_ladder(v: FockVector, direction: str, times: int = 1) -> FockVector:
    """Apply the raising or lowering operator ``times`` times and renormalize.

    This is the independent construction route for the photon-added and
    photon-subtracted families: raising maps ``c_n -> sqrt(n+1) c_n`` shifted
    up, lowering maps ``c_n -> sqrt(n) c_n`` shifted down.
    """
    if direction not in ("raise", "lower"):
        raise ValidationError(f"direction must be 'raise' or 'lower', got {direction!r}")
    if times < 1:
        raise ValidationError("times must be >= 1")
    amps = np.array(v.amplitudes, dtype=np.complex128)
    for _ in range(times):
        if direction == "raise":
            if len(amps) + 1 > CUTOFF_CAP + 1:
                raise TruncationFailure("raising past the cutoff cap")
            out = np.zeros(len(amps) + 1, dtype=np.complex128)
            out[1:] = amps * np.sqrt(np.arange(1, len(amps) + 1))
        else:
            out = amps[1:] * np.sqrt(np.arange(1, len(amps)))
        amps = out
    norm = np.linalg.norm(amps)
    if norm == 0.0 or len(amps) == 0:
        raise AnnihilatedToZero("lowering produced the zero vector")
    return FockVector(amps / norm, len(amps) - 1, v.discarded_mass)


def mean_photon_number(v: FockVector) -> float:
    """Expectation of the number operator, sum of n |c_n|^2."""
    return float(np.sum(np.arange(len(v.amplitudes)) * v.probabilities))


def quadrature_variance(v: FockVector, theta: float) -> float:
    """Variance of the rotated quadrature (a^dag e^{i theta} + a e^{-i theta})/sqrt(2).

    Evaluated from the tridiagonal/pentadiagonal Fock matrix elements; the
    vacuum gives 1/2 in this convention.
    """
    c = v.amplitudes
    n = np.arange(len(c))
    nbar = float(np.sum(n * v.probabilities))
    a_expect = complex(np.sum(np.conj(c[:-1]) * c[1:] * np.sqrt(n[1:]))) if len(c) > 1 else 0.0
    a2_expect = complex(np.sum(np.conj(c[:-2]) * c[2:] * np.sqrt(n[1:-1] * n[2:]))) \
        if len(c) > 2 else 0.0
    mean = math.sqrt(2.0) * (cmath.exp(-1j * theta) * a_expect).real
    mean_sq = (cmath.exp(-2j * theta) * a2_expect).real + nbar + 0.5
    return mean_sq - mean * mean


def build_state(spec: StateSpec) -> FockVector:
    """Construct the FockVector a StateSpec addresses."""
    if spec.family == "svs":
        return build_svs_family(spec.params, spec.photon_delta, spec.tail_tol)
    return build_cat_family(_CAT_KIND[spec.family], spec.params, spec.photon_delta, spec.tail_tol)
