"""Pauli-string operators, the two scarred Hamiltonians, and their scar states.

Model 1 ("H1") is a disordered ring of hard-core bosons with density-assisted
hopping; at half filling it hosts a single low-entanglement eigenstate in the
middle of the spectrum, with a closed product form. Model 2 ("H2") is an open
spin chain that conserves the number of Ising domain walls and the two edge
spins, and hosts a tower of equally spaced scar eigenstates built by repeated
application of a magnon raising operator to a fully polarized root state.

Spin mapping for H1 (little-endian, |0> = sigma^z=+1 = empty site):
    n_j = (1 - Z_j)/2,  d_j = (X_j + iY_j)/2,  d+_j = (X_j - iY_j)/2,
with no exchange strings: hard-core bosons on distinct sites commute.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .statevector import Statevector

_AXES = ("X", "Y", "Z")
_COEFF_TOL = 1e-14
_HERM_TOL = 1e-12

# single-qubit products: (A, B) -> (phase, C or None for identity)
_PAULI_PRODUCT = {
    ("X", "X"): (1.0, None), ("Y", "Y"): (1.0, None), ("Z", "Z"): (1.0, None),
    ("X", "Y"): (1j, "Z"), ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"), ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"), ("X", "Z"): (-1j, "Y"),
}


class PauliString:
    """coefficient * product of single-qubit Paulis (identity elsewhere)."""

    __slots__ = ("coefficient", "factors")

    def __init__(self, coefficient: complex,
                 factors: Union[Mapping[int, str], Iterable[tuple[int, str]]]):
        items = factors.items() if isinstance(factors, Mapping) else factors
        canon = tuple(sorted((int(q), a) for q, a in items))
        for q, a in canon:
            if q < 0:
                raise ValueError("negative qubit index")
            if a not in _AXES:
                raise ValueError(f"unknown Pauli axis {a!r}")
        if len({q for q, _ in canon}) != len(canon):
            raise ValueError("duplicate qubit in factor map")
        self.coefficient = complex(coefficient)
        self.factors = canon

    def factor_map(self) -> dict[int, str]:
        return dict(self.factors)

    def multiply(self, other: "PauliString") -> "PauliString":
        """Operator product self * other with full phase tracking."""
        out = dict(self.factors)
        phase = 1.0 + 0.0j
        for q, b in other.factors:
            a = out.pop(q, None)
            if a is None:
                out[q] = b
            else:
                ph, c = _PAULI_PRODUCT[(a, b)]
                phase *= ph
                if c is not None:
                    out[q] = c
        return PauliString(self.coefficient * other.coefficient * phase, out)

    def __repr__(self):
        body = " ".join(f"{a}{q}" for q, a in self.factors) or "I"
        return f"PauliString({self.coefficient!r}, {body})"


class PauliOperator:
    """Sum of PauliStrings on a fixed number of qubits."""

    __slots__ = ("num_qubits", "terms", "_hermitian", "_compiled")

    def __init__(self, num_qubits: int, terms: Iterable[PauliString] = ()):
        self.num_qubits = int(num_qubits)
        self.terms = tuple(terms)
        for t in self.terms:
            if t.factors and t.factors[-1][0] >= self.num_qubits:
                raise ValueError(f"term {t!r} exceeds {num_qubits} qubits")
        self._hermitian = None
        self._compiled = None

    # -------------------- constructors --------------------

    @classmethod
    def identity(cls, num_qubits: int, coefficient: complex = 1.0):
        return cls(num_qubits, [PauliString(coefficient, {})])

    @classmethod
    def single(cls, num_qubits: int, qubit: int, axis: str,
               coefficient: complex = 1.0):
        return cls(num_qubits, [PauliString(coefficient, {qubit: axis})])

    # -------------------- algebra --------------------

    def _check_match(self, other):
        if not isinstance(other, PauliOperator):
            raise TypeError("expected a PauliOperator")
        if other.num_qubits != self.num_qubits:
            raise ValueError("qubit-count mismatch")

    def __add__(self, other):
        self._check_match(other)
        return PauliOperator(self.num_qubits, self.terms + other.terms)

    def __sub__(self, other):
        self._check_match(other)
        negated = tuple(PauliString(-t.coefficient, t.factors)
                        for t in other.terms)
        return PauliOperator(self.num_qubits, self.terms + negated)

    def __mul__(self, scalar):
        scalar = complex(scalar)
        return PauliOperator(self.num_qubits,
                             [PauliString(scalar * t.coefficient, t.factors)
                              for t in self.terms])

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def __matmul__(self, other):
        self._check_match(other)
        prods = [a.multiply(b) for a in self.terms for b in other.terms]
        return PauliOperator(self.num_qubits, prods).simplify()

    def simplify(self) -> "PauliOperator":
        """Merge duplicate factor maps, drop |coeff| < 1e-14, sort canonically."""
        acc: dict[tuple, complex] = {}
        for t in self.terms:
            acc[t.factors] = acc.get(t.factors, 0.0) + t.coefficient
        kept = [(k, c) for k, c in acc.items() if abs(c) >= _COEFF_TOL]
        kept.sort(key=lambda kc: kc[0])
        return PauliOperator(self.num_qubits,
                             [PauliString(c, k) for k, c in kept])

    # -------------------- structure queries --------------------

    def is_hermitian(self) -> bool:
        """Pauli strings are Hermitian, so: all simplified coefficients real."""
        if self._hermitian is None:
            simp = self.simplify()
            self._hermitian = all(abs(t.coefficient.imag) < _HERM_TOL
                                  for t in simp.terms)
        return self._hermitian

    def is_diagonal(self) -> bool:
        return all(a == "Z" for t in self.terms for _, a in t.factors)

    # -------------------- numeric representations --------------------

    def _term_arrays(self):
        """Per-term (flip mask, Z/Y sign mask, effective coefficient)."""
        if self._compiled is None:
            n_t = len(self.terms)
            mx = np.zeros(n_t, dtype=np.int64)
            mzy = np.zeros(n_t, dtype=np.int64)
            ce = np.zeros(n_t, dtype=np.complex128)
            for i, t in enumerate(self.terms):
                n_y = 0
                for q, a in t.factors:
                    if a in ("X", "Y"):
                        mx[i] |= 1 << q
                    if a in ("Z", "Y"):
                        mzy[i] |= 1 << q
                    n_y += a == "Y"
                ce[i] = t.coefficient * (1j) ** n_y
            self._compiled = (mx, mzy, ce)
        return self._compiled

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        """Dense O|psi> as a flat array (term-by-term bitmask application)."""
        dim = 2 ** self.num_qubits
        if amplitudes.shape != (dim,):
            raise ValueError("amplitude length mismatch")
        mx, mzy, ce = self._term_arrays()
        idx = np.arange(dim, dtype=np.int64)
        out = np.zeros(dim, dtype=np.complex128)
        for i in range(len(ce)):
            src = idx ^ mx[i]
            signs = 1.0 - 2.0 * (np.bitwise_count(src & mzy[i]) & 1)
            out += (ce[i] * signs) * amplitudes[src]
        return out

    def to_dense(self, max_qubits: int = 12) -> np.ndarray:
        """Dense complex matrix; guarded because memory is 4^n."""
        if self.num_qubits > max_qubits:
            raise ValueError(f"dense matrix refused for {self.num_qubits} "
                             f"qubits (limit {max_qubits})")
        dim = 2 ** self.num_qubits
        mx, mzy, ce = self._term_arrays()
        idx = np.arange(dim, dtype=np.int64)
        mat = np.zeros((dim, dim), dtype=np.complex128)
        for i in range(len(ce)):
            signs = 1.0 - 2.0 * (np.bitwise_count(idx & mzy[i]) & 1)
            mat[idx ^ mx[i], idx] += ce[i] * signs
        return mat

    def diagonal_vector(self, frozen: Optional[Mapping[int, int]] = None
                        ) -> np.ndarray:
        """Float64 diagonal of a Z-only operator (optionally frozen qubits)."""
        if not self.is_diagonal():
            raise ValueError("operator is not diagonal")
        frozen = dict(frozen or {})
        active = [q for q in range(self.num_qubits) if q not in frozen]
        pos = {q: k for k, q in enumerate(active)}
        dim = 2 ** len(active)
        idx = np.arange(dim, dtype=np.int64)
        out = np.zeros(dim, dtype=np.float64)
        for t in self.terms:
            c = t.coefficient
            if abs(c.imag) > _HERM_TOL:
                raise ValueError("diagonal operator with complex coefficient")
            mask = 0
            sign = 1.0
            for q, _ in t.factors:
                if q in frozen:
                    sign *= -1.0 if frozen[q] else 1.0
                else:
                    mask |= 1 << pos[q]
            signs = 1.0 - 2.0 * (np.bitwise_count(idx & mask) & 1)
            out += (c.real * sign) * signs
        return out

    def to_mask_form(self, frozen: Optional[Mapping[int, int]] = None
                     ) -> "MaskOperator":
        return _compile_masks(self, frozen)

    def __repr__(self):
        return (f"PauliOperator(num_qubits={self.num_qubits}, "
                f"terms={len(self.terms)})")


def simplify(op: PauliOperator) -> PauliOperator:
    return op.simplify()


@dataclass(frozen=True)
class MaskOperator:
    """Flip-mask factored matrix: H[r, r ^ masks[k]] = values[k, r].

    Each Pauli string flips a fixed set of bits, so the whole operator splits
    into one dense value row per distinct flip mask; values_imag is None when
    every matrix element is real (the usual case for our Hamiltonians).
    """

    masks: np.ndarray
    values: np.ndarray
    values_imag: Optional[np.ndarray]
    dim: int
    is_real: bool


def _compile_masks(op: PauliOperator, frozen=None) -> MaskOperator:
    """Mask form over the non-frozen qubits; frozen ones must appear via Z."""
    frozen = dict(frozen or {})
    active = [q for q in range(op.num_qubits) if q not in frozen]
    pos = {q: k for k, q in enumerate(active)}
    dim = 2 ** len(active)
    idx = np.arange(dim, dtype=np.int64)

    groups: dict[int, list] = {}
    for t in op.terms:
        mask = 0
        mzy = 0
        sign = 1.0
        n_y = 0
        for q, a in t.factors:
            if q in frozen:
                if a != "Z":
                    raise ValueError(f"frozen qubit {q} carries {a}")
                sign *= -1.0 if frozen[q] else 1.0
                continue
            if a in ("X", "Y"):
                mask |= 1 << pos[q]
            if a in ("Z", "Y"):
                mzy |= 1 << pos[q]
            n_y += a == "Y"
        groups.setdefault(mask, []).append(
            (mzy, t.coefficient * sign * (1j) ** n_y))

    mask_list = sorted(groups)
    n_m = len(mask_list)
    values = np.empty((n_m, dim), dtype=np.complex128)
    for k, m in enumerate(mask_list):
        col = np.zeros(dim, dtype=np.complex128)
        for mzy, c in groups[m]:
            signs = 1.0 - 2.0 * (np.bitwise_count(idx & mzy) & 1)
            col += c * signs
        values[k] = col[idx ^ m]  # row-indexed: values[k][r] = H[r, r^m]
    is_real = bool(np.max(np.abs(values.imag), initial=0.0) < _HERM_TOL)
    return MaskOperator(
        np.array(mask_list, dtype=np.int64),
        np.ascontiguousarray(values.real),
        None if is_real else np.ascontiguousarray(values.imag),
        dim, is_real)


# -------------------- text dump format --------------------

def format_operator(op: PauliOperator) -> str:
    """One canonical line per string: `(re,im) X3 Z7` (identity -> `I`)."""
    simp = op.simplify()
    lines = [f"qubits {op.num_qubits}"]
    for t in simp.terms:
        body = " ".join(f"{a}{q}" for q, a in t.factors) or "I"
        c = t.coefficient
        lines.append(f"({c.real!r},{c.imag!r}) {body}")
    return "\n".join(lines) + "\n"


def parse_operator(text: str) -> PauliOperator:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("qubits "):
        raise ValueError("operator dump must start with a `qubits N` line")
    n = int(lines[0].split()[1])
    terms = []
    for ln in lines[1:]:
        coeff_tok, *body = ln.split()
        re_s, im_s = coeff_tok.strip("()").split(",")
        coeff = complex(float(re_s), float(im_s))
        factors = {}
        for tok in body:
            if tok == "I":
                continue
            factors[int(tok[1:])] = tok[0]
        terms.append(PauliString(coeff, factors))
    return PauliOperator(n, terms)


# -------------------- model parameter records --------------------

@dataclass(frozen=True)
class H1Params:
    """Disordered boson ring: N sites, interaction knob alpha, disorder delta.

    Site angles are 2*pi*(j + gamma_j)/N with gamma_j drawn uniformly from
    [-delta/2, delta/2]; the draw is pinned by rng_seed and echoed in outputs.
    """

    num_sites: int
    alpha: float
    disorder_strength: float
    site_offsets: tuple[float, ...]
    rng_seed: int

    def __post_init__(self):
        if self.num_sites % 2 or self.num_sites < 4:
            raise ValueError("num_sites must be even and >= 4 (half filling)")
        if self.disorder_strength < 0:
            raise ValueError("disorder_strength must be >= 0")
        offs = tuple(float(g) for g in self.site_offsets)
        if len(offs) != self.num_sites:
            raise ValueError("need one site offset per site")
        half = self.disorder_strength / 2 + 1e-12
        if any(abs(g) > half for g in offs):
            raise ValueError("site offset outside [-delta/2, delta/2]")
        object.__setattr__(self, "site_offsets", offs)

    @classmethod
    def draw(cls, num_sites: int, alpha: float, disorder_strength: float,
             rng_seed: int) -> "H1Params":
        rng = np.random.default_rng(rng_seed)
        offs = rng.uniform(-disorder_strength / 2, disorder_strength / 2,
                           size=num_sites)
        return cls(num_sites, alpha, disorder_strength, tuple(offs), rng_seed)


@dataclass(frozen=True)
class H2Params:
    """Domain-wall-conserving open chain: kinetic lam, field delta, Ising coupling."""

    num_sites: int
    lam: float
    delta: float
    coupling: float

    def __post_init__(self):
        if self.num_sites < 4:
            raise ValueError("num_sites must be >= 4")


@dataclass(frozen=True)
class SectorSpec:
    """A symmetry sector: boson number for H1, domain walls + edges for H2."""

    model: str
    quantum_number: int
    edge_config: Optional[str] = None

    def __post_init__(self):
        if self.model not in ("H1", "H2"):
            raise ValueError("model must be 'H1' or 'H2'")
        if self.quantum_number < 0:
            raise ValueError("quantum_number must be >= 0")
        if self.model == "H2":
            if self.edge_config not in ("all-zero", "all-one"):
                raise ValueError("H2 sector needs edge_config "
                                 "'all-zero' or 'all-one'")
        elif self.edge_config is not None:
            raise ValueError("edge_config applies to H2 only")


# -------------------- boson-ring couplings and Hamiltonian --------------------

@dataclass(frozen=True)
class RingCouplings:
    """All coupling tensors of the boson ring (real up to 1e-12 residual)."""

    z: np.ndarray          # site phases, unit modulus
    w: np.ndarray          # (z_i+z_j)/(z_i-z_j), purely imaginary
    hop: np.ndarray        # two-site hopping amplitudes
    density: np.ndarray    # density-density couplings
    assisted: np.ndarray   # [i, j, l]: creation i, density j, annihilation l
    onsite: np.ndarray     # single-site potentials
    constant: float


def h1_couplings(p: H1Params) -> RingCouplings:
    n = p.num_sites
    j = np.arange(1, n + 1)
    z = np.exp(2j * np.pi * (j + np.array(p.site_offsets)) / n)

    diff = z[:, None] - z[None, :]
    off = ~np.eye(n, dtype=bool)
    if np.min(np.abs(diff[off])) < 1e-9:
        raise ValueError("degenerate disorder draw: coincident sites")
    w = np.zeros((n, n), dtype=np.complex128)
    w[off] = (z[:, None] + z[None, :])[off] / diff[off]

    hop = -2.0 * w ** 2
    row_sums = w.sum(axis=1)  # sum_l w_il (diagonal w_ii = 0)
    density = (2.0 - p.alpha) * w ** 2 + 4.0 * (
        w * (row_sums[:, None] - w))  # excludes l in {i, j}
    assisted = -p.alpha * w.transpose()[:, :, None] * w[None, :, :]
    # zero the forbidden coincidences i=j, j=l, i=l
    for a in range(n):
        assisted[a, a, :] = 0.0
        assisted[a, :, a] = 0.0
        assisted[:, a, a] = 0.0
    onsite = -2.0 * (w ** 2).sum(axis=1)
    onsite -= (row_sums ** 2 - (w ** 2).sum(axis=1))  # sum_{j != l} w_ij w_il
    constant = -n * (n - 2) * (n - 4) / 6.0

    for name, arr in (("hop", hop), ("density", density),
                      ("assisted", assisted), ("onsite", onsite)):
        if np.max(np.abs(arr.imag)) > 1e-9:
            raise AssertionError(f"{name} couplings are not real")
    return RingCouplings(z, w, hop.real, density.real, assisted.real,
                         onsite.real, constant)


def _hop_strings(i: int, l: int, coeff: float) -> list[PauliString]:
    """coeff * d+_i d_l = coeff/4 (X_i - iY_i)(X_l + iY_l)."""
    c4 = coeff / 4.0
    return [
        PauliString(c4, {i: "X", l: "X"}),
        PauliString(1j * c4, {i: "X", l: "Y"}),
        PauliString(-1j * c4, {i: "Y", l: "X"}),
        PauliString(c4, {i: "Y", l: "Y"}),
    ]


def build_h1(p: H1Params) -> PauliOperator:
    """Boson-ring Hamiltonian in Pauli form (real symmetric by construction)."""
    c = h1_couplings(p)
    n = p.num_sites
    terms: list[PauliString] = [PauliString(c.constant, {})]
    for i in range(n):
        # onsite: G^D_i n_i
        terms.append(PauliString(c.onsite[i] / 2.0, {}))
        terms.append(PauliString(-c.onsite[i] / 2.0, {i: "Z"}))
        for l in range(n):
            if l == i:
                continue
            terms.extend(_hop_strings(i, l, c.hop[i, l]))
            # density-density: G^B_il n_i n_l
            g = c.density[i, l] / 4.0
            terms.append(PauliString(g, {}))
            terms.append(PauliString(-g, {i: "Z"}))
            terms.append(PauliString(-g, {l: "Z"}))
            terms.append(PauliString(g, {i: "Z", l: "Z"}))
            for j in range(n):
                if j == i or j == l:
                    continue
                # assisted hopping: G^C_ijl d+_i d_l n_j
                for s in _hop_strings(i, l, c.assisted[i, j, l] / 2.0):
                    terms.append(s)
                    terms.append(s.multiply(PauliString(-1.0, {j: "Z"})))
    return PauliOperator(n, terms).simplify()


def build_h2(p: H2Params) -> PauliOperator:
    """Domain-wall chain: lam*(X_i - Z X Z) on the bulk + fields + Ising bonds."""
    n = p.num_sites
    terms: list[PauliString] = []
    for q in range(1, n - 1):
        terms.append(PauliString(p.lam, {q: "X"}))
        terms.append(PauliString(-p.lam, {q - 1: "Z", q: "X", q + 1: "Z"}))
    for q in range(n):
        terms.append(PauliString(p.delta, {q: "Z"}))
    for q in range(n - 1):
        terms.append(PauliString(p.coupling, {q: "Z", q + 1: "Z"}))
    return PauliOperator(n, terms).simplify()


def symmetry_operator(spec: SectorSpec, num_qubits: int) -> PauliOperator:
    """Boson-number or domain-wall-number operator (both diagonal)."""
    n = num_qubits
    if spec.model == "H1":
        terms = [PauliString(n / 2.0, {})]
        terms += [PauliString(-0.5, {q: "Z"}) for q in range(n)]
    else:
        terms = [PauliString((n - 1) / 2.0, {})]
        terms += [PauliString(-0.5, {q: "Z", q + 1: "Z"})
                  for q in range(n - 1)]
    return PauliOperator(n, terms)


# -------------------- closed-form scar states --------------------

def scar_state_h1(p: H1Params) -> Statevector:
    """The mid-spectrum scar of the boson ring, exact at every disorder draw.

    Supported on half filling; amplitude of occupation pattern n is
    (-1)^{sum_j (j-1) n_j} prod_{i<j} (z_i - z_j)^{2 n_i n_j - n_i - n_j},
    evaluated in log space so larger rings cannot underflow.
    """
    n = p.num_sites
    z = h1_couplings(p).z
    dim = 2 ** n
    idx = np.arange(dim, dtype=np.int64)
    half = np.bitwise_count(idx) == n // 2
    states = idx[half]

    log_amp = np.zeros(states.size, dtype=np.complex128)
    for i in range(n):
        for j in range(i + 1, n):
            # exponent is -1 iff exactly one of the pair is occupied
            one_occ = (((states >> i) ^ (states >> j)) & 1).astype(bool)
            log_amp[one_occ] -= np.log(z[i] - z[j])
    odd_mask = sum(1 << q for q in range(1, n, 2))
    signs = 1.0 - 2.0 * (np.bitwise_count(states & odd_mask) & 1)

    amp = signs * np.exp(log_amp - log_amp.real.max())
    amp /= np.linalg.norm(amp)
    full = np.zeros(dim, dtype=np.complex128)
    full[states] = amp
    return Statevector(n, full)


def scar_tower_h2(p: H2Params, k: int, tower: str = "zero") -> Statevector:
    """k-th scar of the domain-wall chain (2k walls), for either edge tower.

    Built by k applications of the staggered magnon raising operator
    sum_i (-1)^i P_{i-1} (magnon creation at i) P_{i+1} to the all-|0> root,
    normalized by k! * sqrt(C(N-k-1, k)); tower='one' flips every spin.
    """
    n = p.num_sites
    if not 0 <= k <= n // 2 - 1:
        raise ValueError(f"k={k} outside tower range 0..{n // 2 - 1}")
    if tower not in ("zero", "one"):
        raise ValueError("tower must be 'zero' or 'one'")
    dim = 2 ** n
    idx = np.arange(dim, dtype=np.int64)
    amps = np.zeros(dim, dtype=np.float64)
    amps[0] = 1.0
    for _ in range(k):
        out = np.zeros(dim, dtype=np.float64)
        for q in range(1, n - 1):
            open_sites = np.nonzero(((idx >> (q - 1)) & 7) == 0)[0]
            src = open_sites[amps[open_sites] != 0.0]
            sign = -1.0 if (q + 1) % 2 else 1.0  # (-1)^site, site = q+1
            out[src | (1 << q)] += sign * amps[src]
        amps = out
    amps /= factorial(k) * np.sqrt(comb(n - k - 1, k))
    if tower == "one":
        amps = amps[idx ^ (dim - 1)]
    return Statevector(n, amps.astype(np.complex128))
