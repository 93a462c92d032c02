"""Separability analysis of the reduced apparatus state.

After the interaction the pointers alone carry the record of the
measurement. Whether that record can be read dial-by-dial comes down to
whether the reduced apparatus density matrix is separable across the
pointers. Two complementary tools live here:

* constructive certificates: explicit convex decompositions into product
  states, available in the physically transparent cases (commuting
  observables, sequential couplings, first order in the coupling);
* the partial-transpose criterion, whose negative eigenvalues witness
  entanglement when no decomposition exists.

Certificates are never taken on faith: each one is reconstructed and
compared against the actual reduced state, and then revalidated on an
independent grid resolution to rule out discretization artifacts.
"""

from __future__ import annotations

from dataclasses import dataclass, replace as dc_replace
from typing import Callable, Literal, Sequence

import numpy as np

from . import engine
from .engine import Coupling, UnifiedState
from .pointer import PointerSpec, gaussian_state, translate
from .tensors import (
    Cut,
    DensityMatrix,
    DimensionSpec,
    StateVector,
    TRACE_TOL,
    max_abs,
    trace_distance,
)

# Partial-transpose spectrum below this is reported as entanglement.
ENTANGLEMENT_THRESHOLD = -1e-6
CERTIFICATE_TOL = 1e-8
WEIGHT_SUM_TOL = 1e-10
WEIGHT_PRUNE = 1e-14
COMMUTATOR_TOL = 1e-10
# Grid resolution used to revalidate certificates independently.
REVALIDATION_POINTS = 32


class NonCommutingError(ValueError):
    """A decomposition route that needs commuting observables got ones that don't."""


@dataclass(frozen=True)
class ProductTerm:
    """One weighted product state in a separable decomposition."""

    weight: float
    factors: dict[str, StateVector]

    def __post_init__(self) -> None:
        if self.weight < 0:
            raise ValueError(f"term weight must be nonnegative, got {self.weight}")
        if not self.factors:
            raise ValueError("term must carry at least one factor")


@dataclass(frozen=True)
class SeparableDecomposition:
    """Convex combination of product states over labeled factors.

    Weights must sum to one. Factors are usually normalized pure states;
    the first-order certificate stores deliberately unnormalized polynomial
    factors and says so in its ``kind``.
    """

    terms: tuple[ProductTerm, ...]
    kind: str = "exact"

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("decomposition needs at least one term")
        labels = set(self.terms[0].factors)
        for term in self.terms:
            if set(term.factors) != labels:
                raise ValueError("all terms must carry the same factor labels")
        total = sum(t.weight for t in self.terms)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1")

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(t.weight for t in self.terms)

    def reconstruct(self, dims: DimensionSpec, normalized: bool = True) -> DensityMatrix:
        """Assemble the density matrix the decomposition claims to equal."""
        total = np.zeros((dims.total, dims.total), dtype=complex)
        for term in self.terms:
            amp = np.ones(1, dtype=complex)
            for label in dims.labels:
                amp = np.kron(amp, term.factors[label].amplitudes)
            total += term.weight * np.outer(amp, amp.conj())
        return DensityMatrix(dims, total, normalized=normalized)

    def validate(self, target: DensityMatrix) -> float:
        """Trace distance between the reconstruction and the target state."""
        return trace_distance(self.reconstruct(target.dims, target.normalized), target)


Status = Literal["separable", "entangled", "inconclusive"]


@dataclass(frozen=True)
class SeparabilityVerdict:
    status: Status
    cut: Cut
    ppt_min: float | None = None
    certificate: SeparableDecomposition | None = None
    certificate_error: float | None = None
    method: str = "ppt"
    notes: tuple[str, ...] = ()


def ppt_min_eigenvalue(rho: DensityMatrix, cut: Cut) -> float:
    """Smallest eigenvalue after transposing the second block of the cut.

    Negative values witness entanglement across the cut; for a pair of
    qubit-sized factors nonnegativity is also sufficient for separability,
    while for larger factors it is only necessary.
    """
    if not rho.normalized or abs(rho.trace - 1.0) > TRACE_TOL:
        raise ValueError("partial transpose analysis expects a normalized state")
    left, right = tuple(cut[0]), tuple(cut[1])
    labels = set(rho.dims.labels)
    if set(left) | set(right) != labels or set(left) & set(right) or not left or not right:
        raise ValueError(f"cut {cut} does not partition factors {rho.dims.labels}")
    sizes = rho.dims.sizes
    n = len(sizes)
    order = [rho.dims.axis(lab) for lab in left + right]
    t = rho.matrix.reshape(sizes + sizes)
    t = np.transpose(t, order + [n + i for i in order])
    dl = int(np.prod([rho.dims.dim(lab) for lab in left]))
    dr = int(np.prod([rho.dims.dim(lab) for lab in right]))
    m = t.reshape(dl, dr, dl, dr).transpose(0, 3, 2, 1).reshape(dl * dr, dl * dr)
    return float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())


def _joint_eigensystem(
    a: np.ndarray, b: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Common eigenbasis of two commuting Hermitian matrices.

    Diagonalizes ``a``, then ``b`` inside each degenerate eigenspace of
    ``a``. Returns the paired eigenvalues and the basis columns.
    """
    wa, va = np.linalg.eigh(a)
    a_vals, b_vals, columns = [], [], []
    i = 0
    while i < len(wa):
        j = i
        while j < len(wa) and wa[j] - wa[i] <= COMMUTATOR_TOL:
            j += 1
        block = va[:, i:j]
        sub = block.conj().T @ b @ block
        wb, ub = np.linalg.eigh((sub + sub.conj().T) / 2)
        vecs = block @ ub
        for col in range(j - i):
            a_vals.append(wa[i:j].mean() if j - i > 1 else wa[i])
            b_vals.append(wb[col])
            columns.append(vecs[:, col])
        i = j
    return np.array(a_vals), np.array(b_vals), np.array(columns).T


def _translated_gaussian(spec: PointerSpec, shift: float) -> StateVector:
    return translate(gaussian_state(spec), shift, spec.grid)


def commuting_decomposition(
    initial: StateVector,
    specs: Sequence[PointerSpec],
    coupling_a: Coupling,
    coupling_b: Coupling,
) -> SeparableDecomposition:
    """Product decomposition for two commuting simultaneous couplings.

    In a joint eigenbasis both pointers undergo rigid shifts, so the reduced
    apparatus state is the mixture of shifted Gaussian products weighted by
    the initial populations of the joint eigenvectors.
    """
    a = coupling_a.observable.matrix
    b = coupling_b.observable.matrix
    if max_abs(a @ b - b @ a) > COMMUTATOR_TOL:
        raise NonCommutingError(
            "commuting decomposition asked for observables that do not commute"
        )
    by_label = {spec.label: spec for spec in specs}
    spec_a = by_label[coupling_a.pointer]
    spec_b = by_label[coupling_b.pointer]
    if coupling_a.pointer == coupling_b.pointer:
        raise ValueError("the two couplings must address distinct pointers")
    a_vals, b_vals, basis = _joint_eigensystem(a, b)
    terms = []
    for idx in range(basis.shape[1]):
        weight = float(abs(basis[:, idx].conj() @ initial.amplitudes) ** 2)
        if weight < WEIGHT_PRUNE:
            continue
        terms.append(
            ProductTerm(
                weight=weight,
                factors={
                    spec_a.label: _translated_gaussian(
                        spec_a, coupling_a.impulse * float(a_vals[idx])
                    ),
                    spec_b.label: _translated_gaussian(
                        spec_b, coupling_b.impulse * float(b_vals[idx])
                    ),
                },
            )
        )
    return SeparableDecomposition(tuple(terms), kind="commuting-eigenbasis")


def sequential_decomposition(
    initial: StateVector,
    specs: Sequence[PointerSpec],
    first: Coupling,
    second: Coupling,
) -> SeparableDecomposition:
    """Product decomposition for two couplings applied one after the other.

    Expanding in the eigenbasis of the second observable, its pointer picks
    up a rigid shift per eigenvalue while the first pointer is left in the
    matching conditional state. The mixture over eigenvalues is exactly the
    reduced apparatus state, commuting or not, at any coupling strength.
    """
    if first.pointer == second.pointer:
        raise ValueError("the two couplings must address distinct pointers")
    by_label = {spec.label: spec for spec in specs}
    spec_first = by_label[first.pointer]
    spec_second = by_label[second.pointer]
    staged = engine.evolve(engine.build_initial(initial, [spec_first]), [first])
    m = staged.matrix()
    w, v = np.linalg.eigh(second.observable.matrix)
    terms = []
    for idx in range(v.shape[1]):
        conditional = v[:, idx].conj() @ m
        weight = float(np.vdot(conditional, conditional).real)
        if weight < WEIGHT_PRUNE:
            continue
        terms.append(
            ProductTerm(
                weight=weight,
                factors={
                    spec_first.label: StateVector(
                        spec_first.dims(), conditional / np.sqrt(weight)
                    ),
                    spec_second.label: _translated_gaussian(
                        spec_second, second.impulse * float(w[idx])
                    ),
                },
            )
        )
    return SeparableDecomposition(tuple(terms), kind="sequential-branches")


def _first_order_factor(spec: PointerSpec, shift: float) -> StateVector:
    """Gaussian displaced to first order: (1 - i * shift * momentum) psi."""
    psi = gaussian_state(spec).amplitudes
    k = spec.grid.wavenumbers()
    kicked = np.fft.ifft(k * np.fft.fft(psi))
    return StateVector(spec.dims(), psi - 1j * shift * kicked, normalized=False)


def first_order_product_certificate(
    initial: StateVector,
    specs: Sequence[PointerSpec],
    coupling_a: Coupling,
    coupling_b: Coupling,
) -> tuple[SeparableDecomposition, float]:
    """Product state matching the truncated reduced state at first order.

    The candidate is a single product of Gaussians displaced (to first
    order) by impulse times the initial expectation of each observable. The
    returned defect compares the first-order coefficients of the candidate
    and of the actual truncated reduced state. Both are polynomials in a
    common scaling of the two couplings (degree two and four), so the
    coefficient is extracted exactly by the five-point derivative stencil,
    which is error-free through degree five; the defect is roundoff-limited
    rather than small-coupling-limited.
    """
    by_label = {spec.label: spec for spec in specs}
    couplings = (coupling_a, coupling_b)
    expectations = {
        c.pointer: float(
            (initial.amplitudes.conj() @ (c.observable.matrix @ initial.amplitudes)).real
        )
        for c in couplings
    }

    def truncated_reduced(scale: float) -> np.ndarray:
        scaled = [dc_replace(c, strength=scale * c.strength) for c in couplings]
        state = engine.build_initial(initial, list(specs))
        return engine.apparatus_density(
            engine.expand_perturbative(state, scaled, order=1)
        ).matrix

    def candidate_reduced(scale: float) -> np.ndarray:
        amp = np.ones(1, dtype=complex)
        for spec in specs:
            c = next(c for c in couplings if c.pointer == spec.label)
            chi = _first_order_factor(spec, scale * c.impulse * expectations[c.pointer])
            amp = np.kron(amp, chi.amplitudes)
        return np.outer(amp, amp.conj())

    def linear_coefficient(f: Callable[[float], np.ndarray]) -> np.ndarray:
        return (-f(1.0) + 8 * f(0.5) - 8 * f(-0.5) + f(-1.0)) / 6.0

    diff = linear_coefficient(truncated_reduced) - linear_coefficient(candidate_reduced)
    defect = float(np.abs(np.linalg.eigvalsh((diff + diff.conj().T) / 2)).sum() / 2)
    term = ProductTerm(
        weight=1.0,
        factors={
            spec.label: _first_order_factor(
                spec,
                next(c for c in couplings if c.pointer == spec.label).impulse
                * expectations[spec.label],
            )
            for spec in specs
        },
    )
    return SeparableDecomposition((term,), kind="first-order-product"), defect


def _replica(state: UnifiedState, points: int) -> UnifiedState:
    """Re-run the recorded history on an independent grid resolution."""
    if state.initial_system is None:
        raise ValueError("state carries no initial system data to rebuild from")
    specs = tuple(
        PointerSpec(
            label=s.label,
            grid=dc_replace(s.grid, points=points),
            x0=s.x0,
            sigma=s.sigma,
        )
        for s in state.pointers
    )
    rebuilt = engine.build_initial(state.initial_system, specs)
    for phase in state.history:
        rebuilt = engine.evolve(rebuilt, phase)
    return rebuilt


def _certificate_route(
    state: UnifiedState,
) -> tuple[str, SeparableDecomposition] | None:
    """Pick the constructive decomposition the recorded history supports."""
    if state.initial_system is None:
        return None
    initial = state.initial_system
    specs = state.pointers
    if not state.history:
        term = ProductTerm(
            weight=1.0, factors={s.label: gaussian_state(s) for s in specs}
        )
        return "uncoupled-product", SeparableDecomposition((term,), kind="uncoupled")
    if len(state.history) == 1 and len(state.history[0]) == 2 and len(specs) == 2:
        ca, cb = state.history[0]
        if ca.pointer != cb.pointer:
            a, b = ca.observable.matrix, cb.observable.matrix
            if max_abs(a @ b - b @ a) <= COMMUTATOR_TOL:
                return (
                    "commuting-eigenbasis",
                    commuting_decomposition(initial, specs, ca, cb),
                )
    if (
        len(state.history) == 2
        and all(len(phase) == 1 for phase in state.history)
        and len(specs) == 2
    ):
        (first,), (second,) = state.history
        if first.pointer != second.pointer:
            return (
                "sequential-branches",
                sequential_decomposition(initial, specs, first, second),
            )
    return None


def readability_check(state: UnifiedState, cut: Cut | None = None) -> SeparabilityVerdict:
    """Decide whether the pointer record is readable dial-by-dial.

    Tries a constructive product decomposition first, validating it against
    the reduced state on the state's own grid and again on an independent
    resolution. When no decomposition route applies, falls back to the
    partial-transpose witness. Truncated states are refused: their reduced
    matrices are not states and the analysis would be meaningless.
    """
    if state.provenance != "exact":
        raise ValueError(
            f"readability analysis refuses {state.provenance} states; "
            f"evolve exactly instead"
        )
    pdims = state.pointer_dims()
    if pdims.total > engine.DENSE_LIMIT:
        raise ValueError(
            f"apparatus dimension {pdims.total} is too large to analyze; "
            f"rebuild the state on an analysis grid"
        )
    labels = pdims.labels
    if cut is None:
        if len(labels) < 2:
            cut = ((labels[0],), ())
        else:
            cut = ((labels[0],), tuple(labels[1:]))
    rho = engine.apparatus_density(state)
    if len(labels) < 2:
        return SeparabilityVerdict(
            status="separable",
            cut=cut,
            method="single-apparatus",
            notes=("single pointer, nothing to separate",),
        )
    notes: list[str] = []
    route = _certificate_route(state)
    if route is not None:
        method, certificate = route
        error = certificate.validate(rho)
        if error <= CERTIFICATE_TOL:
            replica = _replica(state, REVALIDATION_POINTS)
            replica_route = _certificate_route(replica)
            assert replica_route is not None
            replica_error = replica_route[1].validate(engine.apparatus_density(replica))
            if replica_error <= CERTIFICATE_TOL:
                ppt = ppt_min_eigenvalue(rho, cut)
                if ppt < ENTANGLEMENT_THRESHOLD:
                    raise RuntimeError(
                        f"certificate validated to {error:.3e} yet the partial "
                        f"transpose is {ppt:.3e}; internal inconsistency"
                    )
                return SeparabilityVerdict(
                    status="separable",
                    cut=cut,
                    ppt_min=ppt,
                    certificate=certificate,
                    certificate_error=error,
                    method=method,
                    notes=(f"revalidated at {REVALIDATION_POINTS} points: "
                           f"{replica_error:.3e}",),
                )
            notes.append(
                f"certificate failed revalidation ({replica_error:.3e}), discarded"
            )
        else:
            notes.append(f"certificate failed validation ({error:.3e}), discarded")
    ppt = ppt_min_eigenvalue(rho, cut)
    if ppt < ENTANGLEMENT_THRESHOLD:
        return SeparabilityVerdict(
            status="entangled", cut=cut, ppt_min=ppt, method="ppt", notes=tuple(notes)
        )
    return SeparabilityVerdict(
        status="inconclusive",
        cut=cut,
        ppt_min=ppt,
        method="ppt",
        notes=tuple(notes)
        + ("partial transpose is nonnegative but no decomposition route applies",),
    )
