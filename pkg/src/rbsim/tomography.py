"""Quantum process tomography on two qubits.

Preparation and measurement settings are the 36 pairs of one-qubit
rotations {I, X180, X90, X-90, Y90, Y-90} applied to |00> and before
the computational-basis readout.  Reconstruction is linear inversion of
the probability matrix, optionally followed by a projection onto the
completely-positive trace-preserving set in Choi space (alternating
Dykstra projections: eigenvalue clipping for positivity, an affine
shift for trace preservation).
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass

import numpy as np

from . import device as dev
from . import pauli
from .cliffords import gate_perm

ROTATION_NAMES = ("I", "X180", "X90", "X-90", "Y90", "Y-90")

PROJECTION_TOL = 1e-10
PROJECTION_MAX_ITERATIONS = 10_000


@dataclass(frozen=True)
class TomographySettings:
    """The rotation set used for both state preparation and readout."""

    rotations: tuple[str, ...] = ROTATION_NAMES

    @property
    def n_settings(self) -> int:
        return len(self.rotations) ** 2

    def pair_ptms(self) -> list[np.ndarray]:
        out = []
        for g1, g2 in itertools.product(self.rotations, repeat=2):
            out.append(gate_perm(g1).tensor(gate_perm(g2)).to_ptm())
        return out


DEFAULT_SETTINGS = TomographySettings()


def preparation_matrix(
    spam: dev.SpamModel | None = None,
    settings: TomographySettings = DEFAULT_SETTINGS,
) -> np.ndarray:
    """Columns are the prepared Pauli vectors, one per rotation pair."""
    spam = spam or dev.SpamModel.ideal()
    x0 = spam.initial_state()
    return np.column_stack([r @ x0 for r in settings.pair_ptms()])


def measurement_matrix(
    spam: dev.SpamModel | None = None,
    settings: TomographySettings = DEFAULT_SETTINGS,
) -> np.ndarray:
    """Rows map a Pauli vector to outcome probabilities; the row of
    outcome o under measurement setting m is index 4*m + o."""
    spam = spam or dev.SpamModel.ideal()
    readout = spam.confusion.T @ pauli.OUTCOME_MATRIX
    return np.vstack([readout @ r for r in settings.pair_ptms()])


@dataclass
class QptData:
    probabilities: np.ndarray  # shape (4 * n_settings, n_settings)
    shots: int | None
    seed: int


def simulate_qpt(
    channel: np.ndarray,
    spam: dev.SpamModel | None = None,
    shots: int | None = None,
    seed: int = 1234,
    settings: TomographySettings = DEFAULT_SETTINGS,
) -> QptData:
    """Outcome probabilities of every (preparation, measurement) pair.

    Exact by default; with ``shots`` each setting pair is sampled from
    a multinomial over the four outcomes.
    """
    channel = np.asarray(channel, float)
    probs = measurement_matrix(spam, settings) @ channel \
        @ preparation_matrix(spam, settings)
    if shots is not None:
        rng = np.random.default_rng(np.random.SeedSequence((seed, 777)))
        sampled = np.empty_like(probs)
        for m in range(settings.n_settings):
            block = probs[4 * m : 4 * m + 4, :]
            block = np.clip(block, 0.0, None)
            block = block / block.sum(axis=0, keepdims=True)
            for s in range(settings.n_settings):
                sampled[4 * m : 4 * m + 4, s] = (
                    rng.multinomial(shots, block[:, s]) / shots
                )
        probs = sampled
    return QptData(probabilities=probs, shots=shots, seed=seed)


def linear_inversion_ptm(
    data: QptData | np.ndarray,
    spam: dev.SpamModel | None = None,
    settings: TomographySettings = DEFAULT_SETTINGS,
) -> np.ndarray:
    """Least-squares estimate of the transfer matrix.

    ``spam`` here is the model *assumed* by the analysis; passing the
    true one removes preparation and readout bias, passing None (ideal)
    folds any such errors into the channel estimate.
    """
    probs = data.probabilities if isinstance(data, QptData) else data
    c = measurement_matrix(spam, settings)
    x = preparation_matrix(spam, settings)
    return np.linalg.pinv(c) @ probs @ np.linalg.pinv(x)


# --- CPTP projection ---------------------------------------------------------

@dataclass
class ProjectionResult:
    ptm: np.ndarray
    choi: np.ndarray
    iterations: int
    converged: bool
    min_eigenvalue: float
    tp_residual: float


def _project_psd(chi: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh((chi + chi.conj().T) / 2.0)
    vals = np.clip(vals, 0.0, None)
    return (vecs * vals) @ vecs.conj().T


def _project_tp(chi: np.ndarray) -> np.ndarray:
    partial = np.einsum("akbk->ab", chi.reshape(4, 4, 4, 4))
    excess = partial - np.eye(4) / 4.0
    return chi - np.kron(excess, np.eye(4)) / 4.0


def project_cptp(
    r: np.ndarray,
    tol: float = PROJECTION_TOL,
    max_iterations: int = PROJECTION_MAX_ITERATIONS,
) -> ProjectionResult:
    """Nearest (in the alternating-projection sense) CPTP channel.

    Runs Dykstra's scheme between the positive cone and the affine
    trace-preserving set, with the memory term on the cone step only,
    and stops once an iteration moves the Choi matrix by less than
    ``tol`` in Frobenius norm.  The result always ends on the TP
    projection, so the trace constraint holds to machine precision and
    any residual negativity is bounded by the final step size.
    """
    chi = pauli.choi_from_ptm(np.asarray(r, float))
    chi = (chi + chi.conj().T) / 2.0
    correction = np.zeros_like(chi)
    converged = False
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        psd = _project_psd(chi + correction)
        correction = chi + correction - psd
        chi_next = _project_tp(psd)
        delta = np.linalg.norm(chi_next - chi)
        chi = chi_next
        if delta < tol:
            converged = True
            break
    vals = np.linalg.eigvalsh((chi + chi.conj().T) / 2.0)
    return ProjectionResult(
        ptm=np.real(pauli.ptm_from_choi(chi)),
        choi=chi,
        iterations=iterations,
        converged=converged,
        min_eigenvalue=float(vals.min()),
        tp_residual=pauli.choi_tp_residual(chi),
    )


# --- reporting ---------------------------------------------------------------

@dataclass
class QptReport:
    raw_ptm: np.ndarray
    ptm: np.ndarray
    fidelity_raw: float
    fidelity: float
    projection: ProjectionResult
    seed: int


def qpt_report(
    data: QptData,
    ideal: np.ndarray,
    spam: dev.SpamModel | None = None,
    settings: TomographySettings = DEFAULT_SETTINGS,
) -> QptReport:
    """Invert, project, and score against the intended channel."""
    raw = linear_inversion_ptm(data, spam, settings)
    projection = project_cptp(raw)
    return QptReport(
        raw_ptm=raw,
        ptm=projection.ptm,
        fidelity_raw=pauli.avg_gate_fidelity(raw, ideal),
        fidelity=pauli.avg_gate_fidelity(projection.ptm, ideal),
        projection=projection,
        seed=data.seed,
    )


# --- persistence -------------------------------------------------------------

QPT_CSV_HEADER = ("prep", "meas", "outcome", "probability", "shots", "seed")


def write_qpt_csv(path, data: QptData) -> None:
    shots = "exact" if data.shots is None else data.shots
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(QPT_CSV_HEADER)
        rows, cols = data.probabilities.shape
        for m in range(rows // 4):
            for o in range(4):
                for s in range(cols):
                    writer.writerow(
                        (s, m, o,
                         repr(float(data.probabilities[4 * m + o, s])),
                         shots, data.seed)
                    )


def read_qpt_csv(path) -> QptData:
    records = []
    shots: int | None = None
    seed = 0
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        for rec in reader:
            records.append(
                (int(rec["meas"]), int(rec["outcome"]), int(rec["prep"]),
                 float(rec["probability"]))
            )
            shots = None if rec["shots"] == "exact" else int(rec["shots"])
            seed = int(rec["seed"])
    n = max(r[2] for r in records) + 1
    probs = np.zeros((4 * (max(r[0] for r in records) + 1), n))
    for m, o, s, value in records:
        probs[4 * m + o, s] = value
    return QptData(probabilities=probs, shots=shots, seed=seed)
