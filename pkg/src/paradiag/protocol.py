"""Branch-enumerating LOCC simulator for multipartite compressed teleportation.

Register layout (1-based, matching the circuit wire order): for each party j
its data qudits come first, then its single resource qudit; the leader's
resource qudit and data qudit close the register:

    [P1.data.., P1.res, P2.data.., P2.res, ..., Pn.res, L.res, L.data]

The resource state spans the n+1 resource qudits.  Outputs are re-indexed to
data qudits only, ordered [P1.data.., ..., Pn.data.., L.data], which is also
the qudit order of the input state and of ``target_unitary``.

Controlled variant (GHZ resource): the leader applies F^-1 on its resource
qudit, a controlled-Z against its data qudit, F^-1 again, measures l0 and
broadcasts it; party j applies X^l0 to its resource qudit, performs the
controlled T_j(l) with the resource qudit as control, applies F^-1, measures
l_j and returns it; the leader applies Z^(sum l_j) to its data qudit.  The
exponent signs (X^+l0, Z^+l_j) are build constants fixed by requiring exact
branch-wise correctness; the enumeration below verifies them.

X-compressed variant (Max resource): controlled-X from the leader resource
onto the leader data, F^-1, controlled-X^-1, measure l0; party j applies
Z^-l0 to its resource qudit, then its X-compressed T_j with the resource
qudit substituted for the leader leg, and measures m_j; the leader applies
X^(l0 + sum m_j).  The l0 part of the final correction cancels against the
controlled-X^-1, which is the measurement-simplification identity checked by
``trick_identity_deviation``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import (
    Operator,
    ShapeError,
    StateVector,
    apply_to_qudits,
    embed_operator,
    fourier,
    ghz_state,
    partial_trace,
    pauli,
    prepare_max,
)
from .compression import NotXCompressed, assemble_controlled, is_compressed
from .scalars import Tolerance, global_phase_deviation

__all__ = [
    "Network",
    "Message",
    "Transcript",
    "CostReport",
    "BranchResult",
    "ProtocolRun",
    "measure_qudit",
    "target_unitary",
    "target_unitary_xcompressed",
    "run_mct_controlled",
    "run_mct_xcompressed",
    "trick_identity_deviation",
    "leader_reduced_density",
]


@dataclass(frozen=True)
class Network:
    """Ownership map for one leader and n parties."""

    d: int
    n: int
    party_data: tuple[int, ...]  # data qudits per party

    def __post_init__(self) -> None:
        if self.n < 1 or len(self.party_data) != self.n:
            raise ShapeError(f"need one data size per party, got {self.party_data!r} for n={self.n}")

    @property
    def total_qudits(self) -> int:
        return sum(self.party_data) + self.n + 2

    @property
    def data_qudits(self) -> int:
        return sum(self.party_data) + 1

    def party_data_positions(self, j: int) -> list[int]:
        base = sum(self.party_data[: j - 1]) + (j - 1)
        return [base + i + 1 for i in range(self.party_data[j - 1])]

    def party_resource_position(self, j: int) -> int:
        return sum(self.party_data[:j]) + j

    @property
    def leader_resource_position(self) -> int:
        return sum(self.party_data) + self.n + 1

    @property
    def leader_data_position(self) -> int:
        return self.total_qudits

    @property
    def resource_positions(self) -> list[int]:
        return [self.party_resource_position(j) for j in range(1, self.n + 1)] + [
            self.leader_resource_position
        ]

    def layout(self) -> dict[str, object]:
        owners = {}
        for j in range(1, self.n + 1):
            for pos in self.party_data_positions(j):
                owners[pos] = f"party{j}.data"
            owners[self.party_resource_position(j)] = f"party{j}.resource"
        owners[self.leader_resource_position] = "leader.resource"
        owners[self.leader_data_position] = "leader.data"
        return {str(k): v for k, v in sorted(owners.items())}


@dataclass(frozen=True)
class Message:
    sender: str
    receivers: tuple[str, ...]
    value: int

    @property
    def cdits(self) -> int:
        return len(self.receivers)


@dataclass(frozen=True)
class Transcript:
    messages: tuple[Message, ...]

    @property
    def cdit_count(self) -> int:
        return sum(m.cdits for m in self.messages)

    @property
    def depth(self) -> int:
        """Rounds of communication (broadcast, then parallel returns)."""
        return 2 if self.messages else 0


@dataclass(frozen=True)
class CostReport:
    resource_states: int
    resource_qudits: int
    cdits: int
    baseline_bqst: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "resource_states": self.resource_states,
            "resource_qudits": self.resource_qudits,
            "cdits": self.cdits,
            "baseline_bqst": dict(self.baseline_bqst),
        }


@dataclass(frozen=True)
class BranchResult:
    outcomes: tuple[int, ...]  # (l0, l1, ..., ln)
    probability: float
    output: StateVector
    match: bool
    max_dev: float
    transcript: Transcript


@dataclass(frozen=True)
class ProtocolRun:
    network: Network
    mode: str
    branches: tuple[BranchResult, ...]
    cost: CostReport
    passed: bool
    seed: int | None = None

    def report(self) -> dict:
        return {
            "d": self.network.d,
            "n": self.network.n,
            "mode": self.mode,
            "branches": [
                {
                    "outcomes": list(b.outcomes),
                    "prob": b.probability,
                    "match": b.match,
                    "max_dev": b.max_dev,
                }
                for b in self.branches
            ],
            "cost": {
                "resource_states": self.cost.resource_states,
                "resource_qudits": self.cost.resource_qudits,
                "cdits": self.cost.cdits,
            },
            "baseline_bqst": dict(self.cost.baseline_bqst),
            "pass": self.passed,
        }


def measure_qudit(
    state: StateVector, qudit: int, basis: str = "computational"
) -> list[tuple[int, float, StateVector]]:
    """Exhaustive projective measurement; zero-probability branches omitted.

    The post-states keep the measured qudit (collapsed and renormalized).
    Fourier-basis measurement is F^-1 on the qudit followed by the
    computational meter.
    """
    if qudit < 1 or qudit > state.n:
        raise ShapeError(f"qudit {qudit} out of range for n={state.n}")
    if basis == "fourier":
        state = apply_to_qudits(fourier(state.d).adjoint().mat, state, (qudit,))
    elif basis != "computational":
        raise ValueError(f"unknown basis {basis!r}")
    d, n = state.d, state.n
    psi = np.moveaxis(state.amps.reshape([d] * n), qudit - 1, 0)
    results = []
    for m in range(d):
        branch = psi[m]
        p = float(np.sum(np.abs(branch) ** 2))
        if p <= 1e-15:
            continue
        collapsed = np.zeros_like(psi)
        collapsed[m] = branch / np.sqrt(p)
        post = np.moveaxis(collapsed, 0, qudit - 1).reshape(-1)
        results.append((m, p, StateVector(d, n, post)))
    return results


def _party_sizes(blocks: Sequence[Sequence[Operator]]) -> tuple[int, ...]:
    return tuple(blk[0].n for blk in blocks)


def _validate_blocks(d: int, n: int, blocks: Sequence[Sequence[Operator]], tol: Tolerance) -> None:
    if len(blocks) != n:
        raise ShapeError(f"need one block list per party, got {len(blocks)} for n={n}")
    for j, blist in enumerate(blocks, start=1):
        if len(blist) != d:
            raise ShapeError(f"party {j} needs d={d} blocks, got {len(blist)}")
        m = blist[0].n
        for l, op in enumerate(blist):
            if op.d != d or op.n != m:
                raise ShapeError(f"party {j} block {l} has shape (d={op.d}, n={op.n})")
            if not op.is_unitary(tol):
                raise ShapeError(f"party {j} block {l} is not unitary")


def target_unitary(d: int, n: int, blocks: Sequence[Sequence[Operator]]) -> Operator:
    """Product over parties of the controlled T_j sharing the leader control.

    Acts on the data qudits only; the leader data qudit is last.  The factors
    commute (they share a diagonal control), so the product order is moot.
    """
    _validate_blocks(d, n, blocks, Tolerance(1e-8))
    sizes = _party_sizes(blocks)
    m_total = sum(sizes) + 1
    total = np.eye(d**m_total, dtype=complex)
    for j in range(1, n + 1):
        base = sum(sizes[: j - 1])
        positions = [base + i + 1 for i in range(sizes[j - 1])]
        factor = np.zeros((d**m_total, d**m_total), dtype=complex)
        for l in range(d):
            proj = np.zeros((d, d), dtype=complex)
            proj[l, l] = 1.0
            factor += (
                embed_operator(Operator(d, 1, proj), [m_total], m_total).mat
                @ embed_operator(blocks[j - 1][l], positions, m_total).mat
            )
        total = factor @ total
    return Operator(d, m_total, total)


def target_unitary_xcompressed(d: int, n: int, parties: Sequence[Operator]) -> Operator:
    """Product of the T_j with the leader's data qudit as the shared last leg."""
    sizes = tuple(op.n - 1 for op in parties)
    m_total = sum(sizes) + 1
    total = np.eye(d**m_total, dtype=complex)
    for j in range(1, n + 1):
        base = sum(sizes[: j - 1])
        positions = [base + i + 1 for i in range(sizes[j - 1])] + [m_total]
        total = embed_operator(parties[j - 1], positions, m_total).mat @ total
    return Operator(d, m_total, total)


def _initial_state(net: Network, input_state: StateVector, resource: StateVector) -> StateVector:
    """input (data order) (x) resource (res order), permuted into the layout."""
    combined = input_state.tensor(resource)
    m_data = net.data_qudits
    # combined order: [P1.data.., Pn.data.., L.data, P1.res, ..., Pn.res, L.res]
    source = {}
    pos = 1
    for j in range(1, net.n + 1):
        for p in net.party_data_positions(j):
            source[p] = pos
            pos += 1
    source[net.leader_data_position] = pos
    for j in range(1, net.n + 1):
        source[net.party_resource_position(j)] = m_data + j
    source[net.leader_resource_position] = m_data + net.n + 1
    perm = [source[p] for p in range(1, net.total_qudits + 1)]
    return _permute(combined, perm)


def _permute(state: StateVector, perm: list[int]) -> StateVector:
    psi = state.amps.reshape([state.d] * state.n).transpose([p - 1 for p in perm])
    return StateVector(state.d, state.n, psi.reshape(-1))


def _extract_data(net: Network, state: StateVector, outcomes: Sequence[int]) -> StateVector:
    """Drop the measured-out resource qudits; outcomes fix their indices."""
    d = net.d
    psi = state.amps.reshape([d] * net.total_qudits)
    index: list[object] = [slice(None)] * net.total_qudits
    for pos, m in zip(net.resource_positions, outcomes):
        index[pos - 1] = m
    return StateVector(d, net.data_qudits, psi[tuple(index)].reshape(-1))


def _power_mat(base: Operator, e: int) -> np.ndarray:
    return np.linalg.matrix_power(base.mat, e % base.d)


def _controlled_z(d: int) -> np.ndarray:
    """sum_m |m><m| (x) Z^m; diagonal, so control and target are symmetric."""
    zdiag = pauli(d, "Z").mat.diagonal()
    return np.diag(np.array([zdiag[k] ** m for m in range(d) for k in range(d)], dtype=complex))


def _cost_report(net: Network) -> CostReport:
    return CostReport(
        resource_states=1,
        resource_qudits=net.n + 1,
        cdits=2 * net.n,
        baseline_bqst={"resource_states": net.n, "channels": 2 * net.n},
    )


def _transcript(net: Network, l0: int, returns: Sequence[int]) -> Transcript:
    msgs = [Message("leader", tuple(f"party{j}" for j in range(1, net.n + 1)), l0)]
    msgs += [Message(f"party{j}", ("leader",), int(v)) for j, v in enumerate(returns, start=1)]
    return Transcript(tuple(msgs))


def run_mct_controlled(
    d: int,
    n: int,
    blocks: Sequence[Sequence[Operator]],
    input_state: StateVector,
    mode: str = "all_branches",
    tol: Tolerance = Tolerance(),
    seed: int | None = None,
    samples: int = 20,
) -> ProtocolRun:
    """Execute the controlled-transformation teleportation over all branches.

    Every branch output is compared (up to a global phase) with the target
    unitary applied to the input; the cost report carries the single
    (n+1)-qudit resource state and 2n cdits.
    """
    _validate_blocks(d, n, blocks, tol)
    net = Network(d, n, _party_sizes(blocks))
    if (input_state.d, input_state.n) != (d, net.data_qudits):
        raise ShapeError(
            f"input must live on the {net.data_qudits} data qudits, got n={input_state.n}"
        )
    expected = target_unitary(d, n, blocks).apply(input_state)

    state = _initial_state(net, input_state, ghz_state(d, n + 1))
    f_inv = fourier(d).adjoint().mat
    z = pauli(d, "Z")
    x = pauli(d, "X")
    cz = _controlled_z(d)

    lres, ldata = net.leader_resource_position, net.leader_data_position
    state = apply_to_qudits(f_inv, state, (lres,))
    state = apply_to_qudits(cz, state, (lres, ldata))
    state = apply_to_qudits(f_inv, state, (lres,))

    party_gates = []
    for j in range(1, n + 1):
        m = net.party_data[j - 1]
        # legs [data.., control]: control qudit is last
        party_gates.append(assemble_controlled(list(blocks[j - 1]), m + 1, m + 1).mat)

    rng = np.random.default_rng(seed) if mode == "sample" else None
    branches: list[BranchResult] = []

    def finish(leaf: StateVector, l0: int, returns: list[int], prob: float) -> None:
        corrected = apply_to_qudits(_power_mat(z, sum(returns)), leaf, (ldata,))
        output = _extract_data(net, corrected, [*returns, l0])
        dev = global_phase_deviation(output.amps, expected.amps)
        branches.append(
            BranchResult(
                outcomes=(l0, *returns),
                probability=prob,
                output=output,
                match=dev <= tol.eps,
                max_dev=dev,
                transcript=_transcript(net, l0, returns),
            )
        )

    def run_parties(s: StateVector, l0: int, j: int, returns: list[int], prob: float) -> None:
        if j > n:
            finish(s, l0, returns, prob)
            return
        rpos = net.party_resource_position(j)
        legs = (*net.party_data_positions(j), rpos)
        s = apply_to_qudits(_power_mat(x, l0), s, (rpos,))
        s = apply_to_qudits(party_gates[j - 1], s, legs)
        s = apply_to_qudits(f_inv, s, (rpos,))
        outcomes = measure_qudit(s, rpos)
        if mode == "sample":
            m, p, post = outcomes[rng.choice(len(outcomes), p=_probs(outcomes))]
            run_parties(post, l0, j + 1, returns + [m], prob * p)
        else:
            for m, p, post in outcomes:
                run_parties(post, l0, j + 1, returns + [m], prob * p)

    leader_outcomes = measure_qudit(state, lres)
    if mode == "sample":
        for _ in range(samples):
            l0, p0, post = leader_outcomes[rng.choice(len(leader_outcomes), p=_probs(leader_outcomes))]
            run_parties(post, l0, 1, [], p0)
    elif mode == "all_branches":
        for l0, p0, post in leader_outcomes:
            run_parties(post, l0, 1, [], p0)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    passed = all(b.match for b in branches)
    return ProtocolRun(net, mode, tuple(branches), _cost_report(net), passed, seed)


def _probs(outcomes: list[tuple[int, float, StateVector]]) -> np.ndarray:
    p = np.array([o[1] for o in outcomes])
    return p / p.sum()


def run_mct_xcompressed(
    d: int,
    n: int,
    parties: Sequence[Operator],
    input_state: StateVector,
    mode: str = "all_branches",
    tol: Tolerance = Tolerance(),
    seed: int | None = None,
    samples: int = 20,
) -> ProtocolRun:
    """Execute the X-compressed variant on the Max resource state.

    ``parties[j]`` acts on party j's data qudits plus one final leg that must
    be X-compressed; the protocol substitutes party j's resource qudit for
    that leg, and the branch outputs match the T_j sharing the leader's data
    qudit.
    """
    if len(parties) != n:
        raise ShapeError(f"need one transformation per party, got {len(parties)}")
    for j, op in enumerate(parties, start=1):
        if op.d != d or op.n < 2:
            raise ShapeError(f"party {j} transformation must act on >= 2 qudits of dimension {d}")
        if not op.is_unitary(tol):
            raise ShapeError(f"party {j} transformation is not unitary")
        if not is_compressed(op, op.n, "X", Tolerance(max(tol.eps, 1e-8))):
            raise NotXCompressed(f"party {j} transformation is not X-compressed on its last leg")

    net = Network(d, n, tuple(op.n - 1 for op in parties))
    if (input_state.d, input_state.n) != (d, net.data_qudits):
        raise ShapeError(
            f"input must live on the {net.data_qudits} data qudits, got n={input_state.n}"
        )
    expected = target_unitary_xcompressed(d, n, parties).apply(input_state)

    state = _initial_state(net, input_state, prepare_max(d, n + 1))
    f_inv = fourier(d).adjoint().mat
    x = pauli(d, "X")
    z = pauli(d, "Z")
    dim2 = d * d
    cx = np.zeros((dim2, dim2), dtype=complex)  # sum_m |m><m| (x) X^m
    cx_inv = np.zeros((dim2, dim2), dtype=complex)
    for m in range(d):
        for k in range(d):
            cx[m * d + (k + m) % d, m * d + k] = 1.0
            cx_inv[m * d + (k - m) % d, m * d + k] = 1.0

    lres, ldata = net.leader_resource_position, net.leader_data_position
    state = apply_to_qudits(cx, state, (lres, ldata))
    state = apply_to_qudits(f_inv, state, (lres,))
    state = apply_to_qudits(cx_inv, state, (lres, ldata))

    rng = np.random.default_rng(seed) if mode == "sample" else None
    branches: list[BranchResult] = []

    def finish(leaf: StateVector, l0: int, returns: list[int], prob: float) -> None:
        corrected = apply_to_qudits(_power_mat(x, l0 + sum(returns)), leaf, (ldata,))
        output = _extract_data(net, corrected, [*returns, l0])
        dev = global_phase_deviation(output.amps, expected.amps)
        branches.append(
            BranchResult(
                outcomes=(l0, *returns),
                probability=prob,
                output=output,
                match=dev <= tol.eps,
                max_dev=dev,
                transcript=_transcript(net, l0, returns),
            )
        )

    def run_parties(s: StateVector, l0: int, j: int, returns: list[int], prob: float) -> None:
        if j > n:
            finish(s, l0, returns, prob)
            return
        rpos = net.party_resource_position(j)
        legs = (*net.party_data_positions(j), rpos)
        s = apply_to_qudits(_power_mat(z, -l0), s, (rpos,))
        s = apply_to_qudits(parties[j - 1].mat, s, legs)
        outcomes = measure_qudit(s, rpos)
        if mode == "sample":
            m, p, post = outcomes[rng.choice(len(outcomes), p=_probs(outcomes))]
            run_parties(post, l0, j + 1, returns + [m], prob * p)
        else:
            for m, p, post in outcomes:
                run_parties(post, l0, j + 1, returns + [m], prob * p)

    leader_outcomes = measure_qudit(state, lres)
    if mode == "sample":
        for _ in range(samples):
            l0, p0, post = leader_outcomes[rng.choice(len(leader_outcomes), p=_probs(leader_outcomes))]
            run_parties(post, l0, 1, [], p0)
    elif mode == "all_branches":
        for l0, p0, post in leader_outcomes:
            run_parties(post, l0, 1, [], p0)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    passed = all(b.match for b in branches)
    return ProtocolRun(net, mode, tuple(branches), _cost_report(net), passed, seed)


def trick_identity_deviation(d: int) -> float:
    """Deviation of the measurement-simplification identity, over all branches.

    Controlled-X^-1 followed by a meter on the control and the classically
    controlled X on the target equals the bare meter: the per-outcome Kraus
    maps agree exactly as operators.
    """
    x = pauli(d, "X")
    cx_inv = np.zeros((d * d, d * d), dtype=complex)
    for m in range(d):
        for k in range(d):
            cx_inv[m * d + (k - m) % d, m * d + k] = 1.0
    worst = 0.0
    for m in range(d):
        bra = np.zeros((d, d * d), dtype=complex)
        bra[:, m * d : (m + 1) * d] = np.eye(d)  # <m|_ctrl (x) I_target
        tricked = _power_mat(x, m) @ bra @ cx_inv
        worst = max(worst, float(np.max(np.abs(tricked - bra))))
    return worst


def leader_reduced_density(
    d: int,
    n: int,
    blocks: Sequence[Sequence[Operator]],
    input_state: StateVector,
    l0: int,
    tol: Tolerance = Tolerance(),
) -> np.ndarray:
    """Leader-data reduced state after party measurements, before corrections.

    Averaged over all party outcomes for a fixed broadcast value l0; by
    no-signaling this cannot depend on the parties' choice of blocks.
    """
    _validate_blocks(d, n, blocks, tol)
    net = Network(d, n, _party_sizes(blocks))
    state = _initial_state(net, input_state, ghz_state(d, n + 1))
    f_inv = fourier(d).adjoint().mat
    x = pauli(d, "X")
    cz = _controlled_z(d)
    lres, ldata = net.leader_resource_position, net.leader_data_position
    state = apply_to_qudits(f_inv, state, (lres,))
    state = apply_to_qudits(cz, state, (lres, ldata))
    state = apply_to_qudits(f_inv, state, (lres,))

    post_l0 = [o for o in measure_qudit(state, lres) if o[0] == l0]
    if not post_l0:
        raise ValueError(f"branch l0={l0} has zero probability")
    s = post_l0[0][2]
    for j in range(1, n + 1):
        rpos = net.party_resource_position(j)
        legs = (*net.party_data_positions(j), rpos)
        gate = assemble_controlled(list(blocks[j - 1]), net.party_data[j - 1] + 1, net.party_data[j - 1] + 1).mat
        s = apply_to_qudits(_power_mat(x, l0), s, (rpos,))
        s = apply_to_qudits(gate, s, legs)
        s = apply_to_qudits(f_inv, s, (rpos,))
    # party meters are dephasing in the computational basis on the resource
    # qudits; the leader-data reduced state is unchanged by that dephasing,
    # so the partial trace of s is exactly the outcome-averaged state.
    return partial_trace(s, [ldata])
