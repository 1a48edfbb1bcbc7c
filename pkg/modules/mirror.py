"""
미러링 항등식과 다운폴딩 모듈

- vee-hat: (G1⊗I)(I⊗G2)(G3⊗I) = (I⊗G4)(G5⊗I)(I⊗G6)를 수치 최적화로 풀이
- N열 블록 미러링: 시작 오프셋 s인 N열 블록을 시작 오프셋 1-s인 N열 블록으로 교체
  (vee-hat 이동 계획을 3큐비트 부분 문제 연쇄로 실행, 실패 시 블록 전체 피팅)
- 다운폴딩: 마지막 N열을 미러링하고 인접한 같은 쌍 게이트를 병합, N열이 남을 때까지 반복
"""

import logging
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .circuit import Circuit, GatePlacement, circuit_unitary, column_sites
from .errors import (FamilyMismatchError, IneligibleForDownfoldError,
                     NonConvergenceError)
from .linalg import phase_invariant_distance
from .matchgate import FamilyTag, GGate, MatchgateBlocks, NativeGate, compose, is_matchgate
from .synth import ParametrizedCircuit, SynthesisOptions, fit_parametrized

logger = logging.getLogger(__name__)

VEE_HAT_TOL = 1e-8
VEE_HAT_RESTARTS = 16
DOWNFOLD_TOL = 1e-7
DOWNFOLD_INNER_TOL = 1e-10
MIRROR_PLAN_LIMIT = 20000


@dataclass
class MirrorSolution:
    """미러링 결과: 시간 순서 게이트/사이트, 열 배치, 잔차, 풀이 방식"""

    family: FamilyTag
    gates: List[GGate]
    sites: List[int]
    residual: float
    columns: Tuple[Tuple[int, ...], ...] = ()
    start_offset: int = 0
    method: str = 'fit'
    moves: int = 0

    def column_gates(self) -> List[List[GGate]]:
        out, k = [], 0
        for col in self.columns:
            out.append(self.gates[k:k + len(col)])
            k += len(col)
        return out

    def unitary(self, n_qubits: int) -> np.ndarray:
        return sequence_unitary(self.gates, self.sites, n_qubits)


def _single_family(gates: Sequence[GGate]) -> FamilyTag:
    families = {g.family for g in gates}
    if len(families) != 1:
        raise FamilyMismatchError(
            f"단일 패밀리 블록만 지원: {sorted(f.code for f in families)}")
    return families.pop()


def _flatten(gates: Sequence[GGate]) -> np.ndarray:
    return np.concatenate([np.asarray(g.angles) for g in gates]) if gates else np.zeros(0)


def _split(family: FamilyTag, x: np.ndarray) -> List[GGate]:
    a = family.arity
    return [GGate(family, x[k:k + a]) for k in range(0, len(x), a)]


def sequence_unitary(gates: Sequence[GGate], sites: Sequence[int], n_qubits: int) -> np.ndarray:
    """시간 순서 G 게이트 열의 행렬"""
    family = _single_family(gates)
    return ParametrizedCircuit(n_qubits, family, sites).unitary(_flatten(gates))


def solve_vee_hat(g1: GGate, g2: GGate, g3: GGate,
                  options: Optional[SynthesisOptions] = None,
                  seed: Optional[int] = None,
                  tol: float = VEE_HAT_TOL) -> MirrorSolution:
    """
    vee-hat 항등식 풀이

    반환 gates는 시간 순서 (G6@1, G5@0, G4@1).
    """
    family = _single_family([g1, g2, g3])
    opts = options or SynthesisOptions()
    target = sequence_unitary([g3, g2, g1], [0, 1, 0], 3)

    a1, a2, a3 = (np.asarray(g.angles) for g in (g1, g2, g3))
    x0 = np.concatenate([a2 / 2, a1 + a3, a2 / 2])
    model = ParametrizedCircuit(3, family, [1, 0, 1])

    try:
        result = fit_parametrized(model, target, x0, opts, seed,
                                  max_restarts=min(opts.max_restarts, VEE_HAT_RESTARTS), tol=tol)
    except NonConvergenceError as e:
        best = MirrorSolution(family, _split(family, e.best.angles), [1, 0, 1],
                              e.best.cost, ((1,), (0,), (1,)), 1)
        raise NonConvergenceError(f"vee-hat 수렴 실패 ({family.code}): {e}",
                                  best=best, cost=best.residual) from e

    return MirrorSolution(family, _split(family, result.angles), [1, 0, 1],
                          result.cost, ((1,), (0,), (1,)), 1)


def block_sites(n_qubits: int, n_columns: int, start_offset: int) -> Tuple[Tuple[int, ...], ...]:
    return tuple(column_sites(n_qubits, (start_offset + c) % 2) for c in range(n_columns))


@dataclass(frozen=True)
class MirrorMove:
    """
    vee-hat 이동 한 번

    order로 현재 게이트 열을 재배열하면 position부터 세 게이트가 연속한다.
    vee: 사이트 (s, s+1, s) → (s+1, s, s+1), hat: 그 반대.
    """

    order: Tuple[int, ...]
    position: int
    kind: str
    site: int


def _predecessors(sites: Sequence[int]) -> List[Tuple[int, ...]]:
    """각 게이트의 큐비트별 직전 게이트 인덱스"""
    last: Dict[int, int] = {}
    preds = []
    for idx, s in enumerate(sites):
        preds.append(tuple(sorted({last[q] for q in (s, s + 1) if q in last})))
        last[s] = last[s + 1] = idx
    return preds


def _depths(sites: Sequence[int], preds: Sequence[Tuple[int, ...]]) -> List[int]:
    depth: List[int] = []
    for p in preds:
        depth.append(1 + max((depth[x] for x in p), default=0))
    return depth


def _trace_key(sites: Sequence[int]) -> Tuple[Tuple[int, int], ...]:
    """교환 재배열에 불변인 층 정규형"""
    return tuple(sorted(zip(_depths(sites, _predecessors(sites)), sites)))


def _candidate_moves(sites: Sequence[int]) -> List[Tuple[MirrorMove, Tuple[int, ...]]]:
    m = len(sites)
    preds = _predecessors(sites)
    anc = [0] * m
    for x in range(m):
        for p in preds[x]:
            anc[x] |= anc[p] | (1 << p)
    desc = [0] * m
    for x in reversed(range(m)):
        for p in preds[x]:
            desc[p] |= desc[x] | (1 << x)

    out = []
    for j in range(m):
        for i in preds[j]:
            if abs(sites[i] - sites[j]) != 1:
                continue
            for k in range(j + 1, m):
                if sites[k] != sites[i] or j not in preds[k] or i not in preds[k]:
                    continue
                if desc[i] & anc[k] != 1 << j:
                    continue
                triple = (1 << i) | (1 << j) | (1 << k)
                before = (anc[i] | anc[j] | anc[k]) & ~triple
                head = [x for x in range(m) if before >> x & 1]
                tail = [x for x in range(m) if not (before | triple) >> x & 1]
                order = tuple(head + [i, j, k] + tail)
                if sites[j] > sites[i]:
                    kind, s, new = 'vee', sites[i], (sites[i] + 1, sites[i], sites[i] + 1)
                else:
                    kind, s, new = 'hat', sites[j], (sites[j], sites[j] + 1, sites[j])
                moved = [sites[x] for x in order]
                moved[len(head):len(head) + 3] = new
                out.append((MirrorMove(order, len(head), kind, s), tuple(moved)))
    return out


@lru_cache(maxsize=None)
def mirror_plan(n_qubits: int, start_offset: int,
                limit: int = MIRROR_PLAN_LIMIT) -> Optional[Tuple[MirrorMove, ...]]:
    """
    N열 블록을 미러 배치로 바꾸는 최단 vee-hat 이동 열 (너비 우선 탐색)

    탐색 상태 수가 limit을 넘으면 None.
    """
    n = n_qubits
    start = tuple(s for col in block_sites(n, n, start_offset) for s in col)
    goal = _trace_key([s for col in block_sites(n, n, 1 - start_offset % 2) for s in col])
    start_key = _trace_key(start)
    parents: Dict[Tuple, Optional[Tuple[Tuple, MirrorMove]]] = {start_key: None}
    queue = deque([(start_key, start)])

    while queue:
        key, sites = queue.popleft()
        if key == goal:
            plan: List[MirrorMove] = []
            while parents[key] is not None:
                key, move = parents[key]
                plan.append(move)
            return tuple(reversed(plan))
        for move, moved in _candidate_moves(sites):
            k = _trace_key(moved)
            if k in parents:
                continue
            parents[k] = (key, move)
            if len(parents) > limit:
                logger.debug(f"미러 계획 탐색 한도 초과: N={n}, 오프셋={start_offset}")
                return None
            queue.append((k, moved))
    return None


def _bond_average_guess(in_sites: Sequence[int], gates: Sequence[GGate],
                        out_sites: Sequence[int], arity: int) -> np.ndarray:
    """결합별 각도 합을 미러 슬롯에 균등 분배 (교환 패밀리에서 정확)"""
    totals: Dict[int, np.ndarray] = {}
    for site, g in zip(in_sites, gates):
        totals[site] = totals.get(site, np.zeros(arity)) + np.asarray(g.angles)
    counts = {s: out_sites.count(s) for s in set(out_sites)}
    return np.concatenate([totals.get(s, np.zeros(arity)) / counts[s] for s in out_sites])


def _chain_vee_hat(gates: Sequence[GGate], in_sites: Sequence[int],
                   plan: Sequence[MirrorMove], out_cols: Tuple[Tuple[int, ...], ...],
                   opts: SynthesisOptions, seed: int, tol: float) -> Optional[List[GGate]]:
    """계획된 3큐비트 vee-hat 부분 문제를 차례로 풀어 미러 배치 게이트를 얻음"""
    seq = list(zip(in_sites, gates))
    for m, move in enumerate(plan):
        seq = [seq[x] for x in move.order]
        p = move.position
        (_, a), (_, b), (_, c) = seq[p:p + 3]
        # hat은 큐비트 반사 후 vee와 같은 부분 문제 (G 게이트는 교환 대칭)
        solution = solve_vee_hat(c, b, a, opts, seed=seed + m, tol=tol)
        s = move.site
        new_sites = (s + 1, s, s + 1) if move.kind == 'vee' else (s, s + 1, s)
        seq[p:p + 3] = list(zip(new_sites, solution.gates))

    sites = [s for s, _ in seq]
    depth = _depths(sites, _predecessors(sites))
    out: List[GGate] = []
    for c, col in enumerate(out_cols):
        layer = sorted((s, k) for k, s in enumerate(sites) if depth[k] == c + 1)
        if tuple(s for s, _ in layer) != col:
            return None
        out.extend(seq[k][1] for _, k in layer)
    return out


def mirror_block(block: Sequence[Sequence[GGate]], n_qubits: int, start_offset: int = 0,
                 options: Optional[SynthesisOptions] = None,
                 seed: Optional[int] = None,
                 tol: float = VEE_HAT_TOL) -> MirrorSolution:
    """
    N열 블록 미러링

    짝수 N은 수직 축 대칭, 홀수 N은 수평 축 대칭이며 둘 다 시작 오프셋이 뒤집힌 N열 배치다.
    vee-hat 이동 계획이 있으면 3큐비트 부분 문제를 연쇄로 풀고 블록 전체를 tol까지 다듬는다.
    계획이 없거나 부분 문제가 실패하면 결합 평균 초기값에서 블록 전체를 직접 피팅한다.
    """
    n = n_qubits
    if n < 3:
        raise ValueError(f"블록 미러링은 3큐비트 이상에서만 정의됨: N={n}")
    if len(block) != n:
        raise ValueError(f"블록 열 수 {len(block)} ≠ N={n}")

    in_cols = block_sites(n, n, start_offset)
    for c, (col, gates) in enumerate(zip(in_cols, block)):
        if len(col) != len(gates):
            raise ValueError(f"{c}번 열 게이트 수 {len(gates)} ≠ 슬롯 {len(col)}")

    gates = [g for col in block for g in col]
    family = _single_family(gates)
    in_sites = [s for col in in_cols for s in col]
    target = sequence_unitary(gates, in_sites, n)

    out_offset = 1 - start_offset % 2
    out_cols = block_sites(n, n, out_offset)
    out_sites = [s for col in out_cols for s in col]
    model = ParametrizedCircuit(n, family, out_sites)
    opts = options or SynthesisOptions()
    seed = opts.seed if seed is None else seed

    method, moves, x0 = 'fit', 0, None
    plan = mirror_plan(n, start_offset % 2)
    if plan is not None:
        try:
            chained = _chain_vee_hat(gates, in_sites, plan, out_cols, opts, seed, tol)
        except NonConvergenceError as e:
            logger.debug(f"vee-hat 연쇄 실패, 블록 피팅으로 전환: {e}")
            chained = None
        if chained is not None:
            method, moves, x0 = 'vee-hat', len(plan), _flatten(chained)
    if x0 is None:
        x0 = _bond_average_guess(in_sites, gates, out_sites, family.arity)

    try:
        result = fit_parametrized(model, target, x0, opts, seed,
                                  max_restarts=min(opts.max_restarts, VEE_HAT_RESTARTS), tol=tol)
    except NonConvergenceError as e:
        best = MirrorSolution(family, _split(family, e.best.angles), out_sites,
                              e.best.cost, out_cols, out_offset, method, moves)
        raise NonConvergenceError(f"블록 미러링 수렴 실패 ({family.code}, N={n}): {e}",
                                  best=best, cost=best.residual) from e

    return MirrorSolution(family, _split(family, result.angles), out_sites,
                          result.cost, out_cols, out_offset, method, moves)


def merge_gates(before: GGate, after: GGate, options: Optional[SynthesisOptions] = None,
                tol: float = DOWNFOLD_INNER_TOL) -> GGate:
    """같은 쌍에 연속 작용하는 두 G 게이트 병합 (after·before를 패밀리 각도로 재피팅)"""
    family = _single_family([before, after])
    m_before, m_after = before.matrix, after.matrix
    if is_matchgate(m_before) and is_matchgate(m_after):
        product = compose(MatchgateBlocks.from_matrix(m_after),
                          MatchgateBlocks.from_matrix(m_before)).embed()
    else:
        product = m_after @ m_before

    x0 = np.asarray(before.angles) + np.asarray(after.angles)
    model = ParametrizedCircuit(2, family, [0])
    result = fit_parametrized(model, product, x0, options, tol=tol)
    return GGate(family, result.angles)


def _prepare_columns(naive: Circuit) -> Tuple[FamilyTag, List[Tuple[int, List[GGate]]],
                                              List[Tuple[int, float]]]:
    """
    나이브 회로를 (오프셋, 게이트 목록) 열로 변환하며 z 필드 회전을 θ0 층에 흡수

    홀수 N에서 다음 G 열이 덮지 않는 큐비트의 회전은 (큐비트, 각도) 잔여 목록으로 반환.
    """
    n = naive.n_qubits
    g_placements = [p for p in naive.placements if p.is_g_gate]
    if not g_placements:
        raise IneligibleForDownfoldError("G 게이트가 없는 회로")
    family = _single_family([p.gate for p in g_placements])
    if family.field_axis in ('x', 'y'):
        raise IneligibleForDownfoldError(
            f"{family.code} (x/y 필드) 회로는 다운폴딩 대상이 아님 - 직접 합성 경로 사용")

    pending: Dict[int, float] = {}
    strays: List[Tuple[int, float]] = []
    absorbing: Optional[int] = None
    columns: Dict[int, List[GatePlacement]] = {}
    order: List[int] = []

    def release():
        if pending and n % 2 == 0:
            raise IneligibleForDownfoldError("필드 회전이 다음 G 열에 모두 흡수되지 않음")
        strays.extend(sorted(pending.items()))
        pending.clear()

    for p in naive.placements:
        if not p.is_g_gate:
            if p.gate.kind != 'rz' or family.field_axis != 'z':
                raise IneligibleForDownfoldError(f"흡수할 수 없는 네이티브 게이트: {p.gate.kind}")
            if absorbing is not None:
                release()
                absorbing = None
            q = p.qubits[0]
            pending[q] = pending.get(q, 0.0) + p.gate.angle
            continue

        gate = p.gate
        if absorbing is not None and p.column != absorbing:
            release()
            absorbing = None
        if pending:
            if absorbing is None:
                absorbing = p.column
            lo, hi = p.site, p.site + 1
            phi = pending.pop(lo, 0.0)
            if abs(pending.pop(hi, 0.0) - phi) > 1e-12:
                raise IneligibleForDownfoldError("쌍의 두 큐비트 필드 회전 각도가 다름")
            angles = list(gate.angles)
            angles[0] += phi
            gate = GGate(family, angles)
            if not pending:
                absorbing = None
        if p.column not in columns:
            columns[p.column] = []
            order.append(p.column)
        columns[p.column].append(GatePlacement(gate, p.site, p.column))

    if pending:
        if n % 2 == 0:
            raise IneligibleForDownfoldError("회로 끝에 흡수되지 않은 필드 회전이 남음")
        release()

    out = []
    for c in order:
        col = sorted(columns[c], key=lambda pl: pl.site)
        offset = col[0].site % 2
        if tuple(pl.site for pl in col) != column_sites(n, offset):
            raise IneligibleForDownfoldError(f"{c}번 열이 교대 열 배치가 아님")
        out.append((offset, [pl.gate for pl in col]))
    return family, out, strays


def _columns_to_circuit(n: int, family: FamilyTag, columns: List[Tuple[int, List[GGate]]],
                        passes: int, boundary: Optional[float] = None) -> Circuit:
    placements = [GatePlacement(g, s, c)
                  for c, (offset, gates) in enumerate(columns)
                  for s, g in zip(column_sites(n, offset), gates)]
    metadata = {'family': family.code, 'downfolded': True, 'passes': passes}
    if boundary is not None:
        placements.append(GatePlacement(NativeGate('rz', (0,), boundary), n - 1))
        metadata['boundary'] = 'z'
    return Circuit(n, tuple(placements), metadata)


def downfold(naive: Circuit, options: Optional[SynthesisOptions] = None,
             polish: bool = True, tol: float = DOWNFOLD_TOL,
             inner_tol: float = DOWNFOLD_INNER_TOL) -> Circuit:
    """
    나이브 회로를 N열 상수 깊이 회로로 다운폴딩

    홀수 N z 필드 회로는 흡수되지 않은 회전을 뺀 G 열로 미러링/병합한 뒤,
    마지막 큐비트 경계 rz 슬롯을 더한 N열 배치를 전체 나이브 행렬에 다시 피팅한다.
    """
    opts = options or SynthesisOptions()
    n = naive.n_qubits
    if not naive.placements:
        return naive
    family, columns, strays = _prepare_columns(naive)

    if len(columns) <= (1 if n == 2 else n) and not strays:
        if all(p.is_g_gate for p in naive.placements):
            return naive
        return _columns_to_circuit(n, family, columns, 0)

    if strays:
        # 열이 N개보다 적으면 항등 열을 덧붙여 경계 슬롯 템플릿 배치로 맞춤
        while len(columns) < n:
            offset = 1 - columns[-1][0]
            columns.append((offset, [GGate(family, np.zeros(family.arity))
                                     for _ in column_sites(n, offset)]))

    target = circuit_unitary(naive, opts.max_qubits)
    passes = 0

    if n == 2:
        gates = [gates[0] for _, gates in columns]
        merged = gates[0]
        for g in gates[1:]:
            merged = merge_gates(merged, g, opts, inner_tol)
            passes += 1
        columns = [(0, [merged])]
    else:
        while len(columns) > n:
            before = len(columns)
            offset = columns[-n][0]
            solution = mirror_block([gates for _, gates in columns[-n:]], n, offset,
                                    opts, seed=opts.seed + passes, tol=inner_tol)
            mirrored = solution.column_gates()
            prev_offset, prev_gates = columns[-n - 1]
            merged = [merge_gates(a, b, opts, inner_tol) for a, b in zip(prev_gates, mirrored[0])]
            tail = [((solution.start_offset + c) % 2, gates)
                    for c, gates in enumerate(mirrored) if c > 0]
            columns = columns[:-n - 1] + [(prev_offset, merged)] + tail
            passes += 1
            logger.info(f"🔄 다운폴딩 패스 {passes}: {before}열 → {len(columns)}열 "
                        f"({solution.method}, 미러 잔차 {solution.residual:.2e})")

    boundary = sum(a for q, a in strays if q == n - 1) if strays else None
    circuit = _columns_to_circuit(n, family, columns, passes, boundary)
    distance = phase_invariant_distance(circuit_unitary(circuit, opts.max_qubits), target)

    if (polish or strays) and distance > inner_tol:
        sites = [s for offset, gates in columns for s in column_sites(n, offset)[:len(gates)]]
        x0 = _flatten([g for _, gates in columns for g in gates])
        if strays:
            x0 = np.append(x0, boundary)
        model = ParametrizedCircuit(n, family, sites, 'z' if strays else None)
        try:
            refined = fit_parametrized(model, target, x0, opts,
                                       max_restarts=opts.max_restarts if strays else 1,
                                       tol=inner_tol)
            angles, cost = refined.angles, refined.cost
        except NonConvergenceError as e:
            angles, cost = e.best.angles, e.best.cost
        if cost < distance:
            if strays:
                angles, boundary = angles[:-1], float(angles[-1])
            gates = _split(family, angles)
            k, rebuilt = 0, []
            for offset, col in columns:
                rebuilt.append((offset, gates[k:k + len(col)]))
                k += len(col)
            columns, distance = rebuilt, cost
            circuit = _columns_to_circuit(n, family, columns, passes, boundary)

    if distance > tol:
        raise NonConvergenceError(f"다운폴딩 결과 거리 {distance:.3e} > {tol:.1e}",
                                  best=circuit, cost=distance)
    logger.info(f"✅ 다운폴딩 완료: {passes} 패스, N={n}, 거리 {distance:.2e}")
    return circuit
