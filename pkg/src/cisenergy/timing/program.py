"""Lowering of a mapped design into flat arrays for the cycle kernel.

Data moves in *streams*: one per (producer stage, memory) pair, or per
(producer stage, consumer stage) when analog data feeds a digital unit
directly. Elements of a stream are in raster order (row, column, channel).
Each digital stage becomes a *task* on its unit; a task sweeps windows in
raster order and reads its inputs through per-input descriptors:

    kind 0  stencil primary input, window w needs elements up to need[w]
    kind 1  elementwise input, window w needs elements up to (w + 1) * C - 1
    kind 2  whole input, every element must be present before window 0

Each input also carries a CSR free list: the elements whose last use by this
input is window w. A memory slot is released when every input using the
element has passed its last window.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from ..ir.graph import StageKind, topological_order
from ..ir.hardware import DigitalUnitSpec
from ..ir.topology import feeding_array, is_analog_stage, is_digital_stage, resolve_routes, route_memory

KIND_STENCIL, KIND_LINEAR, KIND_WHOLE = 0, 1, 2
CAUSES = ("ProducerNotReady", "MemoryFull", "InsufficientPorts")
UNBOUNDED = 1 << 60


class NonDigitalUnit(ValueError):
    pass


@dataclass
class StencilGeometry:
    """Window schedule of a stencil over an (H, W, C) raster stream."""
    need: np.ndarray  # last element index each window needs
    lastuse: np.ndarray  # last window using each element, -1 if unused
    reads_per_window: int


def stencil_geometry(shape):
    (h, w, c), (kh, kw), (sh, sw) = shape.input_size, shape.kernel, shape.stride
    oh, ow, _ = shape.output_size
    oy = np.arange(oh, dtype=np.int64)
    ox = np.arange(ow, dtype=np.int64)
    need = (((oy[:, None] * sh + kh - 1) * w + (ox[None, :] * sw + kw - 1)) * c + c - 1).ravel()

    def last_cover(n_in, k, s, n_out):
        pos = np.arange(n_in, dtype=np.int64)
        hi = np.minimum(pos // s, n_out - 1)
        lo = -((k - 1 - pos) // s)  # ceil((pos - k + 1) / s)
        lo = np.maximum(lo, 0)
        return np.where(hi >= lo, hi, -1)

    ly = last_cover(h, kh, sh, oh)
    lx = last_cover(w, kw, sw, ow)
    lu = np.where((ly[:, None] >= 0) & (lx[None, :] >= 0), ly[:, None] * ow + lx[None, :], -1)
    lastuse = np.repeat(lu.ravel(), c)
    return StencilGeometry(need, lastuse, kh * kw * c)


@dataclass
class InputSpec:
    stream: int
    kind: int
    channels: int
    reads: int  # per window for kinds 0/1, once for kind 2
    need: np.ndarray = None
    lastuse: np.ndarray = None  # per element, -1 unused


@dataclass
class StreamSpec:
    producer: str
    memory: str  # None for a direct feed
    n: int
    channels: int
    bit_depth: int
    rate: int = 0  # elements per base cycle for analog producers, 0 for digital ones
    direct_consumer: str = None


@dataclass
class Program:
    base_clock: int
    unit_names: list
    memory_names: list
    streams: list
    task_stages: list
    arrays: dict = field(default_factory=dict)
    footprints: dict = field(default_factory=dict)
    capacity: dict = field(default_factory=dict)  # declared capacity in elements
    static_stalls: list = field(default_factory=list)
    max_cycles: int = 0
    patience: int = 0


def _input_specs(stage, stream_ids, streams):
    """Descriptors for every predecessor of a digital stage."""
    out = []
    if stage.kind is StageKind.STENCIL:
        geo = stencil_geometry(stage.shape)
        nwin = stage.shape.num_windows
        for j, p in enumerate(stage.predecessors):
            s = stream_ids[p]
            if j == 0:
                out.append(InputSpec(s, KIND_STENCIL, stage.shape.input_size[2], geo.reads_per_window, geo.need, geo.lastuse))
            else:
                n = streams[s].n
                out.append(InputSpec(s, KIND_WHOLE, streams[s].channels, n, None, np.full(n, nwin - 1, dtype=np.int64)))
    elif stage.kind is StageKind.ELEMENTWISE_BINARY:
        h, w, c = stage.shape.input_size
        per = 2 * c if stage.is_temporal else c
        for p in stage.predecessors:
            s = stream_ids[p]
            lastuse = np.arange(h * w * c, dtype=np.int64) // c
            out.append(InputSpec(s, KIND_LINEAR, c, per, None, lastuse))
    else:
        for p in stage.predecessors:
            s = stream_ids[p]
            n = streams[s].n
            out.append(InputSpec(s, KIND_WHOLE, streams[s].channels, n, None, np.zeros(n, dtype=np.int64)))
    return out


def num_windows(stage):
    if stage.kind is StageKind.DNN_LAYER_LIST:
        return 1
    if stage.kind is StageKind.ELEMENTWISE_BINARY:
        h, w, _ = stage.shape.input_size
        return h * w
    return stage.shape.num_windows


def window_outputs(stage):
    if stage.kind is StageKind.DNN_LAYER_LIST:
        return stage.shape.output_elements
    return stage.shape.output_size[2]


def compute_cycles(stage, unit):
    if stage.kind is not StageKind.DNN_LAYER_LIST:
        return 0
    macs = sum(l.macs for l in stage.layers)
    return max(1, math.ceil(macs / unit.macs_per_cycle))


def _need_of(inp, n_windows, n_elems):
    if inp.kind == KIND_STENCIL:
        return inp.need
    if inp.kind == KIND_LINEAR:
        return (np.arange(n_windows, dtype=np.int64) + 1) * inp.channels - 1
    return np.full(n_windows, n_elems - 1, dtype=np.int64)


def stream_footprint(n, uses):
    """Peak number of live elements, given (need, lastuse) per consuming input.

    An element is live from the moment it is written until the last element
    its last window depends on has been written.
    """
    end = np.full(n, -1, dtype=np.int64)
    for need, lastuse in uses:
        used = lastuse >= 0
        e = np.where(used, need[np.maximum(lastuse, 0)], -1)
        end = np.maximum(end, e)
    idx = np.arange(n, dtype=np.int64)
    live = end >= idx
    if not live.any():
        return 0
    diff = np.zeros(n + 1, dtype=np.int64)
    np.add.at(diff, idx[live], 1)
    np.add.at(diff, end[live] + 1, -1)
    return int(np.cumsum(diff[:n]).max())


def build_program(graph, hw, mapping, bit_depth=8, routes=None, diagnostic=True):
    """Lower (graph, hardware, mapping) into a Program for the cycle kernel."""
    if routes is None:
        routes, _ = resolve_routes(graph, hw, mapping)
    order = topological_order(graph)
    digital = [n for n in order if not is_analog_stage(hw, mapping, n)]
    for n in digital:
        if not is_digital_stage(hw, mapping, n):
            raise NonDigitalUnit(f"stage {n!r} is mapped to {mapping.unit_of(n)!r}, which is not a compute unit")
    units = [u for u in hw.digital_units if mapping.stages_on(u.name)]
    unit_idx = {u.name: i for i, u in enumerate(units)}
    base = int(max((u.clock for u in units), default=1))

    def bits(stage_name):
        return graph[stage_name].bit_depth or bit_depth

    # streams
    streams, stream_key = [], {}
    consumer_stream = {}  # (producer, consumer) -> stream id
    for c in digital:
        for p in graph[c].predecessors:
            route = routes[(p, c)]
            mem = route_memory(hw, route)
            key = (p, mem) if mem else (p, None, c)
            if key not in stream_key:
                pst = graph[p]
                spec = StreamSpec(p, mem, pst.shape.output_elements, pst.shape.output_size[2], bits(p))
                if is_analog_stage(hw, mapping, p):
                    spec.rate = hw[feeding_array(hw, route)].output_rate
                if mem is None:
                    spec.direct_consumer = c
                stream_key[key] = len(streams)
                streams.append(spec)
            consumer_stream[(p, c)] = stream_key[key]
    memories = []
    for s in streams:
        if s.memory and s.memory not in memories:
            memories.append(s.memory)
    mem_idx = {m: i for i, m in enumerate(memories)}

    # tasks, ordered by unit then topological position
    tasks = sorted(digital, key=lambda n: (unit_idx[mapping.unit_of(n)], order.index(n)))
    task_idx = {n: i for i, n in enumerate(tasks)}
    unit_task_ptr = np.zeros(len(units) + 1, dtype=np.int64)
    for n in tasks:
        unit_task_ptr[unit_idx[mapping.unit_of(n)] + 1] += 1
    unit_task_ptr = np.cumsum(unit_task_ptr)

    task_nwin, task_win_out, task_busy = [], [], []
    task_in_ptr, task_out_ptr, out_stream = [0], [0], []
    inputs = []
    for n in tasks:
        st = graph[n]
        unit = hw[mapping.unit_of(n)]
        task_nwin.append(num_windows(st))
        task_win_out.append(window_outputs(st))
        task_busy.append(compute_cycles(st, unit))
        ids = {p: consumer_stream[(p, n)] for p in st.predecessors}
        inputs.extend(_input_specs(st, ids, streams))
        task_in_ptr.append(len(inputs))
        for s_id, s in enumerate(streams):
            if s.producer == n:
                out_stream.append(s_id)
        task_out_ptr.append(len(out_stream))

    # per-element use counters and the free lists
    stream_ctr_off = np.zeros(len(streams) + 1, dtype=np.int64)
    stream_ctr_off[1:] = np.cumsum([s.n for s in streams])
    ctr = np.zeros(int(stream_ctr_off[-1]), dtype=np.int32)
    uses = {i: [] for i in range(len(streams))}
    in_free_off, free_ptr_parts, free_idx_parts = [], [], []
    in_need_off, need_parts = [], []
    fp_off = fi_off = nd_off = 0
    for t, n in enumerate(tasks):
        nwin = task_nwin[t]
        for inp in inputs[task_in_ptr[t]:task_in_ptr[t + 1]]:
            s = inp.stream
            lu = inp.lastuse
            used = lu >= 0
            ctr[stream_ctr_off[s]:stream_ctr_off[s + 1]] += used.astype(np.int32)
            uses[s].append((_need_of(inp, nwin, streams[s].n), lu))
            order_e = np.argsort(np.where(used, lu, nwin), kind="stable")
            counts = np.bincount(lu[used], minlength=nwin)
            ptr = np.zeros(nwin + 1, dtype=np.int64)
            ptr[1:] = np.cumsum(counts) + fi_off
            ptr[0] = fi_off
            free_ptr_parts.append(ptr)
            free_idx_parts.append(order_e[: int(used.sum())])
            in_free_off.append(fp_off)
            fp_off += nwin + 1
            fi_off += int(used.sum())
            if inp.kind == KIND_STENCIL:
                need_parts.append(inp.need)
                in_need_off.append(nd_off)
                nd_off += len(inp.need)
            else:
                in_need_off.append(-1)

    # memory sizing and the static producer-not-ready check
    prog = Program(base, [u.name for u in units], memories, streams, tasks)
    resident = np.zeros(len(memories), dtype=np.int64)
    for t, n in enumerate(tasks):
        st = graph[n]
        if st.is_temporal:
            s = inputs[task_in_ptr[t]].stream
            resident[mem_idx[streams[s].memory]] += streams[s].n
    cap = np.zeros(len(memories), dtype=np.int64)
    cap_orig = np.zeros(len(memories), dtype=np.int64)
    for m, name in enumerate(memories):
        first = next(s for s in streams if s.memory == name)
        declared = hw[name].capacity_elements(first.channels, first.bit_depth)
        foot = int(resident[m])
        detail = None
        for s_id, s in enumerate(streams):
            if s.memory != name:
                continue
            consumers = [tasks[t] for t in range(len(tasks))
                         for i in inputs[task_in_ptr[t]:task_in_ptr[t + 1]] if i.stream == s_id]
            whole = any(
                mapping.unit_of(c) == mapping.unit_of(s.producer)
                or any(i.kind == KIND_WHOLE for i in inputs[task_in_ptr[task_idx[c]]:task_in_ptr[task_idx[c] + 1]])
                for c in consumers
            )
            f = s.n if whole else stream_footprint(s.n, uses[s_id])
            foot += f
            if detail is None and consumers:
                detail = (consumers[0], s.producer)
        prog.footprints[name] = foot
        prog.capacity[name] = declared
        cap_orig[m] = declared
        cap[m] = declared
        if declared < foot:
            consumer, producer = detail
            prog.static_stalls.append(dict(
                cause="ProducerNotReady",
                unit=mapping.unit_of(consumer),
                memory=name,
                detail=(f"{consumer!r} cannot assemble its first window from {producer!r}: "
                        f"{name} holds {declared} elements but the sweep keeps {foot} live"),
            ))
            if diagnostic:
                cap[m] = foot

    q = 4
    for u in units:
        outs = max([task_out_ptr[t + 1] - task_out_ptr[t] for t in range(len(tasks))
                    if mapping.unit_of(tasks[t]) == u.name] + [1])
        q = max(q, (u.num_stages + 2) * outs + 4)

    def arr(x, dt=np.int64):
        return np.ascontiguousarray(np.asarray(x, dtype=dt))

    total_elems = sum(s.n for s in streams)
    total_windows = sum(task_nwin) + sum(task_busy)
    slowest = min((u.clock for u in units), default=base)
    ratio = math.ceil(base / slowest)
    prog.max_cycles = int((4 * (total_elems + total_windows) + 64 * (len(tasks) + 1)) * ratio + sum(u.num_stages for u in units) * ratio + 1000)
    prog.patience = int(4 * ratio + 2 * max((u.num_stages for u in units), default=1) + 8)
    prog.arrays = dict(
        unit_f=arr([int(u.clock) for u in units]),
        unit_in_rate=arr([u.in_rate for u in units]),
        unit_out_rate=arr([u.out_rate for u in units]),
        unit_stages=arr([u.num_stages for u in units]),
        unit_task_ptr=arr(unit_task_ptr),
        task_nwin=arr(task_nwin),
        task_win_out=arr(task_win_out),
        task_busy=arr(task_busy),
        task_in_ptr=arr(task_in_ptr),
        task_out_ptr=arr(task_out_ptr),
        out_stream=arr(out_stream),
        in_stream=arr([i.stream for i in inputs]),
        in_kind=arr([i.kind for i in inputs]),
        in_channels=arr([i.channels for i in inputs]),
        in_reads=arr([i.reads for i in inputs]),
        in_need_off=arr(in_need_off),
        in_free_off=arr(in_free_off),
        need=arr(np.concatenate(need_parts) if need_parts else []),
        free_ptr=arr(np.concatenate(free_ptr_parts) if free_ptr_parts else []),
        free_idx=arr(np.concatenate(free_idx_parts) if free_idx_parts else []),
        stream_mem=arr([mem_idx[s.memory] if s.memory else -1 for s in streams]),
        stream_n=arr([s.n for s in streams]),
        stream_rate=arr([s.rate for s in streams]),
        stream_ctr_off=arr(stream_ctr_off),
        ctr=arr(ctr, np.int32),
        mem_cap=arr(cap),
        mem_cap_orig=arr(cap_orig),
        mem_ports=arr([hw[m].ports for m in memories]),
        mem_resident=arr(resident),
        pipe_size=arr([q]),
    )
    return prog
