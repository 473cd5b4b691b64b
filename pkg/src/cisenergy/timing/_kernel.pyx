# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cycle kernel. Semantics match _kernel_py.run line for line."""
import numpy as np
cimport numpy as cnp

ctypedef cnp.int64_t i64
ctypedef cnp.int32_t i32

cdef enum:
    PNR = 0
    MFULL = 1
    PORTS = 2


cdef inline bint ticks(i64 t, i64 f, i64 base) nogil:
    return (t * f) // base != ((t - 1) * f) // base


cdef inline i64 need_of(i64 kind, i64 w, i64 ch, i64 n, i64 off, i64[::1] need) nogil:
    if kind == 0:
        return need[off + w]
    if kind == 1:
        return (w + 1) * ch - 1
    return n - 1


cdef inline void record(i64 cause, i64 actor, i64 mem, i64 t, i64 n_actor, i64 n_mem1,
                        cnp.int8_t[::1] flags, i64[:, ::1] events, i64* n_events) nogil:
    cdef i64 k = (cause * n_actor + actor) * n_mem1 + mem + 1
    if flags[k]:
        return
    flags[k] = 1
    events[n_events[0], 0] = cause
    events[n_events[0], 1] = actor
    events[n_events[0], 2] = mem
    events[n_events[0], 3] = t
    n_events[0] += 1


cdef inline i64 write_elems(i64 s, i64 k, i64[::1] stream_mem, i64[::1] stream_ctr_off, i32[::1] ctr,
                            i64[::1] written, i64[::1] occ, i64[::1] cap) nogil:
    cdef i64 m = stream_mem[s]
    cdef i64 off = stream_ctr_off[s]
    cdef i64 e = written[s]
    cdef i64 w = 0
    while w < k:
        if ctr[off + e] > 0:
            if occ[m] >= cap[m]:
                break
            occ[m] += 1
        e += 1
        w += 1
    written[s] = e
    return w


def run(dict a, i64 base, i64 max_cycles, i64 patience):
    cdef i64[::1] unit_f = a["unit_f"]
    cdef i64[::1] unit_in_rate = a["unit_in_rate"]
    cdef i64[::1] unit_out_rate = a["unit_out_rate"]
    cdef i64[::1] unit_stages = a["unit_stages"]
    cdef i64[::1] unit_task_ptr = a["unit_task_ptr"]
    cdef i64[::1] task_nwin = a["task_nwin"]
    cdef i64[::1] task_win_out = a["task_win_out"]
    cdef i64[::1] task_busy = a["task_busy"]
    cdef i64[::1] task_in_ptr = a["task_in_ptr"]
    cdef i64[::1] task_out_ptr = a["task_out_ptr"]
    cdef i64[::1] out_stream = a["out_stream"]
    cdef i64[::1] in_stream = a["in_stream"]
    cdef i64[::1] in_kind = a["in_kind"]
    cdef i64[::1] in_channels = a["in_channels"]
    cdef i64[::1] in_reads = a["in_reads"]
    cdef i64[::1] in_need_off = a["in_need_off"]
    cdef i64[::1] in_free_off = a["in_free_off"]
    cdef i64[::1] need = a["need"]
    cdef i64[::1] free_ptr = a["free_ptr"]
    cdef i64[::1] free_idx = a["free_idx"]
    cdef i64[::1] stream_mem = a["stream_mem"]
    cdef i64[::1] stream_n = a["stream_n"]
    cdef i64[::1] stream_rate = a["stream_rate"]
    cdef i64[::1] stream_ctr_off = a["stream_ctr_off"]
    cdef i32[::1] ctr = a["ctr"].copy()
    cdef i64[::1] cap = a["mem_cap"].copy()
    cdef i64[::1] cap_orig = a["mem_cap_orig"]
    cdef i64[::1] ports = a["mem_ports"]
    cdef i64 q = a["pipe_size"][0]

    cdef i64 U = unit_f.shape[0]
    cdef i64 S = stream_n.shape[0]
    cdef i64 M = cap.shape[0]
    cdef i64 T = task_nwin.shape[0]
    cdef i64 I = in_stream.shape[0]
    cdef i64 n_actor = U + S + M

    cdef i64[::1] occ = a["mem_resident"].copy()
    cdef i64[::1] free_pending = np.zeros(M, dtype=np.int64)
    cdef i64[::1] mem_used = np.zeros(M, dtype=np.int64)
    cdef i64[::1] mem_rstamp = np.full(M, -1, dtype=np.int64)
    cdef i64[::1] mem_wstamp = np.full(M, -1, dtype=np.int64)
    cdef cnp.int8_t[::1] touched = np.zeros(M, dtype=np.int8)
    cdef i64[::1] mem_reads = np.zeros(M, dtype=np.int64)
    cdef i64[::1] mem_writes = np.zeros(M, dtype=np.int64)
    cdef i64[::1] mem_busy = np.zeros(M, dtype=np.int64)
    cdef i64[::1] mem_overcap = np.zeros(M, dtype=np.int64)
    cdef i64[::1] written = np.zeros(S, dtype=np.int64)
    cdef i64[::1] visible = np.zeros(S, dtype=np.int64)
    cdef i64[::1] ingested = np.zeros(I, dtype=np.int64)
    cdef i64[::1] task_w = np.zeros(T, dtype=np.int64)
    cdef i64[::1] cur = np.zeros(U, dtype=np.int64)
    cdef i64[::1] pending = np.zeros(U, dtype=np.int64)
    cdef i64[::1] busy = np.zeros(U, dtype=np.int64)
    cdef i64[::1] frozen = np.zeros(U, dtype=np.int64)
    cdef i64[::1] pclock = np.zeros(U, dtype=np.int64)
    cdef i64[::1] last = np.zeros(U, dtype=np.int64)
    cdef i64[::1] ph = np.zeros(U, dtype=np.int64)
    cdef i64[::1] pl = np.zeros(U, dtype=np.int64)
    cdef i64[:, ::1] p_ready = np.zeros((U, q), dtype=np.int64)
    cdef i64[:, ::1] p_stream = np.zeros((U, q), dtype=np.int64)
    cdef i64[:, ::1] p_count = np.zeros((U, q), dtype=np.int64)
    cdef cnp.int8_t[::1] flags = np.zeros(3 * n_actor * (M + 1), dtype=np.int8)
    cdef i64[:, ::1] events = np.zeros((3 * n_actor * (M + 1) + 1, 4), dtype=np.int64)
    cdef i64 n_events = 0

    cdef i64 t = 0, u, s, m, k, w, i, j, task, e, r, idle = 0, status = 0, stamp
    cdef i64 lim, slot, tail, got, nw, outs
    cdef bint progress, ready, done, any_full, was_frozen

    for u in range(U):
        cur[u] = unit_task_ptr[u]

    with nogil:
        while True:
            t += 1
            if t > max_cycles:
                status = 2
                break
            progress = False
            for m in range(M):
                mem_used[m] = 0
                touched[m] = 0

            # analog sources write first
            for s in range(S):
                r = stream_rate[s]
                if r == 0 or written[s] >= stream_n[s]:
                    continue
                k = r
                if stream_n[s] - written[s] < k:
                    k = stream_n[s] - written[s]
                m = stream_mem[s]
                if m < 0:
                    written[s] += k
                    visible[s] = written[s]
                    progress = True
                    continue
                if occ[m] >= cap[m] and ctr[stream_ctr_off[s] + written[s]] > 0:
                    continue
                if mem_used[m] >= ports[m]:
                    record(PORTS, U + s, m, t, n_actor, M + 1, flags, events, &n_events)
                    continue
                got = write_elems(s, k, stream_mem, stream_ctr_off, ctr, written, occ, cap)
                if got > 0:
                    mem_used[m] += 1
                    mem_writes[m] += got
                    touched[m] = 1
                    progress = True

            # digital units in declaration order
            for u in range(U):
                if not ticks(t, unit_f[u], base):
                    continue
                stamp = t * (U + 1) + u
                was_frozen = frozen[u]
                if was_frozen:
                    frozen[u] = 0
                else:
                    pclock[u] += 1
                    if busy[u] > 0:
                        busy[u] -= 1
                        progress = True
                    task = cur[u]
                    if task < unit_task_ptr[u + 1]:
                        nw = task_nwin[task]
                        if busy[u] == 0 and task_w[task] < nw:
                            # ingest only what the next window still lacks
                            w = task_w[task]
                            ready = True
                            for i in range(task_in_ptr[task], task_in_ptr[task + 1]):
                                s = in_stream[i]
                                if ingested[i] <= need_of(in_kind[i], w, in_channels[i], stream_n[s], in_need_off[i], need):
                                    ready = False
                            if not ready:
                                for i in range(task_in_ptr[task], task_in_ptr[task + 1]):
                                    s = in_stream[i]
                                    if ingested[i] > need_of(in_kind[i], w, in_channels[i], stream_n[s], in_need_off[i], need):
                                        continue
                                    k = visible[s] - ingested[i]
                                    if k > unit_in_rate[u]:
                                        k = unit_in_rate[u]
                                    if k <= 0:
                                        continue
                                    m = stream_mem[s]
                                    if m >= 0 and mem_rstamp[m] != stamp:
                                        if mem_used[m] >= ports[m]:
                                            record(PORTS, u, m, t, n_actor, M + 1, flags, events, &n_events)
                                            continue
                                        mem_used[m] += 1
                                        mem_rstamp[m] = stamp
                                    if m >= 0:
                                        touched[m] = 1
                                    ingested[i] += k
                                    progress = True
                            # compute every ready window the output stage can absorb
                            lim = unit_out_rate[u]
                            if task_win_out[task] > lim:
                                lim = task_win_out[task]
                            while task_w[task] < nw and pending[u] + task_win_out[task] <= lim:
                                w = task_w[task]
                                ready = True
                                for i in range(task_in_ptr[task], task_in_ptr[task + 1]):
                                    s = in_stream[i]
                                    if ingested[i] <= need_of(in_kind[i], w, in_channels[i], stream_n[s], in_need_off[i], need):
                                        ready = False
                                        break
                                if not ready:
                                    break
                                for i in range(task_in_ptr[task], task_in_ptr[task + 1]):
                                    s = in_stream[i]
                                    m = stream_mem[s]
                                    if m >= 0 and (in_kind[i] != 2 or w == 0):
                                        mem_reads[m] += in_reads[i]
                                    for j in range(free_ptr[in_free_off[i] + w], free_ptr[in_free_off[i] + w + 1]):
                                        e = stream_ctr_off[s] + free_idx[j]
                                        ctr[e] -= 1
                                        if ctr[e] == 0 and m >= 0:
                                            free_pending[m] += 1
                                pending[u] += task_win_out[task]
                                task_w[task] += 1
                                progress = True
                                if task_busy[task] > 0:
                                    busy[u] = task_busy[task]
                                    break
                        # emit into the pipeline
                        if busy[u] == 0 and pending[u] > 0:
                            k = pending[u]
                            if k > unit_out_rate[u]:
                                k = unit_out_rate[u]
                            pending[u] -= k
                            outs = task_out_ptr[task + 1] - task_out_ptr[task]
                            if outs == 0:
                                tail = (ph[u] + pl[u]) % q
                                p_ready[u, tail] = pclock[u] + unit_stages[u] - 1
                                p_stream[u, tail] = -1
                                p_count[u, tail] = k
                                pl[u] += 1
                            else:
                                for j in range(task_out_ptr[task], task_out_ptr[task + 1]):
                                    tail = (ph[u] + pl[u]) % q
                                    p_ready[u, tail] = pclock[u] + unit_stages[u] - 1
                                    p_stream[u, tail] = out_stream[j]
                                    p_count[u, tail] = k
                                    pl[u] += 1
                            progress = True
                        if task_w[task] >= nw and pending[u] == 0 and busy[u] == 0:
                            cur[u] += 1

                # drain entries that have left the last stage
                if pl[u] > 0 and not was_frozen:
                    progress = True
                while pl[u] > 0 and p_ready[u, ph[u]] <= pclock[u]:
                    slot = ph[u]
                    s = p_stream[u, slot]
                    if s < 0:
                        last[u] = t
                        ph[u] = (ph[u] + 1) % q
                        pl[u] -= 1
                        continue
                    m = stream_mem[s]
                    if mem_wstamp[m] != stamp:
                        if mem_used[m] >= ports[m]:
                            record(PORTS, u, m, t, n_actor, M + 1, flags, events, &n_events)
                            frozen[u] = 1
                            break
                        mem_used[m] += 1
                        mem_wstamp[m] = stamp
                    got = write_elems(s, p_count[u, slot], stream_mem, stream_ctr_off, ctr, written, occ, cap)
                    if got > 0:
                        mem_writes[m] += got
                        touched[m] = 1
                    p_count[u, slot] -= got
                    if p_count[u, slot] > 0:
                        record(MFULL, u, m, t, n_actor, M + 1, flags, events, &n_events)
                        frozen[u] = 1
                        break
                    last[u] = t
                    ph[u] = (ph[u] + 1) % q
                    pl[u] -= 1

            # end of cycle: frees land, writes become visible
            for m in range(M):
                occ[m] -= free_pending[m]
                free_pending[m] = 0
                if touched[m]:
                    mem_busy[m] += 1
                if occ[m] > cap_orig[m] and mem_overcap[m] == 0:
                    mem_overcap[m] = t
            for s in range(S):
                visible[s] = written[s]

            done = True
            for s in range(S):
                if stream_rate[s] > 0 and written[s] < stream_n[s]:
                    done = False
            for u in range(U):
                if cur[u] < unit_task_ptr[u + 1] or pl[u] > 0:
                    done = False
            if done:
                break

            if progress:
                idle = 0
            else:
                idle += 1
                if idle > patience:
                    # a memory too small for the sweep: widen it and say so
                    any_full = False
                    for m in range(M):
                        if occ[m] >= cap[m]:
                            any_full = True
                            cap[m] = (<i64>1) << 60
                            record(PNR, U + S + m, m, t, n_actor, M + 1, flags, events, &n_events)
                    if not any_full:
                        status = 1
                        break
                    idle = 0

    return dict(
        cycles=t,
        status=status,
        unit_last=np.asarray(last),
        mem_reads=np.asarray(mem_reads),
        mem_writes=np.asarray(mem_writes),
        mem_busy=np.asarray(mem_busy),
        mem_overcap=np.asarray(mem_overcap),
        events=np.asarray(events[:n_events]).copy(),
    )
