"""Pure-Python cycle kernel, used when the compiled extension is unavailable.

Semantics match _kernel.pyx exactly; the parity tests run both.
"""
import numpy as np

PNR, MFULL, PORTS = 0, 1, 2


def run(a, base, max_cycles, patience):
    L = {k: v.tolist() for k, v in a.items()}
    unit_f, unit_in_rate, unit_out_rate = L["unit_f"], L["unit_in_rate"], L["unit_out_rate"]
    unit_stages, unit_task_ptr = L["unit_stages"], L["unit_task_ptr"]
    task_nwin, task_win_out, task_busy = L["task_nwin"], L["task_win_out"], L["task_busy"]
    task_in_ptr, task_out_ptr, out_stream = L["task_in_ptr"], L["task_out_ptr"], L["out_stream"]
    in_stream, in_kind, in_channels = L["in_stream"], L["in_kind"], L["in_channels"]
    in_reads, in_need_off, in_free_off = L["in_reads"], L["in_need_off"], L["in_free_off"]
    need, free_ptr, free_idx = L["need"], L["free_ptr"], L["free_idx"]
    stream_mem, stream_n, stream_rate, stream_ctr_off = L["stream_mem"], L["stream_n"], L["stream_rate"], L["stream_ctr_off"]
    ctr, cap, cap_orig, ports = L["ctr"], L["mem_cap"], L["mem_cap_orig"], L["mem_ports"]
    q = L["pipe_size"][0]

    U, S, M, T, I = len(unit_f), len(stream_n), len(cap), len(task_nwin), len(in_stream)
    n_actor = U + S + M

    occ = list(L["mem_resident"])
    free_pending = [0] * M
    mem_used = [0] * M
    mem_rstamp = [-1] * M
    mem_wstamp = [-1] * M
    touched = [0] * M
    mem_reads, mem_writes, mem_busy, mem_overcap = [0] * M, [0] * M, [0] * M, [0] * M
    written, visible = [0] * S, [0] * S
    ingested = [0] * I
    task_w = [0] * T
    cur = [unit_task_ptr[u] for u in range(U)]
    pending, busy, frozen, pclock, last = [0] * U, [0] * U, [0] * U, [0] * U, [0] * U
    pipes = [[] for _ in range(U)]  # FIFO of [ready, stream, count]
    flags = set()
    events = []

    def record(cause, actor, mem, t):
        key = (cause, actor, mem)
        if key not in flags:
            flags.add(key)
            events.append((cause, actor, mem, t))

    def need_of(i, w):
        kind = in_kind[i]
        if kind == 0:
            return need[in_need_off[i] + w]
        if kind == 1:
            return (w + 1) * in_channels[i] - 1
        return stream_n[in_stream[i]] - 1

    def write_elems(s, k):
        m = stream_mem[s]
        off = stream_ctr_off[s]
        e = written[s]
        w = 0
        while w < k:
            if ctr[off + e] > 0:
                if occ[m] >= cap[m]:
                    break
                occ[m] += 1
            e += 1
            w += 1
        written[s] = e
        return w

    t = idle = status = 0
    while True:
        t += 1
        if t > max_cycles:
            status = 2
            break
        progress = False
        for m in range(M):
            mem_used[m] = 0
            touched[m] = 0

        for s in range(S):
            r = stream_rate[s]
            if r == 0 or written[s] >= stream_n[s]:
                continue
            k = min(r, stream_n[s] - written[s])
            m = stream_mem[s]
            if m < 0:
                written[s] += k
                visible[s] = written[s]
                progress = True
                continue
            if occ[m] >= cap[m] and ctr[stream_ctr_off[s] + written[s]] > 0:
                continue
            if mem_used[m] >= ports[m]:
                record(PORTS, U + s, m, t)
                continue
            got = write_elems(s, k)
            if got > 0:
                mem_used[m] += 1
                mem_writes[m] += got
                touched[m] = 1
                progress = True

        for u in range(U):
            f = unit_f[u]
            if (t * f) // base == ((t - 1) * f) // base:
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
                    ins = range(task_in_ptr[task], task_in_ptr[task + 1])
                    if busy[u] == 0 and task_w[task] < nw:
                        w = task_w[task]
                        if any(ingested[i] <= need_of(i, w) for i in ins):
                            for i in ins:
                                if ingested[i] > need_of(i, w):
                                    continue
                                s = in_stream[i]
                                k = min(visible[s] - ingested[i], unit_in_rate[u])
                                if k <= 0:
                                    continue
                                m = stream_mem[s]
                                if m >= 0 and mem_rstamp[m] != stamp:
                                    if mem_used[m] >= ports[m]:
                                        record(PORTS, u, m, t)
                                        continue
                                    mem_used[m] += 1
                                    mem_rstamp[m] = stamp
                                if m >= 0:
                                    touched[m] = 1
                                ingested[i] += k
                                progress = True
                        lim = max(unit_out_rate[u], task_win_out[task])
                        while task_w[task] < nw and pending[u] + task_win_out[task] <= lim:
                            w = task_w[task]
                            if any(ingested[i] <= need_of(i, w) for i in ins):
                                break
                            for i in ins:
                                s = in_stream[i]
                                m = stream_mem[s]
                                if m >= 0 and (in_kind[i] != 2 or w == 0):
                                    mem_reads[m] += in_reads[i]
                                off = stream_ctr_off[s]
                                fo = in_free_off[i] + w
                                for j in range(free_ptr[fo], free_ptr[fo + 1]):
                                    e = off + free_idx[j]
                                    ctr[e] -= 1
                                    if ctr[e] == 0 and m >= 0:
                                        free_pending[m] += 1
                            pending[u] += task_win_out[task]
                            task_w[task] += 1
                            progress = True
                            if task_busy[task] > 0:
                                busy[u] = task_busy[task]
                                break
                    if busy[u] == 0 and pending[u] > 0:
                        k = min(pending[u], unit_out_rate[u])
                        pending[u] -= k
                        ready = pclock[u] + unit_stages[u] - 1
                        targets = out_stream[task_out_ptr[task]:task_out_ptr[task + 1]] or [-1]
                        for s in targets:
                            pipes[u].append([ready, s, k])
                        assert len(pipes[u]) <= q
                        progress = True
                    if task_w[task] >= nw and pending[u] == 0 and busy[u] == 0:
                        cur[u] += 1

            pipe = pipes[u]
            if pipe and not was_frozen:
                progress = True
            while pipe and pipe[0][0] <= pclock[u]:
                entry = pipe[0]
                s = entry[1]
                if s < 0:
                    last[u] = t
                    pipe.pop(0)
                    continue
                m = stream_mem[s]
                if mem_wstamp[m] != stamp:
                    if mem_used[m] >= ports[m]:
                        record(PORTS, u, m, t)
                        frozen[u] = 1
                        break
                    mem_used[m] += 1
                    mem_wstamp[m] = stamp
                got = write_elems(s, entry[2])
                if got > 0:
                    mem_writes[m] += got
                    touched[m] = 1
                entry[2] -= got
                if entry[2] > 0:
                    record(MFULL, u, m, t)
                    frozen[u] = 1
                    break
                last[u] = t
                pipe.pop(0)

        for m in range(M):
            occ[m] -= free_pending[m]
            free_pending[m] = 0
            if touched[m]:
                mem_busy[m] += 1
            if occ[m] > cap_orig[m] and mem_overcap[m] == 0:
                mem_overcap[m] = t
        for s in range(S):
            visible[s] = written[s]

        done = all(not (stream_rate[s] > 0 and written[s] < stream_n[s]) for s in range(S))
        done = done and all(cur[u] >= unit_task_ptr[u + 1] and not pipes[u] for u in range(U))
        if done:
            break

        if progress:
            idle = 0
        else:
            idle += 1
            if idle > patience:
                any_full = False
                for m in range(M):
                    if occ[m] >= cap[m]:
                        any_full = True
                        cap[m] = 1 << 60
                        record(PNR, U + S + m, m, t)
                if not any_full:
                    status = 1
                    break
                idle = 0

    return dict(
        cycles=t,
        status=status,
        unit_last=np.array(last, dtype=np.int64),
        mem_reads=np.array(mem_reads, dtype=np.int64),
        mem_writes=np.array(mem_writes, dtype=np.int64),
        mem_busy=np.array(mem_busy, dtype=np.int64),
        mem_overcap=np.array(mem_overcap, dtype=np.int64),
        events=np.array(events, dtype=np.int64).reshape(-1, 4),
    )
