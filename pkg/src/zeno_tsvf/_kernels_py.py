"""Pure-Python kernels.

Line-for-line twin of ``_kernels.pyx``: same operation order on separate
real/imaginary doubles, so both backends produce bit-identical results.
Used when the compiled extension is unavailable or ``ZENO_TSVF_PURE=1``.
"""
import math

OP_ROTATE = 0
OP_ABSORB = 1
OP_FINAL = 2


def evolve(op, mi, mj, cs, sn, state, start, stop, leaks, slices=None):
    """Apply events ``start .. stop-1`` to ``state`` (complex[3]) in place.

    ``leaks[k, 0]`` receives the amplitude removed by absorb event ``k``, or
    the D1 amplitude for the final detection (D2 goes to ``leaks[k, 1]``).
    If ``slices`` is given, row ``k + 1`` holds the state after event ``k``
    and row ``start`` the incoming state.
    """
    re = [state[0].real, state[1].real, state[2].real]
    im = [state[0].imag, state[1].imag, state[2].imag]
    ops = op[start:stop].tolist()
    mis = mi[start:stop].tolist()
    mjs = mj[start:stop].tolist()
    css = cs[start:stop].tolist()
    sns = sn[start:stop].tolist()
    record = slices is not None
    if record:
        rows = [None] * (stop - start + 1)
        rows[0] = (complex(re[0], im[0]), complex(re[1], im[1]), complex(re[2], im[2]))
    lk = []
    for t in range(stop - start):
        o = ops[t]
        if o == OP_ROTATE:
            u = mis[t]
            v = mjs[t]
            c = css[t]
            s = sns[t]
            xr = re[u]
            xi = im[u]
            yr = re[v]
            yi = im[v]
            re[u] = c * xr - s * yr
            im[u] = c * xi - s * yi
            re[v] = s * xr + c * yr
            im[v] = s * xi + c * yi
        elif o == OP_ABSORB:
            u = mis[t]
            lk.append((t, 0, complex(re[u], im[u])))
            re[u] = 0.0
            im[u] = 0.0
        else:
            lk.append((t, 0, complex(re[0], im[0])))
            lk.append((t, 1, complex(re[1], im[1])))
            re[0] = 0.0
            im[0] = 0.0
            re[1] = 0.0
            im[1] = 0.0
        if record:
            rows[t + 1] = (complex(re[0], im[0]), complex(re[1], im[1]),
                           complex(re[2], im[2]))
    for t, col, z in lk:
        leaks[start + t, col] = z
    if record:
        slices[start:stop + 1] = rows
    for k in range(3):
        state[k] = complex(re[k], im[k])


def backward(op, mi, mj, cs, sn, phi, stop, out):
    """Propagate the backward vector ``phi`` from slice ``stop`` down to 0.

    Rotations are undone by their transpose; absorb/detect events keep the
    non-absorbed branch, i.e. zero the absorbed mode.
    """
    re = [phi[0].real, phi[1].real, phi[2].real]
    im = [phi[0].imag, phi[1].imag, phi[2].imag]
    out[stop] = (complex(re[0], im[0]), complex(re[1], im[1]), complex(re[2], im[2]))
    ops = op[:stop].tolist()
    mis = mi[:stop].tolist()
    mjs = mj[:stop].tolist()
    css = cs[:stop].tolist()
    sns = sn[:stop].tolist()
    rows = [None] * stop
    for k in range(stop - 1, -1, -1):
        o = ops[k]
        if o == OP_ROTATE:
            u = mis[k]
            v = mjs[k]
            c = css[k]
            s = sns[k]
            xr = re[u]
            xi = im[u]
            yr = re[v]
            yi = im[v]
            re[u] = c * xr + s * yr
            im[u] = c * xi + s * yi
            re[v] = c * yr - s * xr
            im[v] = c * yi - s * xi
        elif o == OP_ABSORB:
            u = mis[k]
            re[u] = 0.0
            im[u] = 0.0
        else:
            re[0] = 0.0
            im[0] = 0.0
            re[1] = 0.0
            im[1] = 0.0
        rows[k] = (complex(re[0], im[0]), complex(re[1], im[1]), complex(re[2], im[2]))
    if stop:
        out[:stop] = rows


def trajectories(op, mi, mj, cs, sn, monitor_after, uniforms,
                 out_event, out_port, out_found):
    """Sample monitored single-photon trajectories.

    Every stochastic decision point (monitor, absorber, final detection) owns
    a fixed column of ``uniforms``, so trajectory ``i`` depends only on row
    ``i``.  A monitor after event ``k`` measures the channel projector: found
    collapses the photon into ``C``; absent zeroes ``C`` and renormalises.
    """
    E = len(op)
    ops = op.tolist()
    mis = mi.tolist()
    mjs = mj.tolist()
    css = cs.tolist()
    sns = sn.tolist()
    mons = monitor_after.tolist()
    n_runs = uniforms.shape[0]
    for i in range(n_runs):
        u_row = uniforms[i].tolist()
        re = [1.0, 0.0, 0.0]
        im = [0.0, 0.0, 0.0]
        col = 0
        mon = 0
        ev = -1
        port = 0
        for k in range(E):
            o = ops[k]
            if o == OP_ROTATE:
                u = mis[k]
                v = mjs[k]
                c = css[k]
                s = sns[k]
                xr = re[u]
                xi = im[u]
                yr = re[v]
                yi = im[v]
                re[u] = c * xr - s * yr
                im[u] = c * xi - s * yi
                re[v] = s * xr + c * yr
                im[v] = s * xi + c * yi
            elif o == OP_ABSORB:
                u = mis[k]
                pu = re[u] * re[u] + im[u] * im[u]
                tot = re[0] * re[0] + im[0] * im[0] + re[1] * re[1] + im[1] * im[1] \
                    + re[2] * re[2] + im[2] * im[2]
                if u_row[col] * tot < pu:
                    ev = k
                    break
                col += 1
                re[u] = 0.0
                im[u] = 0.0
                rest = math.sqrt(tot - pu)
                for q in range(3):
                    re[q] = re[q] / rest
                    im[q] = im[q] / rest
            else:
                pa = re[0] * re[0] + im[0] * im[0]
                pb = re[1] * re[1] + im[1] * im[1]
                ev = k
                port = 0 if u_row[col] * (pa + pb) < pa else 1
                break
            if mons[k]:
                pc = re[2] * re[2] + im[2] * im[2]
                tot = re[0] * re[0] + im[0] * im[0] + re[1] * re[1] + im[1] * im[1] + pc
                if u_row[col] * tot < pc:
                    out_found[i, mon] = 1
                    r = math.sqrt(pc)
                    re[0] = 0.0
                    im[0] = 0.0
                    re[1] = 0.0
                    im[1] = 0.0
                    re[2] = re[2] / r
                    im[2] = im[2] / r
                else:
                    re[2] = 0.0
                    im[2] = 0.0
                    rest = math.sqrt(tot - pc)
                    for q in range(3):
                        re[q] = re[q] / rest
                        im[q] = im[q] / rest
                col += 1
                mon += 1
        out_event[i] = ev
        out_port[i] = port
