"""Pure-Python kernels.

Same signatures as the compiled ``_ckernels`` module. Inputs may be numpy
arrays or plain sequences; everything is converted to Python ints first so
the inner loops never touch numpy scalars.
"""

M64 = (1 << 64) - 1

OP_X = 0
OP_CX = 1
OP_CCX = 2
OP_MCX = 3
OP_SWAP = 4
OP_ROTATE = 5
OP_FETCH = 6


def _ints(seq):
    return seq.tolist() if hasattr(seq, "tolist") else list(seq)


def shift_and_scan(text, masks, m):
    """End positions j where the final automaton state is active (m <= 64)."""
    masks = _ints(masks)
    hi = 1 << (m - 1)
    d = 0
    out = []
    for j, c in enumerate(_ints(text)):
        d = ((d << 1) | 1) & masks[c]
        if d & hi:
            out.append(j)
    return out


def shift_and_scan_multi(text, masks, m):
    """Multi-word Shift-And. ``masks`` has shape (sigma, W) of 64-bit words."""
    masks = [_ints(row) for row in masks]
    nwords = len(masks[0])
    top_word, top_bit = divmod(m - 1, 64)
    d = [0] * nwords
    out = []
    for j, c in enumerate(_ints(text)):
        mc = masks[c]
        carry = 1
        for w in range(nwords):
            v = d[w]
            d[w] = (((v << 1) & M64) | carry) & mc[w]
            carry = v >> 63
        if (d[top_word] >> top_bit) & 1:
            out.append(j)
    return out


def shift_add_scan(text, masks, m, ell, k):
    """Single-word Shift-Add with ``ell``-bit counters.

    Returns ``(ends, counts)`` for every j >= m-1 whose last counter is <= k.
    """
    masks = _ints(masks)
    full = (1 << (m * ell)) - 1
    shift = (m - 1) * ell
    d = 0
    ends, counts = [], []
    for j, c in enumerate(_ints(text)):
        d = ((d << ell) & full) + masks[c]
        if j >= m - 1:
            top = d >> shift
            if top <= k:
                ends.append(j)
                counts.append(top)
    return ends, counts


def shift_add_scan_multi(text, masks, m, ell, k):
    """Multi-word Shift-Add; cells never straddle a word boundary."""
    masks = [_ints(row) for row in masks]
    nwords = len(masks[0])
    cpw = 64 // ell
    cell_mask = (1 << ell) - 1
    top_shift = (cpw - 1) * ell
    word_mask = [(1 << (cpw * ell)) - 1] * nwords
    word_mask[-1] = (1 << ((m - (nwords - 1) * cpw) * ell)) - 1
    last_word, last_cell = divmod(m - 1, cpw)
    last_shift = last_cell * ell
    d = [0] * nwords
    ends, counts = [], []
    for j, c in enumerate(_ints(text)):
        mc = masks[c]
        carry = 0
        for w in range(nwords):
            v = d[w]
            d[w] = ((((v << ell) | carry) & word_mask[w])) + mc[w]
            carry = (v >> top_shift) & cell_mask
        if j >= m - 1:
            top = (d[last_word] >> last_shift) & cell_mask
            if top <= k:
                ends.append(j)
                counts.append(top)
    return ends, counts


def run_program(bits, code, tables, start, stop):
    """Execute encoded reversible ops ``code[start:stop]`` on ``bits`` in place."""
    code = _ints(code)
    tables = _ints(tables)
    pc = start
    while pc < stop:
        op = code[pc]
        if op == OP_X:
            bits[code[pc + 1]] ^= 1
            pc += 2
        elif op == OP_CX:
            if bits[code[pc + 1]]:
                bits[code[pc + 2]] ^= 1
            pc += 3
        elif op == OP_CCX:
            if bits[code[pc + 1]] and bits[code[pc + 2]]:
                bits[code[pc + 3]] ^= 1
            pc += 4
        elif op == OP_MCX:
            nc = code[pc + 1]
            for q in code[pc + 2:pc + 2 + nc]:
                if not bits[q]:
                    break
            else:
                bits[code[pc + 2 + nc]] ^= 1
            pc += 3 + nc
        elif op == OP_SWAP:
            a, b = code[pc + 1], code[pc + 2]
            bits[a], bits[b] = bits[b], bits[a]
            pc += 3
        elif op == OP_ROTATE:
            w, off = code[pc + 1], code[pc + 2]
            qs = code[pc + 3:pc + 3 + w]
            vals = [bits[q] for q in qs]
            for p in range(w):
                bits[qs[(p + off) % w]] = vals[p]
            pc += 3 + w
        elif op == OP_FETCH:
            na, nd, toff, tlen = code[pc + 1:pc + 5]
            addr_q = code[pc + 5:pc + 5 + na]
            data_q = code[pc + 5 + na:pc + 5 + na + nd]
            addr = 0
            for i, q in enumerate(addr_q):
                addr |= bits[q] << i
            if addr < tlen:
                val = tables[toff + addr]
                for i, q in enumerate(data_q):
                    if (val >> i) & 1:
                        bits[q] ^= 1
            pc += 5 + na + nd
        else:
            raise ValueError(f"bad opcode {op} at {pc}")
