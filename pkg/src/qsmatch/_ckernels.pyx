# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; mirrors ``_pykernels`` exactly."""

from libc.stdint cimport int32_t, int64_t, uint64_t
from libc.stdlib cimport malloc, free

import numpy as np

cdef enum:
    OP_X = 0
    OP_CX = 1
    OP_CCX = 2
    OP_MCX = 3
    OP_SWAP = 4
    OP_ROTATE = 5
    OP_FETCH = 6


def shift_and_scan(const int32_t[:] text, const uint64_t[:] masks, int m):
    cdef uint64_t d = 0
    cdef uint64_t hi = (<uint64_t>1) << (m - 1)
    cdef Py_ssize_t j, n = text.shape[0]
    out = []
    for j in range(n):
        d = ((d << 1) | 1) & masks[text[j]]
        if d & hi:
            out.append(j)
    return out


def shift_and_scan_multi(const int32_t[:] text, const uint64_t[:, :] masks, int m):
    cdef Py_ssize_t nwords = masks.shape[1]
    cdef Py_ssize_t j, w, n = text.shape[0]
    cdef int top_word = (m - 1) // 64
    cdef int top_bit = (m - 1) % 64
    cdef uint64_t v, carry
    cdef int32_t c
    cdef uint64_t[:] d = np.zeros(nwords, dtype=np.uint64)
    out = []
    for j in range(n):
        c = text[j]
        carry = 1
        for w in range(nwords):
            v = d[w]
            d[w] = ((v << 1) | carry) & masks[c, w]
            carry = v >> 63
        if (d[top_word] >> top_bit) & 1:
            out.append(j)
    return out


def shift_add_scan(const int32_t[:] text, const uint64_t[:] masks, int m, int ell, int k):
    cdef int total = m * ell
    cdef uint64_t full = (~(<uint64_t>0)) if total >= 64 else (((<uint64_t>1) << total) - 1)
    cdef int shift = (m - 1) * ell
    cdef uint64_t d = 0, top
    cdef Py_ssize_t j, n = text.shape[0]
    ends = []
    counts = []
    for j in range(n):
        d = ((d << ell) & full) + masks[text[j]]
        if j >= m - 1:
            top = d >> shift
            if top <= <uint64_t>k:
                ends.append(j)
                counts.append(<int64_t>top)
    return ends, counts


def shift_add_scan_multi(const int32_t[:] text, const uint64_t[:, :] masks, int m, int ell, int k):
    cdef Py_ssize_t nwords = masks.shape[1]
    cdef Py_ssize_t j, w, n = text.shape[0]
    cdef int cpw = 64 // ell
    cdef uint64_t cell_mask = ((<uint64_t>1) << ell) - 1
    cdef int top_shift = (cpw - 1) * ell
    cdef int bits_full = cpw * ell
    cdef int bits_last = (m - (nwords - 1) * cpw) * ell
    cdef uint64_t mask_full = (~(<uint64_t>0)) if bits_full >= 64 else (((<uint64_t>1) << bits_full) - 1)
    cdef uint64_t mask_last = (~(<uint64_t>0)) if bits_last >= 64 else (((<uint64_t>1) << bits_last) - 1)
    cdef int last_word = (m - 1) // cpw
    cdef int last_shift = ((m - 1) % cpw) * ell
    cdef uint64_t v, carry, top, wm
    cdef int32_t c
    cdef uint64_t[:] d = np.zeros(nwords, dtype=np.uint64)
    ends = []
    counts = []
    for j in range(n):
        c = text[j]
        carry = 0
        for w in range(nwords):
            v = d[w]
            wm = mask_last if w == nwords - 1 else mask_full
            d[w] = (((v << ell) | carry) & wm) + masks[c, w]
            carry = (v >> top_shift) & cell_mask
        if j >= m - 1:
            top = (d[last_word] >> last_shift) & cell_mask
            if top <= <uint64_t>k:
                ends.append(j)
                counts.append(<int64_t>top)
    return ends, counts


def run_program(unsigned char[:] bits, const int64_t[:] code, const uint64_t[:] tables,
                Py_ssize_t start, Py_ssize_t stop):
    cdef Py_ssize_t pc = start
    cdef int64_t op, nc, w, off, na, nd, toff, tlen, i, p
    cdef int64_t a, b
    cdef uint64_t addr, val
    cdef unsigned char tmp, ok
    cdef unsigned char *buf
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
            ok = 1
            for i in range(nc):
                if not bits[code[pc + 2 + i]]:
                    ok = 0
                    break
            if ok:
                bits[code[pc + 2 + nc]] ^= 1
            pc += 3 + nc
        elif op == OP_SWAP:
            a = code[pc + 1]
            b = code[pc + 2]
            tmp = bits[a]
            bits[a] = bits[b]
            bits[b] = tmp
            pc += 3
        elif op == OP_ROTATE:
            w = code[pc + 1]
            off = code[pc + 2]
            buf = <unsigned char *> malloc(w)
            if buf == NULL:
                raise MemoryError()
            for p in range(w):
                buf[p] = bits[code[pc + 3 + p]]
            for p in range(w):
                bits[code[pc + 3 + (p + off) % w]] = buf[p]
            free(buf)
            pc += 3 + w
        elif op == OP_FETCH:
            na = code[pc + 1]
            nd = code[pc + 2]
            toff = code[pc + 3]
            tlen = code[pc + 4]
            addr = 0
            for i in range(na):
                addr |= (<uint64_t>bits[code[pc + 5 + i]]) << i
            if addr < <uint64_t>tlen:
                val = tables[toff + addr]
                for i in range(nd):
                    if (val >> i) & 1:
                        bits[code[pc + 5 + na + i]] ^= 1
            pc += 5 + na + nd
        else:
            raise ValueError(f"bad opcode {op} at {pc}")
