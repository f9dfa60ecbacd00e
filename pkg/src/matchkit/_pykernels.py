"""Pure-Python hot loops; the reference for the compiled twin in ``_ckernels.pyx``.

All kernels take the 1-based padded numpy tables built in :mod:`matchkit.core`
and return plain Python lists.  Index 0 of every per-agent list is unused.
"""

from matchkit.errors import InternalInvariantError


def gale_shapley(men_pref, men_len, women_rank):
    """Man-proposing deferred acceptance; returns ``wife`` (0 = single)."""
    pref = men_pref.tolist()
    lens = men_len.tolist()
    wr = women_rank.tolist()
    n_m = len(pref) - 1
    n_w = len(wr) - 1
    wife = [0] * (n_m + 1)
    husband = [0] * (n_w + 1)
    nxt = [0] * (n_m + 1)
    free = list(range(n_m, 0, -1))
    while free:
        m = free.pop()
        row = pref[m]
        k = nxt[m]
        end = lens[m]
        while k < end:
            w = row[k]
            k += 1
            h = husband[w]
            rw = wr[w]
            if rw[m] < rw[h]:
                husband[w] = m
                wife[m] = w
                if h:
                    wife[h] = 0
                    free.append(h)
                break
        nxt[m] = k
    return wife


def rotation_chase(men_pref, men_rank, women_rank, wife0, wifez):
    """All rotations, in one valid elimination order from ``wife0`` to ``wifez``.

    Each rotation is a list of ``(man, woman)`` pairs in cycle order; the i-th
    man moves to the woman of pair i+1.  Runs the classic successor-chasing
    walk: next(m) is the current husband of the first woman after m's wife who
    prefers m to her husband.
    """
    pref = men_pref.tolist()
    mr = men_rank.tolist()
    wr = women_rank.tolist()
    n_m = len(pref) - 1
    n_w = len(wr) - 1
    wife = list(wife0)
    husband = [0] * (n_w + 1)
    for m in range(1, n_m + 1):
        if wife[m]:
            husband[wife[m]] = m
    ptr = [mr[m][wife[m]] if wife[m] else -1 for m in range(n_m + 1)]
    zp = [mr[m][wifez[m]] if wifez[m] else -1 for m in range(n_m + 1)]
    spos = [p + 1 for p in ptr]
    where = [-1] * (n_m + 1)
    rotations = []
    stack = []

    def successor(m):
        row = pref[m]
        p = spos[m]
        limit = zp[m]
        while p <= limit:
            w = row[p]
            rw = wr[w]
            if rw[m] < rw[husband[w]]:
                spos[m] = p
                return husband[w]
            p += 1
        raise InternalInvariantError(f"man {m} has no successor before his woman-optimal partner")

    for start in range(1, n_m + 1):
        while ptr[start] < zp[start]:
            if not stack:
                stack.append(start)
                where[start] = 0
            while stack:
                m = stack[-1]
                nm = successor(m)
                if where[nm] < 0:
                    if ptr[nm] >= zp[nm]:
                        raise InternalInvariantError(f"successor {nm} is already at his woman-optimal partner")
                    where[nm] = len(stack)
                    stack.append(nm)
                    continue
                cyc = stack[where[nm]:]
                del stack[where[nm]:]
                pairs = [(x, wife[x]) for x in cyc]
                k = len(cyc)
                for i in range(k):
                    x = cyc[i]
                    w = pairs[(i + 1) % k][1]
                    wife[x] = w
                    husband[w] = x
                    ptr[x] = mr[x][w]
                    if spos[x] <= ptr[x]:
                        spos[x] = ptr[x] + 1
                    where[x] = -1
                rotations.append(pairs)
                if not stack:
                    break
    return rotations


def sr_stable_matchings(rank_table, n):
    """All stable perfect roommate matchings by exhaustive pairing.

    The lowest-indexed single agent is paired first; a partial matching is
    abandoned as soon as two already-placed agents block it.
    """
    rt = rank_table.tolist() if hasattr(rank_table, "tolist") else rank_table
    mate = [0] * (n + 1)
    placed = []
    out = []

    def blocks(a, b):
        # a and b are both placed; does {a, b} block?
        return rt[a][b] < rt[a][mate[a]] and rt[b][a] < rt[b][mate[b]]

    def rec():
        i = 1
        while i <= n and mate[i]:
            i += 1
        if i > n:
            out.append(tuple(mate[1:]))
            return
        for j in range(i + 1, n + 1):
            if mate[j]:
                continue
            mate[i], mate[j] = j, i
            ok = True
            for k in placed:
                if blocks(i, k) or blocks(j, k):
                    ok = False
                    break
            if ok:
                placed.append(i)
                placed.append(j)
                rec()
                placed.pop()
                placed.pop()
            mate[i] = mate[j] = 0

    rec()
    return out


def sm_stable_matchings(men_pref, men_len, men_rank, women_rank):
    """All stable matchings of an SMI instance by backtracking over men."""
    pref = men_pref.tolist()
    lens = men_len.tolist()
    mr = men_rank.tolist()
    wr = women_rank.tolist()
    n_m = len(pref) - 1
    n_w = len(wr) - 1
    wife = [0] * (n_m + 1)
    husband = [0] * (n_w + 1)
    out = []

    def leaf_ok():
        for w in range(1, n_w + 1):
            if husband[w]:
                continue
            for m in range(1, n_m + 1):
                if wr[w][m] < wr[w][0] and mr[m][w] < mr[m][wife[m]]:
                    return False
        return True

    def rec(m):
        if m > n_m:
            if leaf_ok():
                out.append(tuple(wife[1:]))
            return
        row = pref[m]
        for k in range(lens[m] + 1):
            w = row[k] if k < lens[m] else 0
            if w and husband[w]:
                continue
            wife[m] = w
            ok = True
            # women m prefers to w, already taken by earlier men
            for kk in range(k):
                v = row[kk]
                h = husband[v]
                if h and wr[v][m] < wr[v][h]:
                    ok = False
                    break
            if ok and w:
                rw = wr[w]
                for e in range(1, m):
                    if rw[e] < rw[m] and mr[e][w] < mr[e][wife[e]]:
                        ok = False
                        break
            if ok:
                if w:
                    husband[w] = m
                rec(m + 1)
                if w:
                    husband[w] = 0
            wife[m] = 0

    rec(1)
    return out
