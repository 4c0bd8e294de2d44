"""Pure Python transfer kernels (fallback for the compiled module).

Layout (all int arrays):
  inst_a[i], inst_b[i]    related pair that triggers instance i
  inst_cptr[i]..[i+1]     candidate witnesses of instance i
  cand_optr[c]..[c+1]     obligations of candidate c
  obl_a[o]                state of system 1 that must be matched
  obl_sptr[o]..[o+1]      admissible partner states (into set_b)
An instance holds under R iff R[a, b] is false or some candidate has every
obligation met by at least one admissible partner in R.
"""


def _lists(arrays):
    return [a.tolist() if hasattr(a, "tolist") else list(a) for a in arrays]


def _holds(R, i, cptr, optr, obl_a, sptr, set_b):
    for c in range(cptr[i], cptr[i + 1]):
        good = True
        for o in range(optr[c], optr[c + 1]):
            row = R[obl_a[o]]
            for s in range(sptr[o], sptr[o + 1]):
                if row[set_b[s]]:
                    break
            else:
                good = False
                break
        if good:
            return True
    return False


def first_violation(R, inst_a, inst_b, inst_cptr, cand_optr, obl_a, obl_sptr, set_b):
    """Index of the first active instance that fails under R, or -1."""
    Rl = R.tolist() if hasattr(R, "tolist") else R
    a, b, cptr, optr, oa, sptr, sb = _lists((inst_a, inst_b, inst_cptr, cand_optr, obl_a, obl_sptr, set_b))
    for i in range(len(a)):
        if Rl[a[i]][b[i]] and not _holds(Rl, i, cptr, optr, oa, sptr, sb):
            return i
    return -1


def refine(R, inst_a, inst_b, inst_cptr, cand_optr, obl_a, obl_sptr, set_b):
    """Delete violating pairs from R (in place) until a fixpoint; returns the
    number of deleted pairs."""
    Rl = R.tolist()
    a, b, cptr, optr, oa, sptr, sb = _lists((inst_a, inst_b, inst_cptr, cand_optr, obl_a, obl_sptr, set_b))
    deleted = 0
    while True:
        drop = []
        for i in range(len(a)):
            if Rl[a[i]][b[i]] and not _holds(Rl, i, cptr, optr, oa, sptr, sb):
                drop.append((a[i], b[i]))
        if not drop:
            break
        for x, y in sorted(set(drop)):
            if Rl[x][y]:
                Rl[x][y] = 0
                R[x, y] = 0
                deleted += 1
    return deleted


BACKEND = "python"
