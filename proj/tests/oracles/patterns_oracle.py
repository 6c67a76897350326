"""Independent oracle for pattern enumeration.

Works on raw 2x2 matrices over Z/k acting on primitive vectors; a word is
pruned as soon as it contains a contiguous factor acting as the identity.
"""
import sys
from math import gcd


def states(k):
    return [(u, v) for u in range(k) for v in range(k) if gcd(gcd(u, v), k) == 1]


def act(word, st, k):
    u, v = st
    for a in word:
        u, v = v, (a * v + u) % k
    return (u, v)


def is_identity(word, k, sts):
    return all(act(word, s, k) == s for s in sts)


def enumerate_k(k, limit=None):
    sts = states(k)
    elementary, prime = [], [()]
    # factor-check only suffixes of the extended word: prefix already prime
    stack = [()]
    while stack:
        w = stack.pop()
        for a in range(k):
            x = w + (a,)
            null_suffix = None
            for i in range(len(x)):
                if is_identity(x[i:], k, sts):
                    null_suffix = i
                    break
            if null_suffix is None:
                prime.append(x)
                stack.append(x)
            elif null_suffix == 0:
                elementary.append(x)
    return elementary, prime


if __name__ == "__main__":
    k = int(sys.argv[1])
    e, p = enumerate_k(k)
    tk = [w for w in p if act(w, (1, 0), k)[1] == 0]
    print("k", k, "elementary", len(e), "prime", len(p), "type_k_prime", len(tk),
          "max_elem_len", max(map(len, e)), "max_prime_len", max(map(len, p)))
    if k == 2:
        print(sorted(e, key=lambda w: (len(w), w)))
        print(sorted(p, key=lambda w: (len(w), w)))
        print(sorted(tk, key=lambda w: (len(w), w)))
