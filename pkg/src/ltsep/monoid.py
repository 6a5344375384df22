"""Transition monoid (Boolean matrices) and the derived parameter bounds."""

from dataclasses import dataclass


class MonoidBudgetError(RuntimeError):
    """The monoid closure exceeded the configured element budget."""


def letter_matrix(nfa, sym):
    """Adjacency matrix of a letter, as a tuple of row bitmasks."""
    rows = [0] * nfa.n_states
    for (p, a, q) in nfa.transitions:
        if a == sym:
            rows[p] |= 1 << q
    return tuple(rows)


def identity_matrix(n):
    return tuple(1 << i for i in range(n))


def mat_mul(m1, m2):
    """Boolean product of two square matrices in row-bitmask form."""
    n = len(m1)
    out = []
    for i in range(n):
        row = 0
        bits = m1[i]
        j = 0
        while bits:
            if bits & 1:
                row |= m2[j]
            bits >>= 1
            j += 1
        out.append(row)
    return tuple(out)


def word_matrix(nfa, w):
    """Matrix of a word: product of its letter matrices."""
    m = identity_matrix(nfa.n_states)
    for a in w:
        m = mat_mul(m, letter_matrix(nfa, a))
    return m


@dataclass
class TransitionMonoid:
    """Closure of the letter matrices under Boolean product.

    elements[0] is the identity; generator_of maps each symbol to the index
    of its letter matrix.
    """

    elements: list
    generator_of: dict
    index: dict

    @property
    def size(self):
        return len(self.elements)

    def eval_word(self, w):
        """Index of the matrix of w (the word -> monoid morphism)."""
        cur = self.elements[0]
        for a in w:
            cur = mat_mul(cur, self.elements[self.generator_of[a]])
        return self.index[cur]


def transition_monoid(nfa, budget=100_000):
    """Compute the transition monoid; fails loudly past the element budget."""
    ident = identity_matrix(nfa.n_states)
    elements = [ident]
    index = {ident: 0}
    generator_of = {}
    gens = []
    for a in nfa.alphabet:
        m = letter_matrix(nfa, a)
        if m not in index:
            index[m] = len(elements)
            elements.append(m)
        generator_of[a] = index[m]
        gens.append(m)
    frontier = list(elements)
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                prod = mat_mul(m, g)
                if prod not in index:
                    if len(elements) >= budget:
                        raise MonoidBudgetError(
                            "monoid closure exceeded budget of %d elements" % budget
                        )
                    index[prod] = len(elements)
                    elements.append(prod)
                    nxt.append(prod)
        frontier = nxt
    return TransitionMonoid(elements, generator_of, index)


def profile_width_bound(m):
    """Window width sufficient for the locally-testable decision: 4*(size+1)."""
    return 4 * (m.size + 1)


def num_profiles(k, alphabet_size):
    """Number of possible width-k profiles over an alphabet of given size."""
    if k < 1:
        raise ValueError("k must be >= 1")
    kl = k // 2
    kr = k - kl
    a = alphabet_size
    left = sum(a ** i for i in range(kl + 1))
    right = sum(a ** j for j in range(kr + 1))
    return left * right


def threshold_bound(k, alphabet_size, n):
    """Counting threshold sufficient at width k: (num_profiles * n) ** num_profiles.

    n is one plus either the monoid size or the automaton size; exact bigint.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if alphabet_size < 1 or n < 1:
        raise ValueError("alphabet_size and n must be >= 1")
    ak = num_profiles(k, alphabet_size)
    return (ak * n) ** ak
